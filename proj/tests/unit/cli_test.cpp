#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "curvlab/cli.hpp"
#include "curvlab/errors.hpp"

using namespace curvlab;
using namespace curvlab::cli;
using nlohmann::json;

namespace {

const std::filesystem::path kExamples = CURVLAB_EXAMPLES_DIR;

json strip_runtime(json r) {
    r.erase("runtime_ms");
    return r;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("strict parsing rejects unknown and misplaced keys") {
    const json ok = {{"command", "spectrum"}, {"manifold", "sphere[4,1]"}};
    CHECK_NOTHROW(parse_config(ok));

    json bad = ok;
    bad["colour"] = "blue";
    CHECK_THROWS_AS(parse_config(bad), ConfigurationError);

    bad = ok;
    bad["options"] = {{"pointz", 3}};
    CHECK_THROWS_AS(parse_config(bad), ConfigurationError);

    bad = ok;
    bad["options"] = {{"pairs", 3}};  // a weyl-check option
    CHECK_THROWS_AS(parse_config(bad), ConfigurationError);

    bad = ok;
    bad["manifold"] = {{"name", "sphere"}, {"params", {4, 1}}, {"radius", 1}};
    CHECK_THROWS_AS(parse_config(bad), ConfigurationError);

    bad = ok;
    bad["output"] = {{"path", "x.json"}, {"compress", true}};
    CHECK_THROWS_AS(parse_config(bad), ConfigurationError);

    bad = ok;
    bad["options"] = {{"points", "four"}};
    CHECK_THROWS_AS(parse_config(bad), ConfigurationError);

    bad = ok;
    bad["options"] = {{"seed", -1}};
    CHECK_THROWS_AS(parse_config(bad), ConfigurationError);

    bad = ok;
    bad["output"] = {{"format", "xml"}};
    CHECK_THROWS_AS(parse_config(bad), ConfigurationError);

    CHECK_THROWS_AS(parse_config(json{{"command", "plot"}}), ConfigurationError);
    CHECK_THROWS_AS(parse_config(json{{"command", "spectrum"}}), ConfigurationError);
    CHECK_THROWS_AS(parse_config(json{{"command", "weyl-check"}, {"manifold", "sphere[2,1]"}}), ConfigurationError);
    CHECK_THROWS_AS(parse_config(json{{"command", "anco-certify"}, {"manifold", "sphere[2,1]"}}), ConfigurationError);
    CHECK_THROWS_AS(parse_config(json::array()), ConfigurationError);

    const json fam = {{"command", "anco-certify"},
                      {"family", {{"base", "heisenberg_nil[{t}]"}, {"schedule", {{"kind", "harmonic"}, {"count", 5}}},
                                  {"extra", 1}}}};
    CHECK_THROWS_AS(parse_config(fam), ConfigurationError);
    json no_placeholder = fam;
    no_placeholder["family"].erase("extra");
    no_placeholder["family"]["base"] = "heisenberg_nil[1]";
    CHECK_THROWS_AS(parse_config(no_placeholder), ConfigurationError);
    json two_sided = fam;
    two_sided["family"].erase("extra");
    two_sided["family"]["condition"] = "two_sided";
    CHECK_THROWS_AS(parse_config(two_sided), ConfigurationError);
}

TEST_CASE("manifold blocks resolve to descriptors") {
    const RunConfig a = parse_config(json{{"command", "spectrum"}, {"manifold", {{"name", "sphere"}, {"params", {4, 1}}}}});
    CHECK(*a.manifold == "sphere[4,1]");
    const RunConfig b = parse_config(json{{"command", "spectrum"}, {"manifold", {{"name", "fubini_study_cp2"}}}});
    CHECK(*b.manifold == "fubini_study_cp2");
    const RunConfig c = parse_config(json{{"command", "spectrum"}, {"manifold", {{"name", "sphere"}, {"params", {2, 0.25}}}}});
    CHECK(*c.manifold == "sphere[2,0.25]");
}

TEST_CASE("every example config parses and round-trips through to_json") {
    int seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(kExamples)) {
        if (entry.path().extension() != ".json") continue;
        CAPTURE(entry.path().string());
        const RunConfig cfg = load_config(entry.path().string());
        const json resolved = to_json(cfg);
        CHECK(to_json(parse_config(resolved)) == resolved);
        CHECK(cfg.command == entry.path().stem().string());
        ++seen;
    }
    CHECK(seen == static_cast<int>(commands().size()));
    CHECK_THROWS_AS(load_config((kExamples / "missing.json").string()), ConfigurationError);
}

TEST_CASE("resolved config fills defaults") {
    const json j = to_json(parse_config(json{{"command", "weyl-check"}}));
    CHECK(j["options"]["pairs"] == 10000);
    CHECK(j["options"]["max_dim"] == 12);
    CHECK(j["options"]["tolerance"] == 1e-10);
    CHECK(j["options"]["order"] == 32);
    CHECK(j["output"]["format"] == "json");
    CHECK_FALSE(j.contains("manifold"));
}

TEST_CASE("reports are deterministic and validate") {
    for (const json& doc : {json{{"command", "spectrum"}, {"manifold", "fubini_study_cp2"}, {"options", {{"points", 3}}}},
                           json{{"command", "pw-check"}, {"manifold", "sphere[4,1]"}, {"options", {{"points", 2}, {"samples", 200}}}},
                           json{{"command", "weyl-check"}, {"options", {{"pairs", 500}}}},
                           json{{"command", "scale-check"}, {"manifold", "sphere[2,1]"}},
                           json{{"command", "gauss-bonnet"}, {"manifold", "sphere[2,1]"}, {"options", {{"order", 16}, {"lambda", 1.0}}}},
                           json{{"command", "anco-certify"},
                                {"family", {{"base", "heisenberg_nil[{t}]"}, {"schedule", {{"kind", "harmonic"}, {"count", 20}}}}}}}) {
        CAPTURE(doc.dump());
        const RunConfig cfg = parse_config(doc);
        const RunResult a = run(cfg);
        const RunResult b = run(cfg);
        CHECK(a.exit_code == 0);
        CHECK_NOTHROW(validate_report(a.report));
        CHECK(strip_runtime(a.report).dump() == strip_runtime(b.report).dump());
        CHECK(a.report["schema_version"] == kSchemaVersion);
        CHECK(a.report["tool_version"] == kToolVersion);
        CHECK(a.report["config"] == to_json(cfg));
        CHECK(a.report["summary"]["verdict"] == "pass");
    }
}

TEST_CASE("thread count does not change the report") {
    json doc = {{"command", "gauss-bonnet"}, {"manifold", "product:sphere[2,1],sphere[2,1]"}, {"options", {{"order", 10}}}};
    doc["options"]["threads"] = 1;
    const json one = strip_runtime(run(parse_config(doc)).report);
    doc["options"]["threads"] = 3;
    json three = strip_runtime(run(parse_config(doc)).report);
    three["config"]["options"]["threads"] = 1;
    CHECK(one.dump() == three.dump());
}

TEST_CASE("exit codes") {
    const RunResult fail = run(parse_config(json{{"command", "spectrum"},
                                                 {"manifold", "sphere[4,1]"},
                                                 {"options", {{"points", 2}, {"expected", {1, 1, 1, 1, 1, 2}}}}}));
    CHECK(fail.exit_code == 1);
    CHECK(fail.report["summary"]["verdict"] == "fail");
    CHECK(fail.report["summary"]["worst_slack"].get<double>() < 0.0);
    CHECK_NOTHROW(validate_report(fail.report));

    const RunResult odd = run(parse_config(json{{"command", "gauss-bonnet"}, {"manifold", "sphere[3,1]"}}));
    CHECK(odd.exit_code == 2);
    CHECK(odd.report["error"]["kind"] == "unsupported");
    CHECK_NOTHROW(validate_report(odd.report));

    const RunResult upper = run(parse_config(json{{"command", "scale-check"}, {"manifold", "heisenberg_nil[1]"}}));
    CHECK(upper.exit_code == 2);
    CHECK(upper.report["error"]["kind"] == "unsupported");

    const RunResult unknown = run(parse_config(json{{"command", "spectrum"}, {"manifold", "klein_bottle"}}));
    CHECK(unknown.exit_code == 2);
    CHECK(unknown.report["error"]["kind"] == "configuration");

    const RunResult bad_point = run(parse_config(
        json{{"command", "spectrum"}, {"manifold", "sphere[2,1]"}, {"options", {{"at", {{0.5, 1.0, 2.0}}}}}}));
    CHECK(bad_point.exit_code == 2);

    const RunResult uncertified = run(parse_config(json{
        {"command", "anco-certify"},
        {"family", {{"base", "heisenberg_nil[{t}]"}, {"schedule", {{"kind", "linear"}, {"count", 3}}}}}}));
    CHECK(uncertified.exit_code == 1);
    CHECK(uncertified.report["summary"]["first_certified_index"].is_null());
}

TEST_CASE("validate_report rejects malformed reports") {
    const json good = run(parse_config(json{{"command", "weyl-check"}, {"options", {{"pairs", 50}}}})).report;
    REQUIRE_NOTHROW(validate_report(good));

    json r = good;
    r.erase("summary");
    CHECK_THROWS_AS(validate_report(r), ValidationError);
    r = good;
    r["extra"] = 1;
    CHECK_THROWS_AS(validate_report(r), ValidationError);
    r = good;
    r["schema_version"] = 2;
    CHECK_THROWS_AS(validate_report(r), ValidationError);
    r = good;
    r["summary"]["verdict"] = "fail";
    CHECK_THROWS_AS(validate_report(r), ValidationError);
    r = good;
    r["records"][0].erase("pass");
    CHECK_THROWS_AS(validate_report(r), ValidationError);
    r = good;
    r["config"]["options"]["bogus"] = 1;
    CHECK_THROWS_AS(validate_report(r), ValidationError);
    r = good;
    r["command"] = "spectrum";
    CHECK_THROWS_AS(validate_report(r), ValidationError);
    r = good;
    r["records_file"] = "x.csv";
    CHECK_THROWS_AS(validate_report(r), ValidationError);
}

TEST_CASE("CSV output writes records and a sibling summary") {
    const auto dir = std::filesystem::temp_directory_path() / "curvlab_cli_test";
    std::filesystem::create_directories(dir);
    const std::string csv = (dir / "spec.csv").string();
    RunConfig cfg = parse_config(json{{"command", "spectrum"},
                                      {"manifold", "sphere[2,1]"},
                                      {"options", {{"points", 3}}},
                                      {"output", {{"path", csv}, {"format", "csv"}}}});
    const RunResult res = run(cfg);
    write_report(res, cfg);
    CHECK(summary_path(csv) == (dir / "spec.summary.json").string());
    CHECK(summary_path("plain") == "plain.summary.json");

    const std::string table = slurp(csv);
    std::istringstream lines(table);
    std::string header;
    std::getline(lines, header);
    CHECK(header.find("spectrum") != std::string::npos);
    CHECK(header.find("slack") != std::string::npos);
    int rows = 0;
    for (std::string line; std::getline(lines, line);) ++rows;
    CHECK(rows == static_cast<int>(res.report["records"].size()));

    const json summary = json::parse(slurp(summary_path(csv)));
    CHECK_FALSE(summary.contains("records"));
    CHECK(summary["records_file"] == csv);
    CHECK_NOTHROW(validate_report(summary));
    CHECK(summary["summary"] == res.report["summary"]);
    std::filesystem::remove_all(dir);

    RunConfig no_path = cfg;
    no_path.output.reset();
    CHECK_THROWS_AS(write_report(res, no_path), ConfigurationError);
}

TEST_CASE("CSV cells") {
    const json recs = json::array({{{"type", "a"}, {"v", {1, 2}}, {"note", "x,y"}}, {{"type", "b"}, {"q", nullptr}}});
    // keys come out sorted within a record; new keys append in first-seen order
    CHECK(records_to_csv(recs) == "note,type,v,q\n\"x,y\",a,1;2,\n,b,,\n");
}
