#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "curvlab/cli.hpp"
#include "curvlab/errors.hpp"

namespace curvlab::cli {

using nlohmann::json;

namespace {

// Options every command accepts (the matching CLI flags apply everywhere).
const std::set<std::string> kGlobalOptions = {"order", "seed", "threads"};

const std::map<std::string, std::set<std::string>>& command_options() {
    static const std::map<std::string, std::set<std::string>> table = {
        {"spectrum", {"points", "at", "expected", "tolerance"}},
        {"gauss-bonnet", {"lambda", "nonneg_check", "allow_dim6", "tolerance"}},
        {"pw-check", {"samples", "points", "at", "p", "tolerance"}},
        {"weyl-check", {"pairs", "max_dim", "tolerance"}},
        {"anco-certify", {}},
        {"scale-check", {"scales", "points", "tolerance"}},
    };
    return table;
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigurationError(where + ": " + what);
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) fail(where, "unknown key '" + key + "'");
}

double get_number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    return v.get<double>();
}

int get_int(const json& v, const std::string& where, int lo) {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    const auto x = v.get<long long>();
    if (x < lo || x > 1'000'000'000) fail(where, "integer out of range");
    return static_cast<int>(x);
}

std::vector<double> get_numbers(const json& v, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

std::string get_string(const json& v, const std::string& where) {
    if (!v.is_string()) fail(where, "expected a string");
    return v.get<std::string>();
}

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string parse_manifold(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (!v.is_object()) fail("manifold", "expected a descriptor string or {name, params}");
    reject_unknown(v, {"name", "params"}, "manifold");
    if (!v.contains("name")) fail("manifold", "missing 'name'");
    std::string name = get_string(v["name"], "manifold.name");
    if (v.contains("params")) {
        const auto params = get_numbers(v["params"], "manifold.params");
        if (!params.empty()) {
            name += "[";
            for (std::size_t i = 0; i < params.size(); ++i) name += (i ? "," : "") + format_number(params[i]);
            name += "]";
        }
    }
    return name;
}

FamilyBlock parse_family(const json& v) {
    if (!v.is_object()) fail("family", "expected an object");
    reject_unknown(v, {"base", "schedule", "condition", "lambda_upper", "count", "epsilon", "diameter_factor",
                       "sample_points"},
                   "family");
    FamilyBlock f;
    if (!v.contains("base")) fail("family", "missing 'base'");
    f.base = get_string(v["base"], "family.base");
    if (f.base.find("{t}") == std::string::npos) fail("family.base", "needs a {t} placeholder");
    if (!v.contains("schedule")) fail("family", "missing 'schedule'");
    const json& s = v["schedule"];
    if (s.is_array()) {
        f.schedule.kind = "explicit";
        f.schedule.values = get_numbers(s, "family.schedule");
        f.schedule.count = static_cast<int>(f.schedule.values.size());
    } else if (s.is_object()) {
        reject_unknown(s, {"kind", "count"}, "family.schedule");
        if (!s.contains("kind") || !s.contains("count")) fail("family.schedule", "needs 'kind' and 'count'");
        f.schedule.kind = get_string(s["kind"], "family.schedule.kind");
        if (f.schedule.kind != "harmonic" && f.schedule.kind != "linear")
            fail("family.schedule.kind", "expected 'harmonic' or 'linear'");
        f.schedule.count = get_int(s["count"], "family.schedule.count", 1);
    } else {
        fail("family.schedule", "expected an array or {kind, count}");
    }
    if (f.schedule.count < 1) fail("family.schedule", "needs at least one member");
    if (v.contains("condition")) f.condition = get_string(v["condition"], "family.condition");
    if (f.condition != "anco_all" && f.condition != "sum_n" && f.condition != "two_sided")
        fail("family.condition", "expected anco_all, sum_n or two_sided");
    if (v.contains("lambda_upper")) f.lambda_upper = get_number(v["lambda_upper"], "family.lambda_upper");
    if (f.condition == "two_sided" && !f.lambda_upper) fail("family", "two_sided needs 'lambda_upper'");
    if (v.contains("count")) f.count = get_int(v["count"], "family.count", 1);
    if (v.contains("epsilon")) f.epsilon = get_numbers(v["epsilon"], "family.epsilon");
    if (v.contains("diameter_factor")) {
        f.diameter_factor = get_number(v["diameter_factor"], "family.diameter_factor");
        if (!(*f.diameter_factor > 0.0)) fail("family.diameter_factor", "must be positive");
    }
    if (v.contains("sample_points")) f.sample_points = get_int(v["sample_points"], "family.sample_points", 1);
    return f;
}

void parse_options(const json& v, const std::string& command, Options& o) {
    if (!v.is_object()) fail("options", "expected an object");
    std::set<std::string> allowed = kGlobalOptions;
    const auto& extra = command_options().at(command);
    allowed.insert(extra.begin(), extra.end());
    for (const auto& [key, value] : v.items())
        if (!allowed.count(key)) fail("options", "'" + key + "' is not an option of " + command);
    const auto opt = [&](const char* k) -> const json* { return v.contains(k) ? &v[k] : nullptr; };
    if (auto* x = opt("order")) o.order = get_int(*x, "options.order", 1);
    if (auto* x = opt("seed")) {
        if (!x->is_number_unsigned() && !(x->is_number_integer() && x->get<long long>() >= 0))
            fail("options.seed", "expected a non-negative integer");
        o.seed = x->get<std::uint64_t>();
    }
    if (auto* x = opt("threads")) o.threads = get_int(*x, "options.threads", 0);
    if (auto* x = opt("points")) o.points = get_int(*x, "options.points", 1);
    if (auto* x = opt("samples")) o.samples = get_int(*x, "options.samples", 1);
    if (auto* x = opt("at")) {
        if (!x->is_array() || x->empty()) fail("options.at", "expected a non-empty array of points");
        for (std::size_t i = 0; i < x->size(); ++i)
            o.at.push_back(get_numbers((*x)[i], "options.at[" + std::to_string(i) + "]"));
    }
    if (auto* x = opt("p")) {
        if (x->is_number()) o.p = {get_int(*x, "options.p", 0)};
        else if (x->is_array())
            for (std::size_t i = 0; i < x->size(); ++i)
                o.p.push_back(get_int((*x)[i], "options.p[" + std::to_string(i) + "]", 0));
        else fail("options.p", "expected an integer or an array of integers");
    }
    if (auto* x = opt("lambda")) {
        o.lambda = get_number(*x, "options.lambda");
        if (!(*o.lambda > 0.0)) fail("options.lambda", "must be positive");
    }
    if (auto* x = opt("nonneg_check")) {
        if (!x->is_boolean()) fail("options.nonneg_check", "expected a boolean");
        o.nonneg_check = x->get<bool>();
    }
    if (auto* x = opt("allow_dim6")) {
        if (!x->is_boolean()) fail("options.allow_dim6", "expected a boolean");
        o.allow_dim6 = x->get<bool>();
    }
    if (auto* x = opt("scales")) {
        o.scales = get_numbers(*x, "options.scales");
        if (o.scales.empty()) fail("options.scales", "needs at least one factor");
        for (double c : o.scales)
            if (!(c > 0.0)) fail("options.scales", "factors must be positive");
    }
    if (auto* x = opt("expected")) o.expected = get_numbers(*x, "options.expected");
    if (auto* x = opt("pairs")) o.pairs = get_int(*x, "options.pairs", 1);
    if (auto* x = opt("max_dim")) o.max_dim = get_int(*x, "options.max_dim", 1);
    if (auto* x = opt("tolerance")) {
        o.tolerance = get_number(*x, "options.tolerance");
        if (!(*o.tolerance >= 0.0)) fail("options.tolerance", "must be non-negative");
    }
}

}  // namespace

const std::vector<std::string>& commands() {
    static const std::vector<std::string> names = {"spectrum",     "gauss-bonnet", "pw-check",
                                                   "weyl-check",   "anco-certify", "scale-check"};
    return names;
}

double default_tolerance(const std::string& command) {
    if (command == "gauss-bonnet") return 1e-2;
    if (command == "weyl-check" || command == "scale-check") return 1e-10;
    return 1e-8;
}

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) fail("config", "top level must be an object");
    reject_unknown(doc, {"command", "manifold", "family", "options", "output"}, "config");
    RunConfig cfg;
    if (!doc.contains("command")) fail("config", "missing 'command'");
    cfg.command = get_string(doc["command"], "command");
    const auto& names = commands();
    if (std::find(names.begin(), names.end(), cfg.command) == names.end())
        fail("command", "unknown command '" + cfg.command + "'");

    if (doc.contains("manifold")) cfg.manifold = parse_manifold(doc["manifold"]);
    if (doc.contains("family")) cfg.family = parse_family(doc["family"]);
    if (cfg.command == "anco-certify") {
        if (!cfg.family) fail("config", "anco-certify needs a 'family' block");
        if (cfg.manifold) fail("config", "anco-certify takes a family, not a manifold");
    } else if (cfg.command == "weyl-check") {
        if (cfg.manifold || cfg.family) fail("config", "weyl-check works on random matrices and takes no manifold");
    } else {
        if (cfg.family) fail("config", cfg.command + " takes a manifold, not a family");
        if (!cfg.manifold) fail("config", cfg.command + " needs a 'manifold'");
    }

    if (doc.contains("options")) parse_options(doc["options"], cfg.command, cfg.options);

    if (doc.contains("output")) {
        const json& out = doc["output"];
        if (!out.is_object()) fail("output", "expected an object");
        reject_unknown(out, {"path", "format"}, "output");
        if (out.contains("path")) cfg.output = get_string(out["path"], "output.path");
        if (out.contains("format")) {
            const std::string f = get_string(out["format"], "output.format");
            if (f == "json") cfg.format = Format::json;
            else if (f == "csv") cfg.format = Format::csv;
            else fail("output.format", "expected 'json' or 'csv'");
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigurationError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

json to_json(const RunConfig& cfg) {
    json j;
    j["command"] = cfg.command;
    if (cfg.manifold) j["manifold"] = *cfg.manifold;
    if (cfg.family) {
        const FamilyBlock& f = *cfg.family;
        json fam;
        fam["base"] = f.base;
        if (f.schedule.kind == "explicit") fam["schedule"] = f.schedule.values;
        else fam["schedule"] = {{"kind", f.schedule.kind}, {"count", f.schedule.count}};
        fam["condition"] = f.condition;
        if (f.lambda_upper) fam["lambda_upper"] = *f.lambda_upper;
        if (f.count) fam["count"] = *f.count;
        if (!f.epsilon.empty()) fam["epsilon"] = f.epsilon;
        if (f.diameter_factor) fam["diameter_factor"] = *f.diameter_factor;
        fam["sample_points"] = f.sample_points;
        j["family"] = fam;
    }
    const Options& o = cfg.options;
    json opts;
    opts["order"] = o.order;
    opts["seed"] = o.seed;
    opts["threads"] = o.threads;
    for (const auto& key : command_options().at(cfg.command)) {
        if (key == "points") opts[key] = o.points;
        else if (key == "samples") opts[key] = o.samples;
        else if (key == "at" && !o.at.empty()) opts[key] = o.at;
        else if (key == "p" && !o.p.empty()) opts[key] = o.p;
        else if (key == "lambda" && o.lambda) opts[key] = *o.lambda;
        else if (key == "nonneg_check") opts[key] = o.nonneg_check;
        else if (key == "allow_dim6") opts[key] = o.allow_dim6;
        else if (key == "scales") opts[key] = o.scales;
        else if (key == "expected" && !o.expected.empty()) opts[key] = o.expected;
        else if (key == "pairs") opts[key] = o.pairs;
        else if (key == "max_dim") opts[key] = o.max_dim;
        else if (key == "tolerance") opts[key] = o.tolerance.value_or(default_tolerance(cfg.command));
    }
    j["options"] = opts;
    json out;
    if (cfg.output) out["path"] = *cfg.output;
    out["format"] = cfg.format == Format::json ? "json" : "csv";
    j["output"] = out;
    return j;
}

}  // namespace curvlab::cli
