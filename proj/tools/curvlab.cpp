#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "curvlab/cli.hpp"
#include "curvlab/errors.hpp"

namespace {

using nlohmann::json;
namespace cli = curvlab::cli;

struct Flags {
    std::string config;
    std::string manifold;
    std::string output;
    std::string format;
    int threads = -1;
    long long seed = -1;
    int order = -1;
};

json load_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw curvlab::ConfigurationError("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw curvlab::ConfigurationError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

// Flags override the file; the merged document goes through the strict parser.
cli::RunConfig resolve(const std::string& command, const Flags& f) {
    json doc = f.config.empty() ? json::object() : load_document(f.config);
    if (!doc.is_object()) throw curvlab::ConfigurationError("config: top level must be an object");
    if (!doc.contains("command")) doc["command"] = command;
    if (doc["command"] != command)
        throw curvlab::ConfigurationError("config is for '" + doc["command"].dump() + "', invoked as '" + command + "'");
    if (!f.manifold.empty()) doc["manifold"] = f.manifold;
    auto& opts = doc["options"];
    if (opts.is_null()) opts = json::object();
    if (f.threads >= 0) opts["threads"] = f.threads;
    if (f.seed >= 0) opts["seed"] = f.seed;
    if (f.order >= 0) opts["order"] = f.order;
    if (opts.empty()) doc.erase("options");
    if (!f.output.empty() || !f.format.empty()) {
        auto& out = doc["output"];
        if (out.is_null()) out = json::object();
        if (!f.output.empty()) out["path"] = f.output;
        if (!f.format.empty()) out["format"] = f.format;
    }
    cli::RunConfig cfg = cli::parse_config(doc);
    if (cfg.format == cli::Format::csv && !cfg.output)
        throw curvlab::ConfigurationError("csv output needs --output or output.path");
    return cfg;
}

int fail_early(const std::string& command, const curvlab::Error& e) {
    std::cout << cli::error_report(command, e.kind(), e.what(), json::object()).dump(2) << "\n";
    std::cerr << "curvlab: " << e.what() << "\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks for curvature operators, Gauss-Bonnet integrals and collapsing families"};
    app.set_version_flag("--version", std::string(cli::kToolVersion));
    app.require_subcommand(1);

    Flags flags;
    const std::string about[] = {
        "curvature operator spectra at chart points",
        "Euler characteristic by Gauss-Bonnet quadrature",
        "Petersen-Wink lower bounds on the Weitzenbock term",
        "Weyl perturbation and norm comparisons on random symmetric pairs",
        "certify almost nonnegative conditions along a family",
        "scale invariance of lambda * diam^2",
    };
    std::size_t i = 0;
    for (const auto& name : cli::commands()) {
        CLI::App* sub = app.add_subcommand(name, about[i++]);
        sub->add_option("--config", flags.config, "run configuration (JSON)");
        sub->add_option("--manifold", flags.manifold, "catalog descriptor, e.g. sphere[4,1]");
        sub->add_option("--output", flags.output, "report path (stdout when omitted)");
        sub->add_option("--format", flags.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--threads", flags.threads, "worker cap, 0 = hardware default")->check(CLI::NonNegativeNumber);
        sub->add_option("--seed", flags.seed, "random seed")->check(CLI::NonNegativeNumber);
        sub->add_option("--order", flags.order, "quadrature nodes per axis")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    cli::RunConfig cfg;
    try {
        cfg = resolve(command, flags);
    } catch (const curvlab::Error& e) {
        return fail_early(command, e);
    }

    const cli::RunResult result = cli::run(cfg);
    try {
        cli::validate_report(result.report);
        cli::write_report(result, cfg);
    } catch (const curvlab::Error& e) {
        return fail_early(command, e);
    }
    if (result.report.contains("error")) std::cerr << "curvlab: " << result.report["error"]["message"].get<std::string>() << "\n";
    return result.exit_code;
}
