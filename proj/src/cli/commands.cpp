#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "curvlab/anco_analysis.hpp"
#include "curvlab/cli.hpp"
#include "curvlab/curvature_engine.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/gauss_bonnet.hpp"
#include "curvlab/metric_catalog.hpp"
#include "curvlab/parallel.hpp"
#include "curvlab/quadrature.hpp"
#include "curvlab/weitzenbock.hpp"

namespace curvlab::cli {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
    json records = json::array();
    std::size_t checks = 0;
    std::size_t failures = 0;
    double worst_slack = kInf;
    json notes = json::object();

    void check(bool ok, double slack) {
        ++checks;
        if (!ok) ++failures;
        worst_slack = std::min(worst_slack, slack);
    }
};

// Explicit points when given, otherwise `count` grid nodes drawn with the seed.
std::vector<std::vector<double>> sample_points(const ManifoldPtr& spec, const Options& o, int count) {
    const int d = spec->point_dimension();
    if (!o.at.empty()) {
        if (d == 0) throw ConfigurationError(spec->name + " is homogeneous; 'at' points do not apply");
        for (const auto& p : o.at)
            if (static_cast<int>(p.size()) != d)
                throw ConfigurationError("options.at: point has " + std::to_string(p.size()) + " coordinates, " +
                                         spec->name + " needs " + std::to_string(d));
        return o.at;
    }
    if (d == 0) return {{}};
    const QuadratureGrid grid(spec, o.order);
    std::mt19937_64 rng(o.seed);
    std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
    std::vector<std::vector<double>> out;
    for (int k = 0; k < count; ++k) out.push_back(grid.node(pick(rng)).point);
    return out;
}

Outcome run_spectrum(const RunConfig& cfg) {
    const Options& o = cfg.options;
    const double tol = o.tolerance.value_or(default_tolerance(cfg.command));
    const ManifoldPtr spec = catalog_get(*cfg.manifold);
    Outcome out;
    const auto pts = sample_points(spec, o, o.points);
    for (std::size_t j = 0; j < pts.size(); ++j) {
        const CurvaturePoint cp = curvature_at(*spec, pts[j]);
        const CurvOpMatrix op = assemble_curv_op(cp);
        const SymmetryResiduals res = symmetry_residuals(cp.riemann);
        const NormSandwich ns = norm_sandwich_check(op.entries);
        json r;
        r["type"] = "point";
        r["index"] = j;
        r["point"] = pts[j];
        r["spectrum"] = op.spectrum;
        r["op_norm"] = op.op_norm;
        r["frob_norm"] = op.frob_norm;
        r["scalar"] = cp.scalar;
        r["ricci_eigenvalues"] = json(sorted_eigenvalues(cp.ricci));
        r["symmetry_residual"] = res.worst();
        const double sandwich = std::min(ns.frob - ns.op, std::sqrt(static_cast<double>(op.n)) * ns.op - ns.frob);
        r["norm_sandwich_holds"] = ns.holds;
        if (!o.expected.empty()) {
            if (o.expected.size() != op.spectrum.size())
                throw ConfigurationError("options.expected has " + std::to_string(o.expected.size()) +
                                         " values, the curvature operator has " + std::to_string(op.spectrum.size()));
            double dev = 0.0;
            for (std::size_t k = 0; k < op.spectrum.size(); ++k)
                dev = std::max(dev, std::abs(op.spectrum[k] - o.expected[k]));
            r["max_deviation"] = dev;
            r["slack"] = tol - dev;
            r["pass"] = dev <= tol && ns.holds;
            out.check(dev <= tol && ns.holds, tol - dev);
        } else {
            r["slack"] = sandwich;
            r["pass"] = ns.holds;
            out.check(ns.holds, sandwich);
        }
        out.records.push_back(r);
    }
    out.notes["manifold"] = spec->name;
    return out;
}

Outcome run_gauss_bonnet(const RunConfig& cfg) {
    const Options& o = cfg.options;
    const double tol = o.tolerance.value_or(default_tolerance(cfg.command));
    const ManifoldPtr spec = catalog_get(*cfg.manifold);
    if (spec->dimension() % 2 != 0)
        throw UnsupportedError(spec->name + ": Gauss-Bonnet integration needs even dimension, got " +
                               std::to_string(spec->dimension()));
    EulerOptions eo;
    eo.allow_dim6 = o.allow_dim6;
    Outcome out;

    const EulerEstimate e = euler_characteristic(spec, o.order, eo);
    json r;
    r["type"] = "euler";
    r["chi_est"] = e.chi_est;
    r["rounded"] = e.rounded;
    r["volume_est"] = e.volume_est;
    r["nodes"] = e.nodes;
    r["chi_metadata"] = e.chi_metadata ? json(*e.chi_metadata) : json(nullptr);
    r["abs_residual"] = e.abs_residual ? json(*e.abs_residual) : json(nullptr);
    r["volume_metadata"] = spec->volume ? json(*spec->volume) : json(nullptr);
    if (e.chi_metadata) {
        const bool ok = e.rounded == *e.chi_metadata && *e.abs_residual <= tol;
        r["slack"] = tol - *e.abs_residual;
        r["pass"] = ok;
        out.check(ok, tol - *e.abs_residual);
    } else {
        r["slack"] = nullptr;
        r["pass"] = true;
    }
    out.records.push_back(r);

    if (o.lambda) {
        const VolumeBoundCheck v = volume_lower_bound_check(spec, *o.lambda, o.order, eo);
        json b;
        b["type"] = "volume_bound";
        b["lambda"] = *o.lambda;
        b["sup_integrand"] = v.sup_integrand;
        b["volume"] = v.volume;
        b["volume_quadrature"] = v.volume_quadrature;
        b["volume_source"] = v.volume_from_metadata ? "metadata" : "quadrature";
        b["chi"] = v.chi;
        b["slack"] = v.residual;
        b["pass"] = v.holds;
        out.check(v.holds, v.residual);
        out.records.push_back(b);
    }
    if (o.nonneg_check) {
        const NonnegIntegrandCheck n = nonneg_operator_implies_nonneg_integrand(spec, o.order, eo);
        json b;
        b["type"] = "nonneg_integrand";
        b["violations"] = n.violations;
        b["nodes"] = n.nodes;
        b["nonneg_nodes"] = n.nonneg_nodes;
        b["min_integrand"] = n.min_integrand;
        b["slack"] = 0.0 - static_cast<double>(n.violations);
        b["pass"] = n.violations == 0;
        out.check(n.violations == 0, 0.0 - static_cast<double>(n.violations));
        out.records.push_back(b);
    }
    out.notes["manifold"] = spec->name;
    return out;
}

Outcome run_pw_check(const RunConfig& cfg) {
    const Options& o = cfg.options;
    const double tol = o.tolerance.value_or(default_tolerance(cfg.command));
    const ManifoldPtr spec = catalog_get(*cfg.manifold);
    const int m = spec->dimension();
    std::vector<int> ps = o.p;
    if (ps.empty())
        for (int p = 1; p <= m / 2; ++p) ps.push_back(p);
    for (int p : ps)
        if (p < 1 || p > m / 2)
            throw ConfigurationError("options.p: " + std::to_string(p) + " is not in 1.." + std::to_string(m / 2));
    if (ps.empty()) throw UnsupportedError(spec->name + ": no admissible degree p for dimension " + std::to_string(m));
    Outcome out;
    const auto pts = sample_points(spec, o, o.points);
    for (std::size_t j = 0; j < pts.size(); ++j) {
        const CurvaturePoint cp = curvature_at(*spec, pts[j]);
        for (int p : ps) {
            // seed varies per point and degree so samples are independent yet reproducible
            const std::uint64_t seed = o.seed * 1000003ULL + j * 101ULL + static_cast<std::uint64_t>(p);
            const PwCheck pw = pw_bound_check(cp, p, o.samples, seed);
            for (const auto& d : pw.degrees) {
                json r;
                r["type"] = "degree";
                r["point_index"] = j;
                r["point"] = pts[j];
                r["p"] = p;
                r["k"] = d.k;
                r["kappa"] = pw.kappa;
                r["bound"] = d.bound;
                r["min_quotient"] = d.min_quotient;
                r["slack"] = d.min_slack;
                const bool ok = d.min_slack >= -tol;
                r["pass"] = ok;
                out.check(ok, d.min_slack);
                out.records.push_back(r);
            }
        }
    }
    out.notes["manifold"] = spec->name;
    out.notes["samples_per_degree"] = o.samples;
    return out;
}

Eigen::MatrixXd random_symmetric(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) a(i, j) = a(j, i) = gauss(rng);
    return a;
}

Outcome run_weyl_check(const RunConfig& cfg) {
    const Options& o = cfg.options;
    const double tol = o.tolerance.value_or(default_tolerance(cfg.command));
    Outcome out;
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> scale(-6.0, 1.0);
    struct Tally {
        int pairs = 0;
        double worst_excess = -kInf;
        int weyl_violations = 0;
        int sandwich_violations = 0;
    };
    std::vector<Tally> by_dim(static_cast<std::size_t>(o.max_dim));
    for (int t = 0; t < o.pairs; ++t) {
        const int n = 1 + t % o.max_dim;
        const Eigen::MatrixXd a = random_symmetric(n, rng);
        const Eigen::MatrixXd b = a + std::pow(10.0, scale(rng)) * random_symmetric(n, rng);
        const WeylGap w = weyl_gap(a, b);
        Tally& tl = by_dim[static_cast<std::size_t>(n - 1)];
        ++tl.pairs;
        const double excess = w.max_gap - w.bound;
        tl.worst_excess = std::max(tl.worst_excess, excess);
        if (excess > tol) ++tl.weyl_violations;
        for (const auto* m : {&a, &b})
            if (!norm_sandwich_check(*m).holds) ++tl.sandwich_violations;
    }
    for (int n = 1; n <= o.max_dim; ++n) {
        const Tally& tl = by_dim[static_cast<std::size_t>(n - 1)];
        if (tl.pairs == 0) continue;
        json r;
        r["type"] = "random_pairs";
        r["dim"] = n;
        r["pairs"] = tl.pairs;
        r["worst_excess"] = tl.worst_excess;
        r["weyl_violations"] = tl.weyl_violations;
        r["sandwich_violations"] = tl.sandwich_violations;
        const bool ok = tl.weyl_violations == 0 && tl.sandwich_violations == 0;
        r["slack"] = tol - tl.worst_excess;
        r["pass"] = ok;
        out.check(ok, tol - tl.worst_excess);
        out.records.push_back(r);
    }
    // A = 0, B = diag(delta, -delta) saturates the bound.
    const double delta = 0.75;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2, 2);
    b(0, 0) = delta;
    b(1, 1) = -delta;
    const WeylGap w = weyl_gap(a, b);
    json r;
    r["type"] = "rank2_equality";
    r["dim"] = 2;
    r["max_gap"] = w.max_gap;
    r["bound"] = w.bound;
    const double dev = std::abs(w.max_gap - w.bound);
    r["slack"] = 1e-12 - dev;
    r["pass"] = dev <= 1e-12;
    out.check(dev <= 1e-12, 1e-12 - dev);
    out.records.push_back(r);
    return out;
}

FamilySpec to_family(const FamilyBlock& f) {
    FamilySpec fam;
    fam.base = f.base;
    if (f.schedule.kind == "harmonic") fam.schedule = harmonic_schedule(f.schedule.count);
    else if (f.schedule.kind == "linear") fam.schedule = linear_schedule(f.schedule.count);
    else fam.schedule = f.schedule.values;
    fam.condition = parse_condition(f.condition);
    fam.lambda_upper = f.lambda_upper.value_or(0.0);
    fam.count = f.count;
    fam.epsilon = f.epsilon;
    if (!fam.epsilon.empty() && fam.epsilon.size() != fam.schedule.size())
        throw ConfigurationError("family.epsilon needs one threshold per member");
    fam.diameter_factor = f.diameter_factor;
    fam.sample_points = f.sample_points;
    return fam;
}

Outcome run_anco(const RunConfig& cfg) {
    const FamilySpec fam = to_family(*cfg.family);
    const AncoReport rep = certify_condition(fam);
    Outcome out;
    for (const auto& m : rep.members) {
        json r;
        r["type"] = "member";
        r["index"] = m.index;
        r["param"] = m.param;
        r["points"] = m.points;
        r["lambda_min"] = m.lambda_min;
        r["lambda_max"] = m.lambda_max;
        r["partial_sums"] = m.partial_sums;
        r["diameter"] = m.diameter;
        r["diameter_kind"] = m.diameter_kind == DiameterKind::exact ? "exact" : "upper_bound";
        r["scaled_quantity"] = m.scaled_quantity;
        r["threshold"] = m.threshold;
        r["scaled_upper"] = m.scaled_upper ? json(*m.scaled_upper) : json(nullptr);
        r["slack"] = m.slack;
        r["pass"] = m.pass;
        out.records.push_back(r);
    }
    // Certification concerns the tail: a passing tail reindexes to a sequence
    // meeting the condition for every i.
    out.checks = 1;
    out.failures = rep.first_certified_index ? 0 : 1;
    double tail = kInf;
    if (rep.first_certified_index)
        for (const auto& m : rep.members)
            if (m.index >= *rep.first_certified_index) tail = std::min(tail, m.slack);
    out.worst_slack = rep.first_certified_index ? tail : rep.worst_slack;
    out.notes["condition"] = to_string(rep.condition);
    out.notes["all_members_pass"] = rep.all_pass;
    out.notes["first_certified_index"] = rep.first_certified_index ? json(*rep.first_certified_index) : json(nullptr);
    out.notes["all_members_worst_slack"] = rep.worst_slack;
    out.notes["sampling_caveat"] = rep.sampling_caveat.empty() ? json(nullptr) : json(rep.sampling_caveat);
    out.notes["expected_conclusion"] = rep.expected_conclusion.empty() ? json(nullptr) : json(rep.expected_conclusion);
    out.notes["chi_metadata"] = rep.chi_metadata ? json(*rep.chi_metadata) : json(nullptr);
    out.notes["metadata_consistent"] = rep.metadata_consistent ? json(*rep.metadata_consistent) : json(nullptr);
    return out;
}

Outcome run_scale_check(const RunConfig& cfg) {
    const Options& o = cfg.options;
    const double tol = o.tolerance.value_or(default_tolerance(cfg.command));
    const ManifoldPtr spec = catalog_get(*cfg.manifold);
    Outcome out;
    for (double c : o.scales) {
        const double dev = scale_invariance_check(spec, c, o.points);
        json r;
        r["type"] = "scale";
        r["c"] = c;
        r["max_rel_dev"] = dev;
        r["slack"] = tol - dev;
        r["pass"] = dev <= tol;
        out.check(dev <= tol, tol - dev);
        out.records.push_back(r);
    }
    out.notes["manifold"] = spec->name;
    return out;
}

int exit_code_for(const Error& e) {
    const std::string k = e.kind();
    if (k == "numerical" || k == "internal_consistency") return 1;
    return 2;
}

}  // namespace

json error_report(const std::string& command, const std::string& kind, const std::string& message,
                  const json& config) {
    json r;
    r["schema_version"] = kSchemaVersion;
    r["tool_version"] = kToolVersion;
    r["command"] = command;
    r["config"] = config;
    r["error"] = {{"kind", kind}, {"message", message}};
    r["runtime_ms"] = 0.0;
    return r;
}

RunResult run(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const json config = to_json(cfg);
    set_thread_limit(cfg.options.threads);
    RunResult result;
    try {
        Outcome out;
        if (cfg.command == "spectrum") out = run_spectrum(cfg);
        else if (cfg.command == "gauss-bonnet") out = run_gauss_bonnet(cfg);
        else if (cfg.command == "pw-check") out = run_pw_check(cfg);
        else if (cfg.command == "weyl-check") out = run_weyl_check(cfg);
        else if (cfg.command == "anco-certify") out = run_anco(cfg);
        else if (cfg.command == "scale-check") out = run_scale_check(cfg);
        else throw ConfigurationError("unknown command '" + cfg.command + "'");

        json summary = out.notes;
        summary["verdict"] = out.failures == 0 ? "pass" : "fail";
        summary["worst_slack"] = std::isfinite(out.worst_slack) ? json(out.worst_slack) : json(nullptr);
        summary["checks"] = out.checks;
        summary["failures"] = out.failures;

        result.report["schema_version"] = kSchemaVersion;
        result.report["tool_version"] = kToolVersion;
        result.report["command"] = cfg.command;
        result.report["config"] = config;
        result.report["records"] = std::move(out.records);
        result.report["summary"] = std::move(summary);
        result.exit_code = out.failures == 0 ? 0 : 1;
    } catch (const Error& e) {
        result.report = error_report(cfg.command, e.kind(), e.what(), config);
        result.exit_code = exit_code_for(e);
    }
    set_thread_limit(0);
    result.report["runtime_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace curvlab::cli
