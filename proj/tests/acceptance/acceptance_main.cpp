// One PASS/FAIL line per acceptance criterion; nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "curvlab/anco_analysis.hpp"
#include "curvlab/curvature_engine.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/gauss_bonnet.hpp"
#include "curvlab/metric_catalog.hpp"
#include "curvlab/quadrature.hpp"
#include "curvlab/weitzenbock.hpp"

using namespace curvlab;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void criterion(const std::string& name, double budget_s, const std::function<void(Outcome&)>& body) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(out);
    } catch (const std::exception& e) {
        out.pass = false;
        out.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > budget_s) {
        out.pass = false;
        out.detail << " [over time budget]";
    }
    if (!out.pass) ++failures;
    std::printf("%s  %-34s %8.2fs / %5.0fs %s\n", out.pass ? "PASS" : "FAIL", name.c_str(), secs, budget_s,
                out.detail.str().c_str());
    std::fflush(stdout);
}

// Uniform point in each chart factor's domain, 2% away from the faces.
std::vector<double> random_point(const ManifoldSpec& s, std::mt19937_64& rng) {
    if (const auto* c = s.chart()) {
        std::vector<double> x;
        for (int a = 0; a < c->m; ++a) {
            const double lo = c->domain.lo[static_cast<std::size_t>(a)], hi = c->domain.hi[static_cast<std::size_t>(a)];
            const double w = hi - lo;
            x.push_back(std::uniform_real_distribution<double>(lo + 0.02 * w, hi - 0.02 * w)(rng));
        }
        return x;
    }
    if (s.homogeneous()) return {};
    auto x = random_point(*s.product()->first, rng);
    const auto y = random_point(*s.product()->second, rng);
    x.insert(x.end(), y.begin(), y.end());
    return x;
}

int samples_for(const ManifoldSpec& s, int n) { return s.point_dimension() == 0 ? 1 : n; }

void euler_case(Outcome& out, const std::string& name, int order, double expected, double tol) {
    const EulerEstimate e = euler_characteristic(catalog_get(name), order);
    const double dev = std::abs(e.chi_est - expected);
    out.detail << name << " chi=" << e.chi_est << " dev=" << dev << " order=" << order;
    out.require(dev <= tol, "chi within tolerance");
    out.require(e.rounded == static_cast<long>(expected), "rounding reproduces chi");
    out.require(e.chi_metadata && *e.chi_metadata == static_cast<int>(expected), "metadata");
}

}  // namespace

int main() {
    verify_sign_convention();

    criterion("euler S^2", 1, [](Outcome& o) { euler_case(o, "sphere[2,1]", 32, 2, 1e-6); });
    // the flat integrand vanishes identically, so any order is exact
    criterion("euler T^4", 1, [](Outcome& o) { euler_case(o, "flat_torus[1,1,1,1]", 4, 0, 1e-9); });
    criterion("euler S^4", 30, [](Outcome& o) { euler_case(o, "sphere[4,1]", 32, 2, 1e-3); });
    criterion("euler S^2 x S^2", 60, [](Outcome& o) { euler_case(o, "product:sphere[2,1],sphere[2,1]", 32, 4, 1e-3); });
    criterion("euler CP^2", 300, [](Outcome& o) { euler_case(o, "fubini_study_cp2", 32, 3, 1e-2); });

    criterion("spectra S^4, S^2xS^2, T^m", 30, [](Outcome& o) {
        std::mt19937_64 rng(1);
        double s4 = 0.0, pp = 0.0, pair_sum = 0.0, flat = 0.0;
        const auto sphere = catalog_get("sphere[4,1]");
        const auto prod = catalog_get("product:sphere[2,1],sphere[2,1]");
        const std::vector<double> want_pp = {0, 0, 0, 0, 1, 1};
        for (int t = 0; t < 100; ++t) {
            for (double v : assemble_curv_op(curvature_at(*sphere, random_point(*sphere, rng))).spectrum)
                s4 = std::max(s4, std::abs(v - 1.0));
            const CurvOpMatrix op = assemble_curv_op(curvature_at(*prod, random_point(*prod, rng)));
            for (std::size_t k = 0; k < 6; ++k) pp = std::max(pp, std::abs(op.spectrum[k] - want_pp[k]));
            pair_sum = std::max(pair_sum, std::abs(partial_eig_sum(op, 2)));
        }
        for (const char* n : {"flat_torus[1,1]", "flat_torus[1,2,3]", "flat_torus[1,1,1,1]",
                              "flat_torus[1,2,3,4,5]"}) {
            const auto s = catalog_get(n);
            for (int t = 0; t < 20; ++t)
                for (double v : assemble_curv_op(curvature_at(*s, random_point(*s, rng))).spectrum)
                    flat = std::max(flat, std::abs(v));
        }
        o.detail << "S4 dev=" << s4 << " S2xS2 dev=" << pp << " |l1+l2|=" << pair_sum << " flat=" << flat;
        o.require(s4 <= 1e-8, "S^4");
        o.require(pp <= 1e-8, "S^2xS^2");
        o.require(pair_sum <= 1e-8, "lambda_1 + lambda_2 = 0");
        o.require(flat <= 1e-12, "flat tori");
    });

    criterion("petersen-wink bound", 120, [](Outcome& o) {
        std::mt19937_64 rng(2);
        double worst = INFINITY;
        int checks = 0, violations = 0;
        for (const auto& n : standard_catalog()) {
            const auto s = catalog_get(n);
            const int m = s->dimension();
            for (int t = 0; t < samples_for(*s, 8); ++t) {
                const CurvaturePoint cp = curvature_at(*s, random_point(*s, rng));
                for (int p = 1; p <= m / 2; ++p)
                    for (std::uint64_t seed : {11u, 22u, 33u}) {
                        const PwCheck c = pw_bound_check(cp, p, 1000, seed);
                        ++checks;
                        worst = std::min(worst, c.min_slack);
                        if (!c.holds || c.min_slack < -1e-8) ++violations;
                    }
            }
        }
        o.detail << checks << " checks, min_slack=" << worst;
        o.require(violations == 0, "min_slack >= -1e-8");
    });

    criterion("degree-1 weitzenbock = ricci", 30, [](Outcome& o) {
        std::mt19937_64 rng(3);
        double worst = 0.0;
        for (const auto& n : standard_catalog()) {
            const auto s = catalog_get(n);
            for (int t = 0; t < samples_for(*s, 100); ++t) {
                const CurvaturePoint cp = curvature_at(*s, random_point(*s, rng));
                worst = std::max(worst, (weitzenbock_matrix(cp, 1) - cp.ricci).cwiseAbs().maxCoeff());
            }
        }
        o.detail << "max dev=" << worst;
        o.require(worst <= 1e-9, "1e-9");
    });

    criterion("weyl and norm sandwich", 30, [](Outcome& o) {
        std::mt19937_64 rng(4);
        std::normal_distribution<double> nd;
        std::uniform_real_distribution<double> u(-6.0, 1.0);
        auto sym = [&](int n) {
            Eigen::MatrixXd a(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = nd(rng);
            return a;
        };
        int violations = 0;
        double worst = -INFINITY;
        for (int t = 0; t < 10000; ++t) {
            const int n = 1 + t % 12;
            const Eigen::MatrixXd a = sym(n);
            const Eigen::MatrixXd b = a + std::pow(10.0, u(rng)) * sym(n);
            const WeylGap w = weyl_gap(a, b);
            worst = std::max(worst, w.max_gap - w.bound);
            if (w.max_gap > w.bound + 1e-10 || !norm_sandwich_check(a).holds || !norm_sandwich_check(b).holds)
                ++violations;
        }
        Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2, 2), d = Eigen::MatrixXd::Zero(2, 2);
        d(0, 0) = 0.75;
        d(1, 1) = -0.75;
        const WeylGap eq = weyl_gap(z, d);
        const double gap = std::abs(eq.max_gap - eq.bound);
        o.detail << "violations=" << violations << " worst excess=" << worst << " rank-2 gap=" << gap;
        o.require(violations == 0, "no violations");
        o.require(gap <= 1e-12, "rank-2 equality");
    });

    criterion("scale invariance lambda diam^2", 30, [](Outcome& o) {
        double worst = 0.0;
        int entries = 0;
        for (const auto& n : standard_catalog()) {
            const auto s = catalog_get(n);
            if (!s->diameter || s->diameter->kind != DiameterKind::exact) continue;
            ++entries;
            for (double c : {0.5, 2.0, 10.0}) worst = std::max(worst, scale_invariance_check(s, c, 16));
        }
        o.detail << entries << " exact-diameter entries, max_rel_dev=" << worst;
        o.require(worst <= 1e-10, "1e-10");
    });

    criterion("heisenberg collapsing family", 10, [](Outcome& o) {
        FamilySpec f;
        f.base = "heisenberg_nil[{t}]";
        f.schedule = harmonic_schedule(50);
        f.condition = Condition::anco_all;
        const AncoReport rep = certify_condition(f);
        double oracle = 0.0;
        bool negative = true;
        for (const auto& m : rep.members) {
            oracle = std::max(oracle, std::abs(m.lambda_min + 0.75 * m.param * m.param));
            negative = negative && m.lambda_min < 0.0;
        }
        o.detail << "members=" << rep.members.size() << " oracle dev=" << oracle << " i0="
                 << (rep.first_certified_index ? std::to_string(*rep.first_certified_index) : "none")
                 << " chi=" << (rep.chi_metadata ? std::to_string(*rep.chi_metadata) : "?");
        o.require(negative, "lambda_1 < 0 for every member");
        o.require(oracle <= 1e-10, "closed-form oracle");
        o.require(rep.first_certified_index.has_value(), "tail certified");
        o.require(rep.metadata_consistent.value_or(false), "chi = 0 consistent");
    });

    criterion("volume lower bound", 60, [](Outcome& o) {
        // Lambda is the exact operator norm of each entry
        const std::map<std::string, double> lambda = {
            {"sphere[2,1]", 1.0},      {"sphere[2,0.5]", 4.0},     {"sphere[4,1]", 1.0},
            {"scaled:sphere[4,1](2)", 0.25}, {"fubini_study_cp2", 6.0}, {"product:sphere[2,1],sphere[2,1]", 1.0},
        };
        int covered = 0;
        double round_worst = 0.0;
        for (const auto& n : standard_catalog()) {
            const auto s = catalog_get(n);
            if (s->dimension() % 2 != 0 || !s->euler_char || *s->euler_char == 0) continue;
            const auto it = lambda.find(n);
            o.require(it != lambda.end(), "Lambda for " + n);
            if (it == lambda.end()) continue;
            const VolumeBoundCheck v = volume_lower_bound_check(s, it->second, s->dimension() == 2 ? 32 : 12);
            o.require(v.holds, n);
            if (n.find("sphere[") != std::string::npos && n.find("product") == std::string::npos)
                round_worst = std::max(round_worst, std::abs(v.residual));
            ++covered;
        }
        o.detail << covered << " entries, round-sphere residual=" << round_worst;
        o.require(round_worst <= 1e-6, "equality on round spheres");
    });

    criterion("nonneg operator => nonneg integrand", 60, [](Outcome& o) {
        std::size_t nodes = 0, violations = 0;
        for (const auto& n : standard_catalog()) {
            const auto s = catalog_get(n);
            if (s->dimension() % 2 != 0) continue;
            const NonnegIntegrandCheck c =
                nonneg_operator_implies_nonneg_integrand(s, s->dimension() == 2 ? 32 : 16);
            nodes += c.nonneg_nodes;
            violations += c.violations;
        }
        o.detail << nodes << " nonnegative-operator nodes, violations=" << violations;
        o.require(violations == 0, "zero violations");
    });

    criterion("C(n) = n^2", 1, [](Outcome& o) {
        bool ok = true;
        for (int n = 1; n <= 10; ++n) {
            int best = 0;
            for (int k = 1; k <= 2 * n; ++k) best = std::max(best, k * (2 * n - k));
            ok = ok && weitzenbock_constant(n) == best && best == n * n;
        }
        o.detail << "n = 1..10";
        o.require(ok, "exhaustive max");
    });

    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
