#include "curvlab/gauss_bonnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include "curvlab/errors.hpp"
#include "curvlab/parallel.hpp"

namespace curvlab {

namespace {

struct PermTable {
    int m = 0;
    std::vector<int> perms;  // m entries per permutation
    std::vector<int> signs;
};

PermTable build_perms(int m) {
    PermTable t;
    t.m = m;
    std::vector<int> p(static_cast<std::size_t>(m));
    std::iota(p.begin(), p.end(), 0);
    do {
        int inversions = 0;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) inversions += p[static_cast<std::size_t>(i)] > p[static_cast<std::size_t>(j)];
        t.perms.insert(t.perms.end(), p.begin(), p.end());
        t.signs.push_back(inversions % 2 ? -1 : 1);
    } while (std::next_permutation(p.begin(), p.end()));
    return t;
}

const PermTable& perms(int m) {
    if (m == 2) {
        static const PermTable t = build_perms(2);
        return t;
    }
    if (m == 4) {
        static const PermTable t = build_perms(4);
        return t;
    }
    if (m == 6) {
        static const PermTable t = build_perms(6);
        return t;
    }
    throw DomainError("Euler integrand supports m in {2, 4, 6}");
}

void check_dimension(int m, const EulerOptions& opts) {
    if (m % 2 != 0) throw DomainError("Euler integrand needs even dimension, got " + std::to_string(m));
    if (m == 6 && !opts.allow_dim6) throw UnsupportedError("dimension 6 Euler integrand is disabled (allow_dim6)");
    if (m < 2 || m > 6) throw UnsupportedError("Euler integrand supports m in {2, 4, 6}");
}

bool all_charts_full_measure(const ManifoldSpec& s) {
    if (const auto* c = s.chart()) return c->covers_full_measure;
    if (s.homogeneous()) return true;
    const auto* p = s.product();
    return all_charts_full_measure(*p->first) && all_charts_full_measure(*p->second);
}

void check_integrable(const ManifoldSpec& s, const EulerOptions& opts) {
    check_dimension(s.dimension(), opts);
    if (!all_charts_full_measure(s))
        throw UnsupportedError(s.name + ": no full-measure chart, cannot integrate the Euler form");
}

}  // namespace

double pfaffian_sum(const Riemann& r) {
    const int m = r.dim();
    const PermTable& t = perms(m);
    const std::size_t count = t.signs.size();
    const int half = m / 2;
    double total = 0.0;
    for (std::size_t a = 0; a < count; ++a) {
        const int* s = &t.perms[a * static_cast<std::size_t>(m)];
        double row = 0.0;
        for (std::size_t b = 0; b < count; ++b) {
            const int* u = &t.perms[b * static_cast<std::size_t>(m)];
            double prod = t.signs[b];
            for (int i = 0; i < half && prod != 0.0; ++i) prod *= r(s[2 * i], s[2 * i + 1], u[2 * i], u[2 * i + 1]);
            row += prod;
        }
        total += t.signs[a] * row;
    }
    return total;
}

double euler_normalization(int m) {
    constexpr double pi = std::numbers::pi;
    switch (m) {
        case 2: return 1.0 / (8.0 * pi);
        case 4: return 1.0 / (128.0 * pi * pi);
        case 6: return 1.0 / (3072.0 * pi * pi * pi);
        default: throw DomainError("no Euler normalization for m = " + std::to_string(m));
    }
}

double calibrate_euler_normalization(int m) {
    if (m != 2 && m != 4 && m != 6) throw DomainError("calibration defined for m in {2, 4, 6}");
    Riemann r(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) r(i, j, k, l) = (i == k && j == l ? 1.0 : 0.0) - (i == l && j == k ? 1.0 : 0.0);
    const double vol = 2.0 * std::pow(std::numbers::pi, 0.5 * (m + 1)) / std::tgamma(0.5 * (m + 1));
    return 2.0 / (pfaffian_sum(r) * vol);
}

double euler_integrand(const CurvaturePoint& cp, EulerOptions opts) {
    check_dimension(cp.m, opts);
    return euler_normalization(cp.m) * pfaffian_sum(cp.riemann);
}

EulerEstimate euler_characteristic(const ManifoldPtr& spec, int order, EulerOptions opts) {
    check_integrable(*spec, opts);
    const QuadratureGrid grid(spec, order);
    const std::size_t n = grid.size();
    std::vector<double> contrib(n), weights(n);
    parallel_blocks(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const QuadratureNode node = grid.node(i);
            const CurvaturePoint cp = curvature_at(*spec, node.point);
            contrib[i] = node.weight * euler_integrand(cp, opts);
            weights[i] = node.weight;
        }
    });
    EulerEstimate est;
    est.chi_est = pairwise_sum(contrib);
    est.volume_est = pairwise_sum(weights);
    est.nodes = n;
    est.rounded = std::lround(est.chi_est);
    est.chi_metadata = spec->euler_char;
    if (spec->euler_char) est.abs_residual = std::abs(est.chi_est - *spec->euler_char);
    return est;
}

NonnegIntegrandCheck nonneg_operator_implies_nonneg_integrand(const ManifoldPtr& spec, int order, EulerOptions opts) {
    check_integrable(*spec, opts);
    const QuadratureGrid grid(spec, order);
    const std::size_t n = grid.size();
    std::vector<char> nonneg(n), violated(n);
    std::vector<double> values(n);
    parallel_blocks(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const CurvaturePoint cp = curvature_at(*spec, grid.node(i).point);
            const CurvOpMatrix op = assemble_curv_op(cp);
            const double p = euler_integrand(cp, opts);
            values[i] = p;
            nonneg[i] = op.min() >= -1e-10;
            violated[i] = nonneg[i] && p < -1e-10;
        }
    });
    NonnegIntegrandCheck out;
    out.nodes = n;
    out.nonneg_nodes = static_cast<std::size_t>(std::count(nonneg.begin(), nonneg.end(), 1));
    out.violations = static_cast<std::size_t>(std::count(violated.begin(), violated.end(), 1));
    out.min_integrand = n ? *std::min_element(values.begin(), values.end()) : 0.0;
    return out;
}

VolumeBoundCheck volume_lower_bound_check(const ManifoldPtr& spec, double lambda, int order, EulerOptions opts) {
    if (!spec->euler_char) throw PreconditionError(spec->name + ": volume bound needs Euler characteristic metadata");
    if (!(lambda > 0.0)) throw PreconditionError("volume bound needs Lambda > 0");
    check_integrable(*spec, opts);
    const QuadratureGrid grid(spec, order);
    const std::size_t n = grid.size();
    std::vector<double> sup(n), weights(n), extreme(n);
    parallel_blocks(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const QuadratureNode node = grid.node(i);
            const CurvaturePoint cp = curvature_at(*spec, node.point);
            const CurvOpMatrix op = assemble_curv_op(cp);
            extreme[i] = op.op_norm;
            sup[i] = std::abs(euler_integrand(cp, opts));
            weights[i] = node.weight;
        }
    });
    constexpr double kRel = 1e-8;  // matches the spectrum accuracy
    for (std::size_t i = 0; i < n; ++i) {
        if (extreme[i] > lambda * (1.0 + kRel)) {
            std::ostringstream msg;
            msg << spec->name << ": curvature operator eigenvalue " << extreme[i] << " exceeds Lambda = " << lambda
                << " at node " << i << " (";
            const auto pt = grid.node(i).point;
            for (std::size_t a = 0; a < pt.size(); ++a) msg << (a ? ", " : "") << pt[a];
            msg << ")";
            throw PreconditionError(msg.str());
        }
    }
    VolumeBoundCheck out;
    out.sup_integrand = n ? *std::max_element(sup.begin(), sup.end()) : 0.0;
    out.volume_quadrature = pairwise_sum(weights);
    out.volume_from_metadata = spec->volume.has_value();
    out.volume = spec->volume ? *spec->volume : out.volume_quadrature;
    out.chi = *spec->euler_char;
    out.residual = out.sup_integrand * out.volume - std::abs(out.chi);
    out.holds = std::abs(out.chi) <= out.sup_integrand * out.volume + 1e-6;
    return out;
}

}  // namespace curvlab
