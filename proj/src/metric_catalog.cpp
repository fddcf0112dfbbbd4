#include "curvlab/metric_catalog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "curvlab/errors.hpp"

namespace curvlab {

bool Box::contains_interior(std::span<const double> x, double margin) const {
    if (x.size() != lo.size()) return false;
    for (std::size_t a = 0; a < x.size(); ++a)
        if (!(x[a] > lo[a] + margin && x[a] < hi[a] - margin)) return false;
    return true;
}

double Box::distance_to_boundary(std::span<const double> x) const {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < x.size(); ++a) d = std::min({d, x[a] - lo[a], hi[a] - x[a]});
    return d;
}

std::vector<double> ChartSpec::to_chart(std::span<const double> u, double* jacobian) const {
    std::vector<double> x(static_cast<std::size_t>(m));
    if (param) {
        const double j = param(u, x);
        if (jacobian) *jacobian = j;
    } else {
        std::copy(u.begin(), u.end(), x.begin());
        if (jacobian) *jacobian = 1.0;
    }
    return x;
}

double HomogeneousSpec::antisymmetry_residual() const {
    double r = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) r = std::max(r, std::abs((*this)(i, j, k) + (*this)(j, i, k)));
    return r;
}

double HomogeneousSpec::jacobi_residual() const {
    double r = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) {
                    double s = 0.0;
                    for (int p = 0; p < m; ++p)
                        s += (*this)(i, j, p) * (*this)(p, k, l) + (*this)(j, k, p) * (*this)(p, i, l) +
                             (*this)(k, i, p) * (*this)(p, j, l);
                    r = std::max(r, std::abs(s));
                }
    return r;
}

int ManifoldSpec::dimension() const {
    if (const auto* c = chart()) return c->m;
    if (const auto* h = homogeneous()) return h->m;
    const auto* p = product();
    return p->first->dimension() + p->second->dimension();
}

int ManifoldSpec::point_dimension() const {
    if (const auto* c = chart()) return c->m;
    if (homogeneous()) return 0;
    const auto* p = product();
    return p->first->point_dimension() + p->second->point_dimension();
}

bool ManifoldSpec::is_homogeneous() const {
    if (homogeneous()) return true;
    if (const auto* p = product()) return p->first->is_homogeneous() && p->second->is_homogeneous();
    return false;
}

const ChartSpec* ManifoldSpec::chart() const { return std::get_if<ChartSpec>(&geometry); }
const HomogeneousSpec* ManifoldSpec::homogeneous() const { return std::get_if<HomogeneousSpec>(&geometry); }
const ProductGeometry* ManifoldSpec::product() const { return std::get_if<ProductGeometry>(&geometry); }

double fd_first_step(double coordinate) {
    return std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(coordinate));
}

double fd_second_step(double coordinate) {
    // eps^(1/3) leaves ~5 digits in a second difference quotient; eps^(1/6)
    // balances truncation and rounding after one Richardson level. The extra
    // factor 1/4 covers charts whose metric varies on scales well below 1
    // (the polar Fubini-Study chart near rho = pi/2).
    return 0.25 * std::pow(std::numeric_limits<double>::epsilon(), 1.0 / 6.0) * std::max(1.0, std::abs(coordinate));
}

namespace {

void check_spd(const Eigen::MatrixXd& g) {
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success) throw ValidationError("metric is not symmetric positive definite at this point");
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

}  // namespace

MetricJet finite_difference_jet(const ChartSpec& chart, std::span<const double> x) {
    const int m = chart.m;
    std::vector<double> xs(x.begin(), x.end());
    auto eval = [&](int a, double da, int b, double db) {
        std::vector<double> y = xs;
        if (a >= 0) y[static_cast<std::size_t>(a)] += da;
        if (b >= 0) y[static_cast<std::size_t>(b)] += db;
        return chart.g(y);
    };

    MetricJet jet;
    jet.m = m;
    jet.g = symmetrized(chart.g(xs));
    jet.dg.resize(static_cast<std::size_t>(m));
    jet.d2g.resize(static_cast<std::size_t>(m * m));

    for (int a = 0; a < m; ++a) {
        const double h = fd_first_step(xs[static_cast<std::size_t>(a)]);
        auto central = [&](double s) { return Eigen::MatrixXd((eval(a, s, -1, 0) - eval(a, -s, -1, 0)) / (2.0 * s)); };
        jet.dg[static_cast<std::size_t>(a)] = symmetrized((4.0 * central(0.5 * h) - central(h)) / 3.0);
    }
    for (int a = 0; a < m; ++a) {
        for (int b = a; b < m; ++b) {
            const double ha = fd_second_step(xs[static_cast<std::size_t>(a)]);
            const double hb = fd_second_step(xs[static_cast<std::size_t>(b)]);
            auto quotient = [&](double s) -> Eigen::MatrixXd {
                if (a == b) return (eval(a, s * ha, -1, 0) - 2.0 * jet.g + eval(a, -s * ha, -1, 0)) / (s * s * ha * ha);
                return (eval(a, s * ha, b, s * hb) - eval(a, s * ha, b, -s * hb) - eval(a, -s * ha, b, s * hb) +
                        eval(a, -s * ha, b, -s * hb)) /
                       (4.0 * s * s * ha * hb);
            };
            Eigen::MatrixXd d = symmetrized((4.0 * quotient(0.5) - quotient(1.0)) / 3.0);
            jet.d2g[static_cast<std::size_t>(a * m + b)] = d;
            jet.d2g[static_cast<std::size_t>(b * m + a)] = d;
        }
    }
    return jet;
}

MetricJet metric_derivatives(const ChartSpec& chart, std::span<const double> x) {
    if (static_cast<int>(x.size()) != chart.m) throw DomainError("metric_derivatives: point has wrong dimension");
    if (chart.has_closed_form_derivatives()) {
        if (!chart.domain.contains_interior(x)) throw DomainError("metric_derivatives: point outside chart interior");
        MetricJet jet = chart.jet(x);
        check_spd(jet.g);
        return jet;
    }
    double margin = 0.0;
    for (double xa : x) margin = std::max(margin, 2.0 * fd_second_step(xa));
    if (!chart.domain.contains_interior(x, margin))
        throw DomainError("metric_derivatives: point too close to the chart boundary for the difference stencil");
    MetricJet jet = finite_difference_jet(chart, x);
    check_spd(jet.g);
    return jet;
}

ChartSpec without_closed_forms(ChartSpec chart) {
    chart.jet = nullptr;
    chart.flat_jets = {};
    return chart;
}

void validate_spec(const ManifoldSpec& spec) {
    if (const auto* c = spec.chart()) {
        if (c->m <= 0) throw ConfigurationError(spec.name + ": chart dimension must be positive");
        if (static_cast<int>(c->domain.lo.size()) != c->m || static_cast<int>(c->domain.hi.size()) != c->m)
            throw ConfigurationError(spec.name + ": chart domain has wrong dimension");
        if (!c->g) throw ConfigurationError(spec.name + ": chart has no metric");
    } else if (const auto* h = spec.homogeneous()) {
        if (h->m <= 0 || h->c.size() != static_cast<std::size_t>(h->m * h->m * h->m))
            throw ConfigurationError(spec.name + ": structure constants have wrong shape");
        if (h->antisymmetry_residual() > 0.0)
            throw ValidationError(spec.name + ": structure constants are not antisymmetric");
        if (h->jacobi_residual() > 1e-12) throw ValidationError(spec.name + ": structure constants violate Jacobi");
    } else {
        const auto* p = spec.product();
        if (!p->first || !p->second) throw ConfigurationError(spec.name + ": product factor missing");
    }
    if (spec.diameter && !(spec.diameter->value > 0.0))
        throw ConfigurationError(spec.name + ": diameter must be positive");
    if (spec.volume && !(*spec.volume > 0.0)) throw ConfigurationError(spec.name + ": volume must be positive");
}

}  // namespace curvlab
