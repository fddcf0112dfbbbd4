#include "curvlab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "curvlab/errors.hpp"

namespace curvlab {

namespace {
// P_n(x) and P_n'(x) by the three-term recurrence, n >= 1
std::pair<double, double> legendre(int n, double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}
}  // namespace

GaussLegendreRule gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: need at least one node");
    GaussLegendreRule rule;
    rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
    rule.weights.assign(static_cast<std::size_t>(n), 0.0);
    if (n == 1) {
        rule.weights[0] = 2.0;
        return rule;
    }
    for (int i = 0; i < n / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = legendre(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = legendre(n, x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    if (n % 2 == 1) {
        const double dp = legendre(n, 0.0).second;
        rule.weights[static_cast<std::size_t>(n / 2)] = 2.0 / (dp * dp);
    }
    return rule;
}

QuadratureGrid::QuadratureGrid(ManifoldPtr spec, int order) : spec_(std::move(spec)), order_(order) {
    if (order < 1) throw DomainError("quadrature order must be positive");
    rule_ = gauss_legendre(order);
    collect(*spec_);
    for (const auto& leaf : leaves_) size_ *= leaf.count;
}

void QuadratureGrid::collect(const ManifoldSpec& s) {
    if (const auto* c = s.chart()) {
        for (int a = 0; a < c->m; ++a)
            if (!std::isfinite(c->quad_box.lo[static_cast<std::size_t>(a)]) ||
                !std::isfinite(c->quad_box.hi[static_cast<std::size_t>(a)]))
                throw UnsupportedError(s.name + ": integration box is unbounded");
        Leaf leaf;
        leaf.chart = c;
        leaf.m = c->m;
        leaf.count = 1;
        for (int a = 0; a < c->m; ++a) leaf.count *= static_cast<std::size_t>(order_);
        leaves_.push_back(leaf);
    } else if (s.homogeneous()) {
        if (!s.volume) throw UnsupportedError(s.name + ": homogeneous factor needs volume metadata to integrate");
        leaves_.push_back(Leaf{nullptr, *s.volume, s.dimension(), 1});
    } else {
        const auto* p = s.product();
        collect(*p->first);
        collect(*p->second);
    }
}

QuadratureNode QuadratureGrid::node(std::size_t i) const {
    if (i >= size_) throw DomainError("quadrature node index out of range");
    QuadratureNode out;
    out.weight = 1.0;
    // leaf indices in row-major order (last leaf fastest)
    std::vector<std::size_t> local(leaves_.size());
    for (std::size_t l = leaves_.size(); l-- > 0;) {
        local[l] = i % leaves_[l].count;
        i /= leaves_[l].count;
    }
    for (std::size_t l = 0; l < leaves_.size(); ++l) {
        const Leaf& leaf = leaves_[l];
        if (!leaf.chart) {
            out.weight *= leaf.volume;
            continue;
        }
        const ChartSpec& c = *leaf.chart;
        std::vector<double> u(static_cast<std::size_t>(c.m));
        std::size_t r = local[l];
        double w = 1.0;
        for (int a = c.m; a-- > 0;) {
            const std::size_t q = r % static_cast<std::size_t>(order_);
            r /= static_cast<std::size_t>(order_);
            const double lo = c.quad_box.lo[static_cast<std::size_t>(a)];
            const double hi = c.quad_box.hi[static_cast<std::size_t>(a)];
            const double half = 0.5 * (hi - lo);
            u[static_cast<std::size_t>(a)] = lo + half * (1.0 + rule_.nodes[q]);
            w *= half * rule_.weights[q];
        }
        double jac = 1.0;
        std::vector<double> x = c.to_chart(u, &jac);
        const double det = c.g(x).determinant();
        if (!(det > 0.0)) throw NumericalError(spec_->name + ": metric degenerate at a quadrature node");
        out.weight *= w * jac * std::sqrt(det);
        out.point.insert(out.point.end(), x.begin(), x.end());
    }
    return out;
}

std::vector<QuadratureNode> QuadratureGrid::nodes() const {
    std::vector<QuadratureNode> all;
    all.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) all.push_back(node(i));
    return all;
}

}  // namespace curvlab
