#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "curvlab/metric_catalog.hpp"

namespace curvlab::testing {

// Uniform point in the chart domain shrunk by `margin` of each side.
inline std::vector<double> random_chart_point(const ChartSpec& c, std::mt19937_64& rng, double margin = 0.05) {
    std::vector<double> x;
    for (int a = 0; a < c.m; ++a) {
        double lo = c.domain.lo[static_cast<std::size_t>(a)], hi = c.domain.hi[static_cast<std::size_t>(a)];
        if (!std::isfinite(lo)) lo = -2.0;
        if (!std::isfinite(hi)) hi = 2.0;
        const double w = hi - lo;
        x.push_back(std::uniform_real_distribution<double>(lo + margin * w, hi - margin * w)(rng));
    }
    return x;
}

// Point accepted by curvature_at: chart coordinates, nothing for homogeneous
// geometry, factor points concatenated for products.
inline std::vector<double> random_point(const ManifoldSpec& s, std::mt19937_64& rng, double margin = 0.05) {
    if (const auto* c = s.chart()) return random_chart_point(*c, rng, margin);
    if (s.homogeneous()) return {};
    const auto* p = s.product();
    auto x = random_point(*p->first, rng, margin);
    const auto y = random_point(*p->second, rng, margin);
    x.insert(x.end(), y.begin(), y.end());
    return x;
}

inline Eigen::MatrixXd random_orthogonal(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    return qr.householderQ();
}

inline Eigen::MatrixXd random_symmetric(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = nd(rng);
    return a;
}

inline double max_abs(const Eigen::MatrixXd& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace curvlab::testing
