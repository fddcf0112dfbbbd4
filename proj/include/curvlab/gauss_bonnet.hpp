#pragma once

#include <cstddef>
#include <optional>

#include "curvlab/curvature_engine.hpp"
#include "curvlab/quadrature.hpp"

namespace curvlab {

// Dimension 6 costs (6!)^2 terms per point; callers opt in explicitly.
struct EulerOptions {
    bool allow_dim6 = false;
};

// sum over sigma, tau in S_m of sgn(sigma) sgn(tau) prod_i R(s(2i-1), s(2i), t(2i-1), t(2i))
double pfaffian_sum(const Riemann& r);

// Frozen normalization c(m) for m in {2, 4, 6}, calibrated so chi(S^m) = 2.
double euler_normalization(int m);
// Recomputes c(m) from the unit round sphere: 2 / (pfaffian_sum * Vol(S^m)).
double calibrate_euler_normalization(int m);

double euler_integrand(const CurvaturePoint& cp, EulerOptions opts = {});

struct EulerEstimate {
    double chi_est = 0;
    std::optional<int> chi_metadata;
    std::optional<double> abs_residual;
    long rounded = 0;
    double volume_est = 0;
    std::size_t nodes = 0;
};

EulerEstimate euler_characteristic(const ManifoldPtr& spec, int order, EulerOptions opts = {});

struct NonnegIntegrandCheck {
    std::size_t violations = 0;
    std::size_t nodes = 0;
    std::size_t nonneg_nodes = 0;  // nodes with lambda_1 >= -1e-10
    double min_integrand = 0;
};

NonnegIntegrandCheck nonneg_operator_implies_nonneg_integrand(const ManifoldPtr& spec, int order,
                                                              EulerOptions opts = {});

struct VolumeBoundCheck {
    double sup_integrand = 0;
    double volume = 0;             // metadata volume when known, else the quadrature sum
    double volume_quadrature = 0;
    bool volume_from_metadata = false;
    int chi = 0;
    double residual = 0;  // sup_P * vol - |chi|
    bool holds = false;
};

// |chi| <= sup|P| * Vol over the grid; throws PreconditionError naming the
// first node whose spectrum leaves [-Lambda, Lambda].
VolumeBoundCheck volume_lower_bound_check(const ManifoldPtr& spec, double lambda, int order, EulerOptions opts = {});

}  // namespace curvlab
