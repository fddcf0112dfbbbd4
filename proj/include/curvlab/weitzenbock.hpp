#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "curvlab/curvature_engine.hpp"

namespace curvlab {

// Coefficients of a k-form over the lexicographic basis of an orthonormal
// coframe; |alpha|^2 is the plain sum of squares.
struct FormVector {
    int k = 0;
    int m = 0;
    Eigen::VectorXd coeffs;

    static FormVector zero(int m, int k);
    static FormVector basis(int m, int k, std::size_t rank);
    double norm_squared() const { return coeffs.squaredNorm(); }
};

// R(e_a, e_b) acting on alpha as a derivation:
//   (R(e_a,e_b) alpha)(X_1..X_k) = - sum_s alpha(X_1, .., R(e_a,e_b) X_s, .., X_k).
FormVector curvature_action(const CurvaturePoint& cp, int a, int b, const FormVector& alpha);

// Weitzenbock curvature term; on 1-forms it is the Ricci endomorphism.
FormVector weitzenbock_ric(const CurvaturePoint& cp, const FormVector& alpha);

// Matrix of alpha -> Ric(alpha) on Lambda^k in the lexicographic basis.
Eigen::MatrixXd weitzenbock_matrix(const CurvaturePoint& cp, int k);

struct DegreeSlack {
    int k = 0;
    double min_slack = 0;
    double min_quotient = 0;  // smallest sampled <Ric a, a>
    double bound = 0;         // kappa k (m - k)
};

struct PwCheck {
    int p = 0;
    double kappa = 0;
    double min_slack = 0;
    bool holds = false;
    std::vector<DegreeSlack> degrees;
};

// Samples unit k-forms for every degree 1 <= k <= m-1 with k <= p or
// k >= m - p and checks <Ric a, a> >= kappa k (m-k), where
// kappa = min(0, (lambda_1 + .. + lambda_{m-p}) / (m-p)).
PwCheck pw_bound_check(const CurvaturePoint& cp, int p, int samples, std::uint64_t seed);

// max over 1 <= k <= 2n of k (2n - k)
int weitzenbock_constant(int n);

}  // namespace curvlab
