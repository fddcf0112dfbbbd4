#include "curvlab/weitzenbock.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "curvlab/errors.hpp"
#include "curvlab/exterior_algebra.hpp"

namespace curvlab {

FormVector FormVector::zero(int m, int k) {
    return FormVector{k, m, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(binomial(m, k)))};
}

FormVector FormVector::basis(int m, int k, std::size_t rank) {
    FormVector f = zero(m, k);
    if (rank >= static_cast<std::size_t>(f.coeffs.size())) throw DomainError("FormVector::basis: rank out of range");
    f.coeffs(static_cast<Eigen::Index>(rank)) = 1.0;
    return f;
}

namespace {

void check_form(const CurvaturePoint& cp, const FormVector& alpha) {
    if (alpha.m != cp.m || alpha.k < 0 || alpha.k > alpha.m ||
        static_cast<std::size_t>(alpha.coeffs.size()) != binomial(alpha.m, alpha.k))
        throw DomainError("form degree/dimension does not match the curvature point");
}

// R(e_a,e_b) e_c = sum_d R(a,b,d,c) e_d
FormVector act(const CurvaturePoint& cp, const FormBasis& basis, int a, int b, const FormVector& alpha) {
    const int m = cp.m, k = alpha.k;
    FormVector out = FormVector::zero(m, k);
    for (std::size_t row = 0; row < basis.size(); ++row) {
        const auto& idx = basis[row].indices;
        double v = 0.0;
        for (int s = 0; s < k; ++s) {
            const int c = idx[static_cast<std::size_t>(s)];
            for (int d = 0; d < m; ++d) {
                const double coef = cp.riemann(a, b, d, c);
                if (coef == 0.0) continue;
                const auto e = basis.substitute(row, s, d);
                if (e.sign != 0) v -= coef * e.sign * alpha.coeffs(static_cast<Eigen::Index>(e.rank));
            }
        }
        out.coeffs(static_cast<Eigen::Index>(row)) = v;
    }
    return out;
}

FormVector ric(const CurvaturePoint& cp, const FormBasis& basis, const FormVector& alpha) {
    const int m = cp.m, k = alpha.k;
    FormVector out = FormVector::zero(m, k);
    if (k == 0 || k == m) return out;
    // (R(e_a, e_j) alpha) for every frame pair, reused across slots
    std::vector<FormVector> acted(static_cast<std::size_t>(m * m));
    for (int a = 0; a < m; ++a)
        for (int j = 0; j < m; ++j) acted[static_cast<std::size_t>(a * m + j)] = act(cp, basis, a, j, alpha);
    // Ric(alpha)(e_I) = -sum_s sum_j (R(e_{i_s}, e_j) alpha)(e_I with slot s -> j); the
    // leading minus converts to the reversed-order curvature of the Weitzenbock
    // formula, which makes the degree-one term the Ricci endomorphism.
    for (std::size_t row = 0; row < basis.size(); ++row) {
        const auto& idx = basis[row].indices;
        double v = 0.0;
        for (int s = 0; s < k; ++s) {
            const int a = idx[static_cast<std::size_t>(s)];
            for (int j = 0; j < m; ++j) {
                const auto e = basis.substitute(row, s, j);
                if (e.sign != 0) v -= e.sign * acted[static_cast<std::size_t>(a * m + j)].coeffs(static_cast<Eigen::Index>(e.rank));
            }
        }
        out.coeffs(static_cast<Eigen::Index>(row)) = v;
    }
    return out;
}

}  // namespace

FormVector curvature_action(const CurvaturePoint& cp, int a, int b, const FormVector& alpha) {
    check_form(cp, alpha);
    if (a < 0 || a >= cp.m || b < 0 || b >= cp.m) throw DomainError("curvature_action: frame index out of range");
    return act(cp, FormBasis(cp.m, alpha.k), a, b, alpha);
}

FormVector weitzenbock_ric(const CurvaturePoint& cp, const FormVector& alpha) {
    check_form(cp, alpha);
    return ric(cp, FormBasis(cp.m, alpha.k), alpha);
}

Eigen::MatrixXd weitzenbock_matrix(const CurvaturePoint& cp, int k) {
    if (k < 0 || k > cp.m) throw DomainError("weitzenbock_matrix: degree out of range");
    const FormBasis basis(cp.m, k);
    const auto n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd mat(n, n);
    for (Eigen::Index col = 0; col < n; ++col)
        mat.col(col) = ric(cp, basis, FormVector::basis(cp.m, k, static_cast<std::size_t>(col))).coeffs;
    return mat;
}

PwCheck pw_bound_check(const CurvaturePoint& cp, int p, int samples, std::uint64_t seed) {
    const int m = cp.m;
    if (p < 1 || p > m / 2) throw DomainError("pw_bound_check: need 1 <= p <= floor(m/2)");
    if (samples < 1) throw DomainError("pw_bound_check: need at least one sample");
    const CurvOpMatrix op = assemble_curv_op(cp);

    PwCheck out;
    out.p = p;
    out.kappa = std::min(0.0, partial_eig_sum(op, m - p) / (m - p));
    out.min_slack = std::numeric_limits<double>::infinity();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int k = 1; k <= m - 1; ++k) {
        if (!(k <= p || k >= m - p)) continue;
        const Eigen::MatrixXd ric_mat = weitzenbock_matrix(cp, k);
        const double bound = out.kappa * k * (m - k);
        DegreeSlack d{k, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), bound};
        Eigen::VectorXd alpha(ric_mat.rows());
        for (int s = 0; s < samples; ++s) {
            // Gaussian direction, normalized: uniform on the unit sphere
            double nrm = 0.0;
            do {
                for (Eigen::Index r = 0; r < alpha.size(); ++r) alpha(r) = normal(rng);
                nrm = alpha.norm();
            } while (nrm == 0.0);
            alpha /= nrm;
            const double q = alpha.dot(ric_mat * alpha);
            d.min_quotient = std::min(d.min_quotient, q);
            d.min_slack = std::min(d.min_slack, q - bound);
        }
        out.min_slack = std::min(out.min_slack, d.min_slack);
        out.degrees.push_back(d);
    }
    out.holds = out.min_slack >= -1e-8;
    return out;
}

int weitzenbock_constant(int n) {
    if (n < 1) throw DomainError("weitzenbock_constant: n must be at least 1");
    return n * n;
}

}  // namespace curvlab
