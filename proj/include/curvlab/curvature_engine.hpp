#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "curvlab/metric_catalog.hpp"

namespace curvlab {

// Rank-4 array with R(i,j,k,l) = <R(e_i,e_j)e_l, e_k> for the curvature
// endomorphism R(X,Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y].
// The unit round sphere has R(i,j,i,j) = +1.
class Riemann {
public:
    Riemann() = default;
    explicit Riemann(int m) : m_(m), data_(static_cast<std::size_t>(m * m * m * m), 0.0) {}

    int dim() const { return m_; }
    double operator()(int i, int j, int k, int l) const { return data_[index(i, j, k, l)]; }
    double& operator()(int i, int j, int k, int l) { return data_[index(i, j, k, l)]; }
    double norm() const;  // sqrt of the sum over all m^4 components
    std::span<const double> raw() const { return data_; }
    std::span<double> raw() { return data_; }

private:
    std::size_t index(int i, int j, int k, int l) const {
        return static_cast<std::size_t>(((i * m_ + j) * m_ + k) * m_ + l);
    }
    int m_ = 0;
    std::vector<double> data_;
};

struct SymmetryResiduals {
    double antisym_first = 0;   // R_ijkl + R_jikl
    double antisym_second = 0;  // R_ijkl + R_ijlk
    double pair = 0;            // R_ijkl - R_klij
    double bianchi = 0;         // R_ijkl + R_jkil + R_kijl
    double norm = 0;

    double worst() const;
    bool within(double rel_tol) const;
};

SymmetryResiduals symmetry_residuals(const Riemann& r);

struct CurvaturePoint {
    int m = 0;
    std::optional<Eigen::MatrixXd> frame;  // columns: orthonormal frame in chart coordinates
    Riemann riemann;
    Eigen::MatrixXd ricci;
    double scalar = 0;

    double sectional(int i, int j) const { return riemann(i, j, i, j); }
};

// Gamma(c, a, b) = Gamma^c_{ab}
class Christoffel {
public:
    explicit Christoffel(int m) : m_(m), data_(static_cast<std::size_t>(m * m * m), 0.0) {}
    int dim() const { return m_; }
    double operator()(int c, int a, int b) const { return data_[static_cast<std::size_t>((c * m_ + a) * m_ + b)]; }
    double& operator()(int c, int a, int b) { return data_[static_cast<std::size_t>((c * m_ + a) * m_ + b)]; }

private:
    int m_;
    std::vector<double> data_;
};

Christoffel christoffel(const ChartSpec& chart, std::span<const double> x);

// Coordinate-frame R_abcd from a metric jet.
Riemann coordinate_riemann(const MetricJet& jet);
Riemann homogeneous_riemann(const HomogeneousSpec& h);

// Full curvature data at x (ignored for homogeneous geometry; for products,
// the concatenation of the factor points). Throws ConsistencyError when the
// symmetry residuals exceed 1e-8 relative to |R|.
CurvaturePoint curvature_at(const ManifoldSpec& spec, std::span<const double> x = {});
CurvaturePoint curvature_at_chart(const ChartSpec& chart, std::span<const double> x);
CurvaturePoint curvature_homogeneous(const HomogeneousSpec& h);
// Riemannian product: block-diagonal curvature, zero on mixed planes.
CurvaturePoint curvature_product(const CurvaturePoint& a, const CurvaturePoint& b);

// Express cp in the frame e'_i = sum_a Q(a,i) e_a for orthogonal Q.
CurvaturePoint reframe(const CurvaturePoint& cp, const Eigen::MatrixXd& q);
CurvaturePoint from_riemann(Riemann r, std::optional<Eigen::MatrixXd> frame = std::nullopt);

// Asserts R(0,1,0,1) = +1 on the unit round sphere, once per process.
void verify_sign_convention();

struct CurvOpMatrix {
    int n = 0;  // m(m-1)/2
    Eigen::MatrixXd entries;
    std::vector<double> spectrum;  // ascending
    double op_norm = 0;
    double frob_norm = 0;

    double min() const { return spectrum.front(); }
    double max() const { return spectrum.back(); }
};

CurvOpMatrix assemble_curv_op(const CurvaturePoint& cp);

// Sorted eigenvalues of a symmetric matrix (lower triangle is read).
std::vector<double> sorted_eigenvalues(const Eigen::MatrixXd& a);
double operator_norm(const Eigen::MatrixXd& a);

double partial_eig_sum(const CurvOpMatrix& op, int count);

struct WeylGap {
    double max_gap = 0;
    double bound = 0;
    bool holds = false;
};
WeylGap weyl_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct NormSandwich {
    double op = 0;
    double frob = 0;
    bool holds = false;
};
NormSandwich norm_sandwich_check(const Eigen::MatrixXd& a);

}  // namespace curvlab
