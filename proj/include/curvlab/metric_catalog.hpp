#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace curvlab {

struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    bool contains_interior(std::span<const double> x, double margin = 0.0) const;
    double distance_to_boundary(std::span<const double> x) const;
};

// Metric components and their coordinate partials at one point.
// dg[a](i,j) = d_a g_ij, d2g[a*m+b](i,j) = d_a d_b g_ij.
struct MetricJet {
    int m = 0;
    Eigen::MatrixXd g;
    std::vector<Eigen::MatrixXd> dg;
    std::vector<Eigen::MatrixXd> d2g;

    const Eigen::MatrixXd& second(int a, int b) const { return d2g[static_cast<std::size_t>(a * m + b)]; }
};

// Row-major flat jet in a wider scalar type:
// g[i*m+j], dg[(a*m+i)*m+j], d2g[((a*m+b)*m+i)*m+j].
template <class S>
struct FlatJet {
    int m = 0;
    std::vector<S> g;
    std::vector<S> dg;
    std::vector<S> d2g;
};

template <class S>
using FlatJetFn = std::function<FlatJet<S>(std::span<const double>)>;

// Closed-form jets in flat layout. Curvature uses `flat` directly and falls
// back to the wider types at points where the double result is
// ill-conditioned (near the coordinate singularities of polar charts).
struct FlatJets {
    FlatJetFn<double> flat;
    FlatJetFn<long double> extended;
    FlatJetFn<__float128> quad;
};

using MetricFn = std::function<Eigen::MatrixXd(std::span<const double>)>;
using JetFn = std::function<MetricJet(std::span<const double>)>;
// Maps integration variables u to chart coordinates x; returns |det dx/du|.
using ParamFn = std::function<double(std::span<const double> u, std::span<double> x)>;

struct ChartSpec {
    int m = 0;
    Box domain;
    MetricFn g;
    JetFn jet;  // closed-form derivatives; empty means finite differences
    FlatJets flat_jets;
    bool covers_full_measure = false;

    // Integration box; points map through `param` when it is set, otherwise
    // the box lives in chart coordinates directly.
    Box quad_box;
    ParamFn param;

    bool has_closed_form_derivatives() const { return static_cast<bool>(jet); }
    // Chart point for integration variables u (identity when param is unset).
    std::vector<double> to_chart(std::span<const double> u, double* jacobian = nullptr) const;
};

// Left-invariant metric given by structure constants in a frame declared
// orthonormal: [e_i, e_j] = sum_k c(i,j,k) e_k.
struct HomogeneousSpec {
    int m = 0;
    std::vector<double> c;

    double operator()(int i, int j, int k) const { return c[static_cast<std::size_t>((i * m + j) * m + k)]; }
    double& operator()(int i, int j, int k) { return c[static_cast<std::size_t>((i * m + j) * m + k)]; }

    double antisymmetry_residual() const;
    double jacobi_residual() const;
};

struct ManifoldSpec;

struct ProductGeometry {
    std::shared_ptr<const ManifoldSpec> first;
    std::shared_ptr<const ManifoldSpec> second;
    // Block-diagonal chart on the product, present when both factors reduce
    // to charts.
    std::shared_ptr<const ChartSpec> combined;
};

enum class DiameterKind { exact, upper_bound };

struct Diameter {
    double value = 0.0;
    DiameterKind kind = DiameterKind::exact;
};

struct ManifoldSpec {
    std::string name;
    std::variant<ChartSpec, HomogeneousSpec, ProductGeometry> geometry;
    std::optional<int> euler_char;
    std::optional<Diameter> diameter;
    std::optional<double> volume;
    // User-asserted topology; never derived numerically.
    std::optional<bool> infinite_fundamental_group;

    int dimension() const;
    // Number of coordinates in a point of this spec (0 for homogeneous).
    int point_dimension() const;
    bool is_homogeneous() const;
    const ChartSpec* chart() const;
    const HomogeneousSpec* homogeneous() const;
    const ProductGeometry* product() const;
};

using ManifoldPtr = std::shared_ptr<const ManifoldSpec>;

// Catalog lookup. `name` is either a bare entry name with `params`, or a
// descriptor carrying its own parameters:
//   sphere[m,r]  flat_torus[L1,...,Lm]  berger_sphere[eps]  heisenberg_nil[eps]
//   fubini_study_cp2  product:<A>,<B>  scaled:<A>(c)
// For a bare "scaled:<A>" the scale factor comes from params.
ManifoldPtr catalog_get(const std::string& name, const std::vector<double>& params = {});

ManifoldPtr make_product(ManifoldPtr a, ManifoldPtr b);
ManifoldPtr make_scaled(ManifoldPtr base, double c);

// Throws ConfigurationError or ValidationError when the entry is malformed.
void validate_spec(const ManifoldSpec& spec);

// Finite-difference steps for the fallback path. The second-derivative stencil
// uses a larger step, see metric_derivatives.
double fd_first_step(double coordinate);
double fd_second_step(double coordinate);

// g, dg, d2g at x: exact when the chart supplies closed forms, otherwise
// Richardson-extrapolated central differences.
MetricJet metric_derivatives(const ChartSpec& chart, std::span<const double> x);
MetricJet finite_difference_jet(const ChartSpec& chart, std::span<const double> x);

// Same chart with the closed-form derivatives stripped (forces the FD path).
ChartSpec without_closed_forms(ChartSpec chart);

// The descriptors every catalog-wide property check iterates over.
const std::vector<std::string>& standard_catalog();

}  // namespace curvlab
