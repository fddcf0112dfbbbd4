#pragma once

#include <cstddef>
#include <vector>

#include "curvlab/metric_catalog.hpp"

namespace curvlab {

struct GaussLegendreRule {
    std::vector<double> nodes;    // on (-1, 1), ascending
    std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int n);

struct QuadratureNode {
    std::vector<double> point;  // chart point accepted by curvature_at
    double weight = 0;          // includes sqrt(det g) and any parametrization Jacobian
};

// Tensor-product Gauss-Legendre grid with `order` nodes per axis on every
// chart factor; a homogeneous factor contributes one node weighted by its
// volume. Nodes are produced on demand.
class QuadratureGrid {
public:
    QuadratureGrid(ManifoldPtr spec, int order);

    std::size_t size() const { return size_; }
    int order() const { return order_; }
    QuadratureNode node(std::size_t i) const;
    std::vector<QuadratureNode> nodes() const;
    const ManifoldSpec& spec() const { return *spec_; }

private:
    struct Leaf {
        const ChartSpec* chart = nullptr;  // null for homogeneous leaves
        double volume = 0;
        int m = 0;
        std::size_t count = 1;
    };
    void collect(const ManifoldSpec& s);

    ManifoldPtr spec_;
    int order_;
    GaussLegendreRule rule_;
    std::vector<Leaf> leaves_;
    std::size_t size_ = 1;
};

}  // namespace curvlab
