#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace curvlab {

// Strictly increasing k-subset of {0, ..., m-1}; names a basis element
// e_{i_1} ^ ... ^ e_{i_k} of the k-th exterior power.
struct MultiIndex {
    int m = 0;
    std::vector<int> indices;

    int degree() const { return static_cast<int>(indices.size()); }
    bool valid() const;
    bool operator==(const MultiIndex&) const = default;
};

std::size_t binomial(int n, int k);

// All C(m,k) increasing k-subsets in lexicographic order.
std::vector<MultiIndex> enumerate_basis(int m, int k);

// Position of idx within enumerate_basis(idx.m, idx.degree()).
std::size_t wedge_rank(const MultiIndex& idx);

struct Substitution {
    int sign = 0;                       // +1, -1, or 0 when an index repeats
    std::optional<MultiIndex> result;   // sorted index, empty when sign == 0
};

// Put frame index j into position `slot` of idx and re-sort, tracking the
// sign of the sorting permutation.
Substitution interior_substitute(const MultiIndex& idx, int slot, int j);

// Precomputed lexicographic basis of Lambda^k R^m with a substitution table,
// for the inner loops of the Weitzenbock term. Immutable after construction.
class FormBasis {
public:
    FormBasis(int m, int k);

    int dim() const { return m_; }
    int degree() const { return k_; }
    std::size_t size() const { return basis_.size(); }
    const MultiIndex& operator[](std::size_t r) const { return basis_[r]; }
    const std::vector<MultiIndex>& elements() const { return basis_; }

    struct Entry {
        int sign;
        std::size_t rank;
    };
    // Substitution of j into `slot` of basis element `row`, by rank.
    Entry substitute(std::size_t row, int slot, int j) const {
        return table_[(row * static_cast<std::size_t>(k_) + slot) * m_ + j];
    }

private:
    int m_;
    int k_;
    std::vector<MultiIndex> basis_;
    std::vector<Entry> table_;
};

}  // namespace curvlab
