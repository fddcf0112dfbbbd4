#include "curvlab/exterior_algebra.hpp"

#include <algorithm>
#include <string>

#include "curvlab/errors.hpp"

namespace curvlab {

bool MultiIndex::valid() const {
    if (m < 0 || degree() > m) return false;
    for (std::size_t s = 0; s < indices.size(); ++s) {
        if (indices[s] < 0 || indices[s] >= m) return false;
        if (s > 0 && indices[s] <= indices[s - 1]) return false;
    }
    return true;
}

std::size_t binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::size_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
    return r;
}

std::vector<MultiIndex> enumerate_basis(int m, int k) {
    if (m < 0 || k < 0 || k > m)
        throw DomainError("enumerate_basis: need 0 <= k <= m, got m=" + std::to_string(m) +
                          " k=" + std::to_string(k));
    std::vector<MultiIndex> out;
    out.reserve(binomial(m, k));
    std::vector<int> cur(k);
    for (int s = 0; s < k; ++s) cur[s] = s;
    while (true) {
        out.push_back(MultiIndex{m, cur});
        int s = k - 1;
        while (s >= 0 && cur[s] == m - k + s) --s;
        if (s < 0) break;
        ++cur[s];
        for (int t = s + 1; t < k; ++t) cur[t] = cur[t - 1] + 1;
    }
    return out;
}

std::size_t wedge_rank(const MultiIndex& idx) {
    if (!idx.valid()) throw DomainError("wedge_rank: invalid multi-index");
    const int m = idx.m;
    const int k = idx.degree();
    std::size_t rank = 0;
    int prev = -1;
    for (int s = 0; s < k; ++s) {
        // count subsets that agree before slot s and hold a smaller value there
        for (int v = prev + 1; v < idx.indices[s]; ++v) rank += binomial(m - 1 - v, k - 1 - s);
        prev = idx.indices[s];
    }
    return rank;
}

Substitution interior_substitute(const MultiIndex& idx, int slot, int j) {
    if (!idx.valid()) throw DomainError("interior_substitute: invalid multi-index");
    if (slot < 0 || slot >= idx.degree()) throw DomainError("interior_substitute: slot out of range");
    if (j < 0 || j >= idx.m) throw DomainError("interior_substitute: frame index out of range");

    std::vector<int> v = idx.indices;
    v[slot] = j;
    for (std::size_t s = 0; s < v.size(); ++s)
        if (static_cast<int>(s) != slot && v[s] == j) return {};

    // The rest of v is sorted, so moving j into place costs one transposition
    // per neighbour it passes.
    int sign = 1;
    int pos = slot;
    while (pos > 0 && v[pos - 1] > v[pos]) {
        std::swap(v[pos - 1], v[pos]);
        --pos;
        sign = -sign;
    }
    while (pos + 1 < static_cast<int>(v.size()) && v[pos + 1] < v[pos]) {
        std::swap(v[pos + 1], v[pos]);
        ++pos;
        sign = -sign;
    }
    return {sign, MultiIndex{idx.m, std::move(v)}};
}

FormBasis::FormBasis(int m, int k) : m_(m), k_(k), basis_(enumerate_basis(m, k)) {
    table_.resize(basis_.size() * static_cast<std::size_t>(k) * static_cast<std::size_t>(m));
    for (std::size_t r = 0; r < basis_.size(); ++r)
        for (int s = 0; s < k; ++s)
            for (int j = 0; j < m; ++j) {
                Substitution sub = interior_substitute(basis_[r], s, j);
                Entry e{sub.sign, 0};
                if (sub.sign != 0) e.rank = wedge_rank(*sub.result);
                table_[(r * static_cast<std::size_t>(k) + s) * m + j] = e;
            }
}

}  // namespace curvlab
