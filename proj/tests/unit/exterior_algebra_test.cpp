#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "curvlab/errors.hpp"
#include "curvlab/exterior_algebra.hpp"

using namespace curvlab;

namespace {

// Sign of the permutation sorting v, by counting inversions; 0 on repeats.
int brute_sign(const std::vector<int>& v) {
    if (std::set<int>(v.begin(), v.end()).size() != v.size()) return 0;
    int inversions = 0;
    for (std::size_t a = 0; a < v.size(); ++a)
        for (std::size_t b = a + 1; b < v.size(); ++b)
            if (v[a] > v[b]) ++inversions;
    return inversions % 2 ? -1 : 1;
}

}  // namespace

TEST_CASE("binomial matches Pascal's triangle") {
    for (int n = 0; n <= 12; ++n) {
        CHECK(binomial(n, 0) == 1);
        CHECK(binomial(n, n) == 1);
        for (int k = 1; k < n; ++k) CHECK(binomial(n, k) == binomial(n - 1, k - 1) + binomial(n - 1, k));
    }
    CHECK(binomial(10, 4) == 210);
}

TEST_CASE("enumerate_basis size, order and rank inverse") {
    for (int m = 1; m <= 8; ++m)
        for (int k = 0; k <= m; ++k) {
            const auto basis = enumerate_basis(m, k);
            REQUIRE(basis.size() == binomial(m, k));
            for (std::size_t r = 0; r < basis.size(); ++r) {
                CHECK(basis[r].valid());
                CHECK(wedge_rank(basis[r]) == r);
                if (r > 0) CHECK(std::lexicographical_compare(basis[r - 1].indices.begin(), basis[r - 1].indices.end(),
                                                              basis[r].indices.begin(), basis[r].indices.end()));
            }
        }
}

TEST_CASE("enumerate_basis golden layout for m = 4, k = 2") {
    const auto b = enumerate_basis(4, 2);
    const std::vector<std::vector<int>> expected = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    REQUIRE(b.size() == expected.size());
    for (std::size_t r = 0; r < b.size(); ++r) CHECK(b[r].indices == expected[r]);
}

TEST_CASE("interior_substitute agrees with brute-force permutation signs for m <= 6") {
    for (int m = 1; m <= 6; ++m)
        for (int k = 1; k <= m; ++k)
            for (const auto& idx : enumerate_basis(m, k))
                for (int slot = 0; slot < k; ++slot)
                    for (int j = 0; j < m; ++j) {
                        std::vector<int> v = idx.indices;
                        v[static_cast<std::size_t>(slot)] = j;
                        const int expected = brute_sign(v);
                        const Substitution s = interior_substitute(idx, slot, j);
                        REQUIRE(s.sign == expected);
                        if (expected == 0) {
                            CHECK_FALSE(s.result.has_value());
                            continue;
                        }
                        REQUIRE(s.result.has_value());
                        std::sort(v.begin(), v.end());
                        CHECK(s.result->indices == v);
                        CHECK(s.result->m == m);
                    }
}

TEST_CASE("FormBasis table matches interior_substitute") {
    for (int m = 2; m <= 6; ++m)
        for (int k = 1; k < m; ++k) {
            const FormBasis fb(m, k);
            REQUIRE(fb.size() == binomial(m, k));
            for (std::size_t row = 0; row < fb.size(); ++row)
                for (int slot = 0; slot < k; ++slot)
                    for (int j = 0; j < m; ++j) {
                        const Substitution s = interior_substitute(fb[row], slot, j);
                        const auto e = fb.substitute(row, slot, j);
                        CHECK(e.sign == s.sign);
                        if (s.sign != 0) CHECK(e.rank == wedge_rank(*s.result));
                    }
        }
}

TEST_CASE("invalid multi-indices are rejected") {
    CHECK_FALSE(MultiIndex{4, {1, 1}}.valid());
    CHECK_FALSE(MultiIndex{4, {2, 1}}.valid());
    CHECK_FALSE(MultiIndex{3, {0, 3}}.valid());
    CHECK(MultiIndex{3, {}}.valid());
    CHECK_THROWS_AS(wedge_rank(MultiIndex{4, {2, 1}}), DomainError);
    CHECK_THROWS_AS(interior_substitute(MultiIndex{4, {0, 1}}, 2, 0), DomainError);
}
