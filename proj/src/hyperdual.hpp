#pragma once

#include <cmath>
#include <limits>
#include <type_traits>

#include <quadmath.h>

namespace curvlab::detail {

inline double scalar_sin(double x) { return std::sin(x); }
inline double scalar_cos(double x) { return std::cos(x); }
inline long double scalar_sin(long double x) { return std::sin(x); }
inline long double scalar_cos(long double x) { return std::cos(x); }
inline __float128 scalar_sin(__float128 x) { return sinq(x); }
inline __float128 scalar_cos(__float128 x) { return cosq(x); }
inline double scalar_sqrt(double x) { return std::sqrt(x); }
inline long double scalar_sqrt(long double x) { return std::sqrt(x); }
inline __float128 scalar_sqrt(__float128 x) { return sqrtq(x); }

template <class S>
constexpr double unit_roundoff() {
    if constexpr (std::is_same_v<S, __float128>) return 0x1p-112;  // binary128 machine epsilon
    else return static_cast<double>(std::numeric_limits<S>::epsilon());
}

// v + a e1 + b e2 + ab e1e2 with e1^2 = e2^2 = 0. Seeding e1 on x_p and e2 on
// x_q gives f, d_p f, d_q f and d_p d_q f exactly in one evaluation.
template <class S>
struct HyperDualT {
    S v = 0, a = 0, b = 0, ab = 0;

    HyperDualT() = default;
    HyperDualT(S x) : v(x) {}  // NOLINT(google-explicit-constructor)
    HyperDualT(S v_, S a_, S b_, S ab_) : v(v_), a(a_), b(b_), ab(ab_) {}
};

using HyperDual = HyperDualT<double>;

template <class S>
HyperDualT<S> operator+(const HyperDualT<S>& x, const HyperDualT<S>& y) {
    return {x.v + y.v, x.a + y.a, x.b + y.b, x.ab + y.ab};
}
template <class S>
HyperDualT<S> operator-(const HyperDualT<S>& x, const HyperDualT<S>& y) {
    return {x.v - y.v, x.a - y.a, x.b - y.b, x.ab - y.ab};
}
template <class S>
HyperDualT<S> operator-(const HyperDualT<S>& x) {
    return {-x.v, -x.a, -x.b, -x.ab};
}
template <class S>
HyperDualT<S> operator*(const HyperDualT<S>& x, const HyperDualT<S>& y) {
    return {x.v * y.v, x.v * y.a + x.a * y.v, x.v * y.b + x.b * y.v, x.v * y.ab + x.a * y.b + x.b * y.a + x.ab * y.v};
}

// f(x) with f', f'' given at x.v
template <class S>
HyperDualT<S> chain(const HyperDualT<S>& x, S f, S df, S d2f) {
    return {f, df * x.a, df * x.b, df * x.ab + d2f * x.a * x.b};
}

template <class S>
HyperDualT<S> operator/(const HyperDualT<S>& x, const HyperDualT<S>& y) {
    const S inv = S(1) / y.v;
    return x * chain(y, inv, -inv * inv, S(2) * inv * inv * inv);
}
template <class S>
HyperDualT<S>& operator+=(HyperDualT<S>& x, const HyperDualT<S>& y) {
    return x = x + y;
}
template <class S>
HyperDualT<S>& operator*=(HyperDualT<S>& x, const HyperDualT<S>& y) {
    return x = x * y;
}

template <class S>
HyperDualT<S> sin(const HyperDualT<S>& x) {
    const S s = scalar_sin(x.v), c = scalar_cos(x.v);
    return chain(x, s, c, -s);
}
template <class S>
HyperDualT<S> cos(const HyperDualT<S>& x) {
    const S s = scalar_sin(x.v), c = scalar_cos(x.v);
    return chain(x, c, -s, -c);
}

inline double value_of(double x) { return x; }
template <class S>
S value_of(const HyperDualT<S>& x) {
    return x.v;
}

}  // namespace curvlab::detail
