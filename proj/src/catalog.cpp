// Catalog entries and the descriptor grammar used by configs and the CLI.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>

#include "curvlab/errors.hpp"
#include "curvlab/metric_catalog.hpp"
#include "hyperdual.hpp"

namespace curvlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Wraps a metric written once as a template over the scalar type. `f(x, g)`
// fills the m*m row-major array g (pre-zeroed); the jet comes from hyper-dual
// evaluation, so derivatives are exact up to rounding.
template <class S, class F>
FlatJet<S> hyperdual_jet(int m, const F& f, std::span<const double> x) {
    using H = detail::HyperDualT<S>;
    const std::size_t mm = static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
    FlatJet<S> jet;
    jet.m = m;
    jet.g.assign(mm, S(0));
    jet.dg.assign(mm * static_cast<std::size_t>(m), S(0));
    jet.d2g.assign(mm * mm, S(0));
    std::vector<H> xs(static_cast<std::size_t>(m));
    std::vector<H> out(mm);
    for (int p = 0; p < m; ++p) {
        for (int q = p; q < m; ++q) {
            for (int i = 0; i < m; ++i) xs[static_cast<std::size_t>(i)] = H(S(x[static_cast<std::size_t>(i)]));
            xs[static_cast<std::size_t>(p)].a = S(1);
            xs[static_cast<std::size_t>(q)].b = S(1);
            std::fill(out.begin(), out.end(), H(S(0)));
            f(xs.data(), out.data());
            const std::size_t pq = (static_cast<std::size_t>(p) * m + q) * mm;
            const std::size_t qp = (static_cast<std::size_t>(q) * m + p) * mm;
            for (std::size_t ij = 0; ij < mm; ++ij) {
                const H& v = out[ij];
                jet.d2g[pq + ij] = v.ab;
                jet.d2g[qp + ij] = v.ab;
                if (p == q) {
                    jet.dg[static_cast<std::size_t>(p) * mm + ij] = v.a;
                    jet.g[ij] = v.v;
                }
            }
        }
    }
    return jet;
}

template <class S>
FlatJet<S> scale_jet(FlatJet<S> j, double c2) {
    for (auto* v : {&j.g, &j.dg, &j.d2g})
        for (S& e : *v) e *= S(c2);
    return j;
}

template <class S>
FlatJet<S> block_jet(const FlatJet<S>& A, const FlatJet<S>& B) {
    const int ma = A.m, mb = B.m, m = ma + mb;
    const auto u = [](int v) { return static_cast<std::size_t>(v); };
    FlatJet<S> j;
    j.m = m;
    j.g.assign(u(m * m), S(0));
    j.dg.assign(u(m * m * m), S(0));
    j.d2g.assign(u(m * m * m * m), S(0));
    auto place = [&](const FlatJet<S>& F, int off) {
        const int mf = F.m;
        for (int i = 0; i < mf; ++i)
            for (int k = 0; k < mf; ++k) {
                const int gi = off + i, gk = off + k;
                j.g[u(gi * m + gk)] = F.g[u(i * mf + k)];
                for (int p = 0; p < mf; ++p) {
                    j.dg[u(((off + p) * m + gi) * m + gk)] = F.dg[u((p * mf + i) * mf + k)];
                    for (int q = 0; q < mf; ++q)
                        j.d2g[u((((off + p) * m + off + q) * m + gi) * m + gk)] =
                            F.d2g[u(((p * mf + q) * mf + i) * mf + k)];
                }
            }
    };
    place(A, 0);
    place(B, ma);
    return j;
}

MetricJet to_metric_jet(const FlatJet<double>& f) {
    const int m = f.m;
    const std::size_t mm = static_cast<std::size_t>(m * m);
    MetricJet jet;
    jet.m = m;
    jet.g = Eigen::Map<const Eigen::MatrixXd>(f.g.data(), m, m).transpose();
    jet.dg.reserve(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a)
        jet.dg.emplace_back(Eigen::Map<const Eigen::MatrixXd>(f.dg.data() + a * mm, m, m).transpose());
    jet.d2g.reserve(mm);
    for (std::size_t ab = 0; ab < mm; ++ab)
        jet.d2g.emplace_back(Eigen::Map<const Eigen::MatrixXd>(f.d2g.data() + ab * mm, m, m).transpose());
    return jet;
}

// Wraps a metric written once as a template over the scalar type. `f(x, g)`
// fills the m*m row-major array g (pre-zeroed); the jets come from hyper-dual
// evaluation, so derivatives are exact up to rounding.
template <class F>
void attach_generic_metric(ChartSpec& chart, F f) {
    const int m = chart.m;
    chart.g = [m, f](std::span<const double> x) {
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
        std::vector<double> out(static_cast<std::size_t>(m * m), 0.0);
        f(x.data(), out.data());
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) g(i, j) = out[static_cast<std::size_t>(i * m + j)];
        return g;
    };
    chart.jet = [m, f](std::span<const double> x) { return to_metric_jet(hyperdual_jet<double>(m, f, x)); };
    chart.flat_jets.flat = [m, f](std::span<const double> x) { return hyperdual_jet<double>(m, f, x); };
    chart.flat_jets.extended = [m, f](std::span<const double> x) { return hyperdual_jet<long double>(m, f, x); };
    chart.flat_jets.quad = [m, f](std::span<const double> x) { return hyperdual_jet<__float128>(m, f, x); };
}

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_params(const std::vector<double>& params) {
    std::string s = "[";
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) s += ",";
        s += format_number(params[i]);
    }
    return s + "]";
}

double sphere_volume(int m, double r) {
    return 2.0 * std::pow(kPi, 0.5 * (m + 1)) / std::tgamma(0.5 * (m + 1)) * std::pow(r, m);
}

ManifoldPtr make_sphere(const std::vector<double>& params) {
    if (params.size() != 2) throw ConfigurationError("sphere expects [m, r]");
    const double md = params[0];
    const double r = params[1];
    if (md != std::floor(md) || md < 2 || md > 8) throw ConfigurationError("sphere: m must be an integer in [2, 8]");
    if (!(r > 0.0)) throw ConfigurationError("sphere: radius must be positive");
    const int m = static_cast<int>(md);

    ChartSpec chart;
    chart.m = m;
    // (theta_1, ..., theta_{m-1}, phi) on the open box; its complement has measure zero
    for (int a = 0; a < m; ++a) {
        chart.domain.lo.push_back(0.0);
        chart.domain.hi.push_back(a + 1 < m ? kPi : 2.0 * kPi);
    }
    chart.quad_box = chart.domain;
    chart.covers_full_measure = true;
    const double r2 = r * r;
    attach_generic_metric(chart, [m, r2](const auto* x, auto* g) {
        using T = std::remove_cvref_t<decltype(x[0])>;
        using std::sin;
        using detail::sin;
        T prod = T(r2);
        g[0] = prod;
        for (int a = 1; a < m; ++a) {
            T s = sin(x[a - 1]);
            prod = prod * s * s;
            g[a * m + a] = prod;
        }
    });

    auto spec = std::make_shared<ManifoldSpec>();
    spec->name = "sphere" + format_params(params);
    spec->geometry = std::move(chart);
    spec->euler_char = (m % 2 == 0) ? 2 : 0;
    spec->diameter = Diameter{kPi * r, DiameterKind::exact};
    spec->volume = sphere_volume(m, r);
    spec->infinite_fundamental_group = false;
    return spec;
}

ManifoldPtr make_flat_torus(const std::vector<double>& params) {
    if (params.empty() || params.size() > 8) throw ConfigurationError("flat_torus expects 1..8 side lengths");
    double vol = 1.0, d2 = 0.0;
    for (double l : params) {
        if (!(l > 0.0)) throw ConfigurationError("flat_torus: side lengths must be positive");
        vol *= l;
        d2 += l * l;
    }
    const int m = static_cast<int>(params.size());
    ChartSpec chart;
    chart.m = m;
    chart.domain.lo.assign(static_cast<std::size_t>(m), 0.0);
    chart.domain.hi = params;
    chart.quad_box = chart.domain;
    chart.covers_full_measure = true;
    attach_generic_metric(chart, [m](const auto* x, auto* g) {
        (void)x;
        for (int a = 0; a < m; ++a) g[a * m + a] = 1.0;
    });

    auto spec = std::make_shared<ManifoldSpec>();
    spec->name = "flat_torus" + format_params(params);
    spec->geometry = std::move(chart);
    spec->euler_char = 0;
    spec->diameter = Diameter{0.5 * std::sqrt(d2), DiameterKind::exact};
    spec->volume = vol;
    spec->infinite_fundamental_group = true;
    return spec;
}

ManifoldPtr make_berger(const std::vector<double>& params) {
    if (params.size() != 1) throw ConfigurationError("berger_sphere expects [eps]");
    const double eps = params[0];
    if (!(eps > 0.0)) throw ConfigurationError("berger_sphere: eps must be positive");
    // su(2) frame X_i with [X_i, X_j] = 2 X_k gives the unit round S^3; the
    // fiber is shortened by taking e_2 = X_2 / eps.
    HomogeneousSpec h;
    h.m = 3;
    h.c.assign(27, 0.0);
    auto set = [&](int i, int j, int k, double v) {
        h(i, j, k) = v;
        h(j, i, k) = -v;
    };
    set(0, 1, 2, 2.0 * eps);
    set(1, 2, 0, 2.0 / eps);
    set(2, 0, 1, 2.0 / eps);

    auto spec = std::make_shared<ManifoldSpec>();
    spec->name = "berger_sphere" + format_params(params);
    spec->geometry = std::move(h);
    spec->euler_char = 0;
    // g_eps <= max(1, eps^2) g_round, so pi * max(1, eps) bounds the diameter
    spec->diameter = Diameter{kPi * std::max(1.0, eps), eps == 1.0 ? DiameterKind::exact : DiameterKind::upper_bound};
    spec->volume = 2.0 * kPi * kPi * eps;
    spec->infinite_fundamental_group = false;
    return spec;
}

// Distance-from-identity bound 7/4 on the integer-lattice quotient at eps = 1,
// doubled for the diameter. Metrics with eps <= 1 are dominated by eps = 1.
constexpr double kHeisenbergDiameterBound = 3.5;

ManifoldPtr make_heisenberg(const std::vector<double>& params) {
    if (params.size() != 1) throw ConfigurationError("heisenberg_nil expects [eps]");
    const double eps = params[0];
    if (!(eps > 0.0)) throw ConfigurationError("heisenberg_nil: eps must be positive");
    HomogeneousSpec h;
    h.m = 3;
    h.c.assign(27, 0.0);
    h(0, 1, 2) = eps;
    h(1, 0, 2) = -eps;

    auto spec = std::make_shared<ManifoldSpec>();
    spec->name = "heisenberg_nil" + format_params(params);
    spec->geometry = std::move(h);
    spec->euler_char = 0;
    spec->diameter = Diameter{kHeisenbergDiameterBound * std::max(1.0, eps), DiameterKind::upper_bound};
    spec->volume = eps;
    spec->infinite_fundamental_group = true;
    return spec;
}

void fill_fubini_study_metadata(ManifoldSpec& spec) {
    spec.euler_char = 3;
    spec.diameter = Diameter{0.5 * kPi, DiameterKind::exact};
    spec.volume = 0.5 * kPi * kPi;
    spec.infinite_fundamental_group = false;
}

// Affine chart z = (x0 + i x1, x2 + i x3) with holomorphic sectional curvature 4:
//   g(u, v) = Re[ <u, v> / w - (zbar . u)(z . vbar) / w^2 ],  w = 1 + |z|^2.
// Well conditioned only for moderate |z|; the integration chart below is the
// same metric pulled back through r = tan(rho).
ManifoldPtr make_fubini_study_affine(const std::vector<double>& params) {
    if (!params.empty()) throw ConfigurationError("fubini_study_affine takes no parameters");
    ChartSpec chart;
    chart.m = 4;
    chart.domain.lo.assign(4, -kInf);
    chart.domain.hi.assign(4, kInf);
    chart.covers_full_measure = true;
    attach_generic_metric(chart, [](const auto* x, auto* g) {
        using T = std::remove_cvref_t<decltype(x[0])>;
        const T w = T(1.0) + x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
        const T winv = T(1.0) / w;
        const T winv2 = winv * winv;
        // zbar . e_p for the real basis e_p
        const T re[4] = {x[0], x[1], x[2], x[3]};
        const T im[4] = {-x[1], x[0], -x[3], x[2]};
        for (int p = 0; p < 4; ++p)
            for (int q = p; q < 4; ++q) {
                T v = T(0.0) - (re[p] * re[q] + im[p] * im[q]) * winv2;
                if (p == q) v = v + winv;
                g[p * 4 + q] = v;
                g[q * 4 + p] = v;
            }
    });
    chart.quad_box.lo = {0.0, 0.0, 0.0, 0.0};
    chart.quad_box.hi = {0.5 * kPi, 2.0 * kPi, 0.5 * kPi, 2.0 * kPi};
    chart.param = [](std::span<const double> u, std::span<double> x) {
        const double r1 = std::tan(u[0]), r2 = std::tan(u[2]);
        x[0] = r1 * std::cos(u[1]);
        x[1] = r1 * std::sin(u[1]);
        x[2] = r2 * std::cos(u[3]);
        x[3] = r2 * std::sin(u[3]);
        return r1 * (1.0 + r1 * r1) * r2 * (1.0 + r2 * r2);
    };
    auto spec = std::make_shared<ManifoldSpec>();
    spec->name = "fubini_study_affine";
    spec->geometry = std::move(chart);
    fill_fubini_study_metadata(*spec);
    return spec;
}

// z_a = tan(rho_a) e^{i phi_a}, coordinates (rho_1, phi_1, rho_2, phi_2) on
// (0, pi/2) x (0, 2 pi) x (0, pi/2) x (0, 2 pi). With c_a = cos, s_a = sin and
// D = c_2^2 + c_1^2 s_2^2 the pulled-back affine metric is
//   g_rr = diag(c_2^2, c_1^2) / D^2,  g_r1r2 = -s_1 s_2 c_1 c_2 / D^2,
//   g_pp = c_1^2 c_2^2 diag(s_1^2, s_2^2) / D^2,  g_p1p2 = -s_1^2 s_2^2 c_1^2 c_2^2 / D^2.
ManifoldPtr make_fubini_study(const std::vector<double>& params) {
    if (!params.empty()) throw ConfigurationError("fubini_study_cp2 takes no parameters");
    ChartSpec chart;
    chart.m = 4;
    chart.domain.lo = {0.0, 0.0, 0.0, 0.0};
    chart.domain.hi = {0.5 * kPi, 2.0 * kPi, 0.5 * kPi, 2.0 * kPi};
    chart.quad_box = chart.domain;
    chart.covers_full_measure = true;
    attach_generic_metric(chart, [](const auto* x, auto* g) {
        using T = std::remove_cvref_t<decltype(x[0])>;
        using std::cos;
        using std::sin;
        using detail::cos;
        using detail::sin;
        const T c1 = cos(x[0]), s1 = sin(x[0]);
        const T c2 = cos(x[2]), s2 = sin(x[2]);
        const T c1s = c1 * c1, c2s = c2 * c2, s1s = s1 * s1, s2s = s2 * s2;
        const T dd = c2s + c1s * s2s;
        const T inv = T(1.0) / (dd * dd);
        const T cc = c1s * c2s;
        g[0 * 4 + 0] = c2s * inv;
        g[2 * 4 + 2] = c1s * inv;
        g[0 * 4 + 2] = g[2 * 4 + 0] = T(0.0) - s1 * s2 * c1 * c2 * inv;
        g[1 * 4 + 1] = cc * s1s * inv;
        g[3 * 4 + 3] = cc * s2s * inv;
        g[1 * 4 + 3] = g[3 * 4 + 1] = T(0.0) - s1s * s2s * cc * inv;
    });
    auto spec = std::make_shared<ManifoldSpec>();
    spec->name = "fubini_study_cp2";
    spec->geometry = std::move(chart);
    fill_fubini_study_metadata(*spec);
    return spec;
}

// ---- chart combinators ----

ChartSpec scaled_chart(const ChartSpec& base, double c) {
    ChartSpec out = base;
    const double c2 = c * c;
    out.g = [g = base.g, c2](std::span<const double> x) { return Eigen::MatrixXd(c2 * g(x)); };
    if (base.jet) {
        out.jet = [jet = base.jet, c2](std::span<const double> x) {
            MetricJet j = jet(x);
            j.g *= c2;
            for (auto& d : j.dg) d *= c2;
            for (auto& d : j.d2g) d *= c2;
            return j;
        };
    }
    if (base.flat_jets.flat)
        out.flat_jets.flat = [f = base.flat_jets.flat, c2](std::span<const double> x) { return scale_jet(f(x), c2); };
    if (base.flat_jets.extended)
        out.flat_jets.extended = [f = base.flat_jets.extended, c2](std::span<const double> x) { return scale_jet(f(x), c2); };
    if (base.flat_jets.quad)
        out.flat_jets.quad = [f = base.flat_jets.quad, c2](std::span<const double> x) { return scale_jet(f(x), c2); };
    return out;
}

std::shared_ptr<const ChartSpec> as_chart(const ManifoldSpec& s) {
    if (const auto* c = s.chart()) return std::make_shared<const ChartSpec>(*c);
    if (const auto* p = s.product()) return p->combined;
    return nullptr;
}

std::shared_ptr<const ChartSpec> product_chart(const ChartSpec& a, const ChartSpec& b) {
    auto out = std::make_shared<ChartSpec>();
    const int ma = a.m, mb = b.m, m = ma + mb;
    out->m = m;
    auto concat = [](const std::vector<double>& u, const std::vector<double>& v) {
        std::vector<double> w = u;
        w.insert(w.end(), v.begin(), v.end());
        return w;
    };
    out->domain = Box{concat(a.domain.lo, b.domain.lo), concat(a.domain.hi, b.domain.hi)};
    out->quad_box = Box{concat(a.quad_box.lo, b.quad_box.lo), concat(a.quad_box.hi, b.quad_box.hi)};
    out->covers_full_measure = a.covers_full_measure && b.covers_full_measure;
    out->g = [ga = a.g, gb = b.g, ma, mb, m](std::span<const double> x) {
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
        g.topLeftCorner(ma, ma) = ga(x.subspan(0, static_cast<std::size_t>(ma)));
        g.bottomRightCorner(mb, mb) = gb(x.subspan(static_cast<std::size_t>(ma)));
        return g;
    };
    if (a.jet && b.jet) {
        out->jet = [ja = a.jet, jb = b.jet, ma, mb, m](std::span<const double> x) {
            const MetricJet A = ja(x.subspan(0, static_cast<std::size_t>(ma)));
            const MetricJet B = jb(x.subspan(static_cast<std::size_t>(ma)));
            MetricJet j;
            j.m = m;
            j.g = Eigen::MatrixXd::Zero(m, m);
            j.g.topLeftCorner(ma, ma) = A.g;
            j.g.bottomRightCorner(mb, mb) = B.g;
            j.dg.assign(static_cast<std::size_t>(m), Eigen::MatrixXd::Zero(m, m));
            j.d2g.assign(static_cast<std::size_t>(m * m), Eigen::MatrixXd::Zero(m, m));
            for (int p = 0; p < ma; ++p) {
                j.dg[static_cast<std::size_t>(p)].topLeftCorner(ma, ma) = A.dg[static_cast<std::size_t>(p)];
                for (int q = 0; q < ma; ++q)
                    j.d2g[static_cast<std::size_t>(p * m + q)].topLeftCorner(ma, ma) = A.second(p, q);
            }
            for (int p = 0; p < mb; ++p) {
                j.dg[static_cast<std::size_t>(ma + p)].bottomRightCorner(mb, mb) = B.dg[static_cast<std::size_t>(p)];
                for (int q = 0; q < mb; ++q)
                    j.d2g[static_cast<std::size_t>((ma + p) * m + ma + q)].bottomRightCorner(mb, mb) = B.second(p, q);
            }
            return j;
        };
    }
    const auto split = [ma](std::span<const double> x) {
        return std::pair{x.subspan(0, static_cast<std::size_t>(ma)), x.subspan(static_cast<std::size_t>(ma))};
    };
    if (a.flat_jets.flat && b.flat_jets.flat)
        out->flat_jets.flat = [fa = a.flat_jets.flat, fb = b.flat_jets.flat, split](std::span<const double> x) {
            const auto [xa, xb] = split(x);
            return block_jet(fa(xa), fb(xb));
        };
    if (a.flat_jets.extended && b.flat_jets.extended)
        out->flat_jets.extended = [fa = a.flat_jets.extended, fb = b.flat_jets.extended, split](std::span<const double> x) {
            const auto [xa, xb] = split(x);
            return block_jet(fa(xa), fb(xb));
        };
    if (a.flat_jets.quad && b.flat_jets.quad)
        out->flat_jets.quad = [fa = a.flat_jets.quad, fb = b.flat_jets.quad, split](std::span<const double> x) {
            const auto [xa, xb] = split(x);
            return block_jet(fa(xa), fb(xb));
        };
    if (a.param || b.param) {
        out->param = [a, b, ma](std::span<const double> u, std::span<double> x) {
            double ja = 1.0, jb = 1.0;
            const auto xa = a.to_chart(u.subspan(0, static_cast<std::size_t>(ma)), &ja);
            const auto xb = b.to_chart(u.subspan(static_cast<std::size_t>(ma)), &jb);
            std::copy(xa.begin(), xa.end(), x.begin());
            std::copy(xb.begin(), xb.end(), x.begin() + ma);
            return ja * jb;
        };
    }
    return out;
}

// ---- descriptor parsing ----

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view s) {
    s = trim(s);
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigurationError("cannot parse number '" + std::string(s) + "'");
    return v;
}

std::vector<double> parse_number_list(std::string_view s) {
    std::vector<double> out;
    s = trim(s);
    if (s.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = s.find(',', start);
        out.push_back(parse_number(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

// First comma at bracket depth zero.
std::size_t top_level_comma(std::string_view s) {
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char ch = s[i];
        if (ch == '[' || ch == '(' || ch == '{') ++depth;
        else if (ch == ']' || ch == ')' || ch == '}') --depth;
        else if (ch == ',' && depth == 0) return i;
    }
    return std::string_view::npos;
}

std::string_view strip_braces(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '{' && s.back() == '}') return trim(s.substr(1, s.size() - 2));
    return s;
}

ManifoldPtr parse_descriptor(std::string_view desc, const std::vector<double>& params);

ManifoldPtr make_base(std::string_view name, const std::vector<double>& params) {
    if (name == "sphere") return make_sphere(params);
    if (name == "flat_torus") return make_flat_torus(params);
    if (name == "berger_sphere") return make_berger(params);
    if (name == "heisenberg_nil") return make_heisenberg(params);
    if (name == "fubini_study_cp2") return make_fubini_study(params);
    if (name == "fubini_study_affine") return make_fubini_study_affine(params);
    throw ConfigurationError("unknown catalog entry '" + std::string(name) + "'");
}

ManifoldPtr parse_descriptor(std::string_view desc, const std::vector<double>& params) {
    desc = strip_braces(desc);
    constexpr std::string_view kProduct = "product:";
    constexpr std::string_view kScaled = "scaled:";
    if (desc.starts_with(kProduct)) {
        if (!params.empty()) throw ConfigurationError("product descriptors carry their own parameters");
        std::string_view rest = desc.substr(kProduct.size());
        const std::size_t comma = top_level_comma(rest);
        if (comma == std::string_view::npos) throw ConfigurationError("product needs two factors: product:<A>,<B>");
        return make_product(parse_descriptor(rest.substr(0, comma), {}), parse_descriptor(rest.substr(comma + 1), {}));
    }
    if (desc.starts_with(kScaled)) {
        std::string_view rest = trim(desc.substr(kScaled.size()));
        if (!rest.empty() && rest.back() == ')') {
            int depth = 0;
            std::size_t open = std::string_view::npos;
            for (std::size_t i = rest.size(); i-- > 0;) {
                if (rest[i] == ')') ++depth;
                else if (rest[i] == '(' && --depth == 0) {
                    open = i;
                    break;
                }
            }
            if (open == std::string_view::npos) throw ConfigurationError("unbalanced parentheses in scaled descriptor");
            if (!params.empty()) throw ConfigurationError("scale factor given twice");
            const double c = parse_number(rest.substr(open + 1, rest.size() - open - 2));
            return make_scaled(parse_descriptor(rest.substr(0, open), {}), c);
        }
        if (params.size() != 1) throw ConfigurationError("scaled:<A> expects a single scale factor");
        return make_scaled(parse_descriptor(rest, {}), params[0]);
    }
    const std::size_t open = desc.find('[');
    if (open != std::string_view::npos) {
        if (desc.back() != ']') throw ConfigurationError("malformed parameter list in '" + std::string(desc) + "'");
        if (!params.empty()) throw ConfigurationError("parameters given twice for '" + std::string(desc) + "'");
        return make_base(trim(desc.substr(0, open)), parse_number_list(desc.substr(open + 1, desc.size() - open - 2)));
    }
    return make_base(desc, params);
}

std::string wrap_if_compound(const std::string& name) {
    return name.find(',') != std::string::npos && name.starts_with("product:") ? "{" + name + "}" : name;
}

}  // namespace

ManifoldPtr make_scaled(ManifoldPtr base, double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigurationError("scale factor must be positive and finite");
    auto spec = std::make_shared<ManifoldSpec>(*base);
    spec->name = "scaled:" + base->name + "(" + format_number(c) + ")";
    if (const auto* ch = base->chart()) {
        spec->geometry = scaled_chart(*ch, c);
    } else if (const auto* h = base->homogeneous()) {
        // orthonormal frame of c^2 g is e_i / c, so brackets shrink by 1/c
        HomogeneousSpec s = *h;
        for (double& v : s.c) v /= c;
        spec->geometry = std::move(s);
    } else {
        const auto* p = base->product();
        auto rebuilt = make_product(make_scaled(p->first, c), make_scaled(p->second, c));
        spec->geometry = rebuilt->geometry;
    }
    if (base->diameter) spec->diameter = Diameter{base->diameter->value * c, base->diameter->kind};
    if (base->volume) spec->volume = *base->volume * std::pow(c, base->dimension());
    validate_spec(*spec);
    return spec;
}

ManifoldPtr make_product(ManifoldPtr a, ManifoldPtr b) {
    if (!a || !b) throw ConfigurationError("product factor missing");
    auto spec = std::make_shared<ManifoldSpec>();
    spec->name = "product:" + wrap_if_compound(a->name) + "," + wrap_if_compound(b->name);
    ProductGeometry geo{a, b, nullptr};
    auto ca = as_chart(*a);
    auto cb = as_chart(*b);
    if (ca && cb) geo.combined = product_chart(*ca, *cb);
    spec->geometry = std::move(geo);
    if (a->euler_char && b->euler_char) spec->euler_char = *a->euler_char * *b->euler_char;
    if (a->diameter && b->diameter) {
        const bool exact = a->diameter->kind == DiameterKind::exact && b->diameter->kind == DiameterKind::exact;
        spec->diameter = Diameter{std::hypot(a->diameter->value, b->diameter->value),
                                  exact ? DiameterKind::exact : DiameterKind::upper_bound};
    }
    if (a->volume && b->volume) spec->volume = *a->volume * *b->volume;
    const auto& pa = a->infinite_fundamental_group;
    const auto& pb = b->infinite_fundamental_group;
    if ((pa && *pa) || (pb && *pb)) spec->infinite_fundamental_group = true;
    else if (pa && pb) spec->infinite_fundamental_group = false;
    validate_spec(*spec);
    return spec;
}

ManifoldPtr catalog_get(const std::string& name, const std::vector<double>& params) {
    ManifoldPtr spec = parse_descriptor(name, params);
    validate_spec(*spec);
    return spec;
}

const std::vector<std::string>& standard_catalog() {
    static const std::vector<std::string> entries = {
        "sphere[2,1]",
        "sphere[3,1]",
        "sphere[4,1]",
        "sphere[2,0.5]",
        "flat_torus[1,1]",
        "flat_torus[1,1,1,1]",
        "flat_torus[1,2,3]",
        "berger_sphere[1]",
        "berger_sphere[0.5]",
        "berger_sphere[2]",
        "heisenberg_nil[1]",
        "heisenberg_nil[0.25]",
        "fubini_study_cp2",
        "product:sphere[2,1],sphere[2,1]",
        "product:sphere[2,1],flat_torus[1,1]",
        "product:berger_sphere[0.5],flat_torus[1]",
        "scaled:sphere[4,1](2)",
    };
    return entries;
}

}  // namespace curvlab
