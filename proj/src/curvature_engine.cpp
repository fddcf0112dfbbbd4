#include "curvlab/curvature_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <string>

#include "curvlab/errors.hpp"
#include "curvlab/exterior_algebra.hpp"
#include "hyperdual.hpp"

namespace curvlab {

double Riemann::norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

double SymmetryResiduals::worst() const { return std::max({antisym_first, antisym_second, pair, bianchi}); }

bool SymmetryResiduals::within(double rel_tol) const { return worst() <= rel_tol * norm + 1e-13; }

SymmetryResiduals symmetry_residuals(const Riemann& r) {
    SymmetryResiduals res;
    const int m = r.dim();
    res.norm = r.norm();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) {
                    const double v = r(i, j, k, l);
                    res.antisym_first = std::max(res.antisym_first, std::abs(v + r(j, i, k, l)));
                    res.antisym_second = std::max(res.antisym_second, std::abs(v + r(i, j, l, k)));
                    res.pair = std::max(res.pair, std::abs(v - r(k, l, i, j)));
                    res.bianchi = std::max(res.bianchi, std::abs(v + r(j, k, i, l) + r(k, i, j, l)));
                }
    return res;
}

namespace {

constexpr double kSymmetryTol = 1e-8;
// relative rounding estimate above which curvature is recomputed in a wider type
constexpr double kAccuracyTarget = 1e-9;

// Gamma_{d,ab} = 1/2 (d_a g_bd + d_b g_ad - d_d g_ab)
std::vector<double> lowered_christoffel(const MetricJet& jet) {
    const int m = jet.m;
    std::vector<double> low(static_cast<std::size_t>(m * m * m));
    for (int d = 0; d < m; ++d)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                low[static_cast<std::size_t>((d * m + a) * m + b)] =
                    0.5 * (jet.dg[static_cast<std::size_t>(a)](b, d) + jet.dg[static_cast<std::size_t>(b)](a, d) -
                           jet.dg[static_cast<std::size_t>(d)](a, b));
    return low;
}

Christoffel raise(const MetricJet& jet, const std::vector<double>& low) {
    const int m = jet.m;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(jet.g);
    if (ldlt.info() != Eigen::Success) throw NumericalError("christoffel: singular metric");
    const Eigen::MatrixXd ginv = ldlt.solve(Eigen::MatrixXd::Identity(m, m));
    Christoffel gam(m);
    for (int c = 0; c < m; ++c)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                double s = 0.0;
                for (int d = 0; d < m; ++d) s += ginv(c, d) * low[static_cast<std::size_t>((d * m + a) * m + b)];
                gam(c, a, b) = s;
            }
    return gam;
}

// R'(i,j,k,l) = sum E(a,i) E(b,j) E(c,k) E(d,l) R(a,b,c,d), one index at a time
Riemann transform(const Riemann& r, const Eigen::MatrixXd& e) {
    const int m = r.dim();
    const std::size_t n = static_cast<std::size_t>(m * m * m * m);
    std::vector<double> src(r.raw().begin(), r.raw().end());
    std::vector<double> dst(n);
    const std::size_t stride[4] = {static_cast<std::size_t>(m * m * m), static_cast<std::size_t>(m * m),
                                   static_cast<std::size_t>(m), 1};
    for (int slot = 0; slot < 4; ++slot) {
        const std::size_t st = stride[slot];
        for (std::size_t idx = 0; idx < n; ++idx) {
            const int this_index = static_cast<int>((idx / st) % static_cast<std::size_t>(m));
            const std::size_t base = idx - static_cast<std::size_t>(this_index) * st;
            double s = 0.0;
            for (int a = 0; a < m; ++a) s += e(a, this_index) * src[base + static_cast<std::size_t>(a) * st];
            dst[idx] = s;
        }
        std::swap(src, dst);
    }
    Riemann out(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l)
                    out(i, j, k, l) = src[static_cast<std::size_t>(((i * m + j) * m + k) * m + l)];
    return out;
}

void check_symmetries(const Riemann& r, const char* where) {
    const SymmetryResiduals res = symmetry_residuals(r);
    if (!res.within(kSymmetryTol))
    {
        std::ostringstream msg;
        msg << where << ": curvature symmetry residual " << std::scientific << res.worst()
            << " exceeds tolerance (|R| = " << res.norm << ")";
        throw ConsistencyError(msg.str());
    }
}

}  // namespace

Christoffel christoffel(const ChartSpec& chart, std::span<const double> x) {
    const MetricJet jet = metric_derivatives(chart, x);
    return raise(jet, lowered_christoffel(jet));
}

Riemann coordinate_riemann(const MetricJet& jet) {
    const int m = jet.m;
    const std::vector<double> low = lowered_christoffel(jet);
    const Christoffel gam = raise(jet, low);
    auto L = [&](int f, int a, int b) { return low[static_cast<std::size_t>((f * m + a) * m + b)]; };
    Riemann r(m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c)
                for (int d = 0; d < m; ++d) {
                    double v = 0.5 * (jet.second(b, c)(a, d) + jet.second(a, d)(b, c) - jet.second(b, d)(a, c) -
                                      jet.second(a, c)(b, d));
                    for (int f = 0; f < m; ++f) v += L(f, b, c) * gam(f, a, d) - L(f, b, d) * gam(f, a, c);
                    r(a, b, c, d) = v;
                }
    return r;
}

Riemann homogeneous_riemann(const HomogeneousSpec& h) {
    const int m = h.m;
    // Koszul: <nabla_{e_i} e_j, e_k> = 1/2 (c_ijk - c_jki + c_kij)
    std::vector<double> con(static_cast<std::size_t>(m * m * m));
    auto G = [&](int i, int j, int k) -> double& { return con[static_cast<std::size_t>((i * m + j) * m + k)]; };
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) G(i, j, k) = 0.5 * (h(i, j, k) - h(j, k, i) + h(k, i, j));
    Riemann r(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) {
                    double v = 0.0;
                    for (int p = 0; p < m; ++p) v += G(j, l, p) * G(i, p, k) - G(i, l, p) * G(j, p, k) - h(i, j, p) * G(p, l, k);
                    r(i, j, k, l) = v;
                }
    return r;
}

CurvaturePoint from_riemann(Riemann r, std::optional<Eigen::MatrixXd> frame) {
    CurvaturePoint cp;
    cp.m = r.dim();
    cp.frame = std::move(frame);
    cp.ricci = Eigen::MatrixXd::Zero(cp.m, cp.m);
    for (int i = 0; i < cp.m; ++i)
        for (int k = 0; k < cp.m; ++k) {
            double s = 0.0;
            for (int j = 0; j < cp.m; ++j) s += r(i, j, k, j);
            cp.ricci(i, k) = s;
        }
    cp.scalar = cp.ricci.trace();
    cp.riemann = std::move(r);
    return cp;
}

namespace {

template <class S>
S abs_of(S v) {
    return v < S(0) ? -v : v;
}

// Curvature in the Gram-Schmidt frame of the coordinate basis, computed in
// scalar type S, together with a first-order rounding estimate: eps_S times
// the largest sum of absolute terms carried through the frame change, times
// the Cholesky pivot growth.
struct FramedCurvature {
    Riemann riemann;
    Eigen::MatrixXd frame;
    double error_estimate = 0.0;
};

template <class S>
FramedCurvature framed_curvature(const FlatJet<S>& jet) {
    const int m = jet.m;
    const auto u = [](int v) { return static_cast<std::size_t>(v); };
    const auto G = [&](int i, int j) { return jet.g[u(i * m + j)]; };
    const auto dG = [&](int a, int i, int j) { return jet.dg[u((a * m + i) * m + j)]; };
    const auto d2G = [&](int a, int b, int i, int j) { return jet.d2g[u(((a * m + b) * m + i) * m + j)]; };

    // g = L L^T; the frame is E = L^{-T}, and g^{-1} = E E^T.
    // Rounding in g is amplified in the frame by the pivot growth g_jj / L_jj^2.
    std::vector<S> l(u(m * m), S(0));
    double pivot_growth = 1.0;
    for (int j = 0; j < m; ++j) {
        S d = G(j, j);
        for (int k = 0; k < j; ++k) d -= l[u(j * m + k)] * l[u(j * m + k)];
        if (!(d > S(0))) throw ValidationError("curvature_at: metric not positive definite");
        pivot_growth = std::max(pivot_growth, static_cast<double>(G(j, j) / d));
        const S root = detail::scalar_sqrt(d);
        l[u(j * m + j)] = root;
        for (int i = j + 1; i < m; ++i) {
            S v = G(i, j);
            for (int k = 0; k < j; ++k) v -= l[u(i * m + k)] * l[u(j * m + k)];
            l[u(i * m + j)] = v / root;
        }
    }
    // linv = L^{-1}, lower triangular; E(a, i) = linv(i, a)
    std::vector<S> linv(u(m * m), S(0));
    for (int c = 0; c < m; ++c) {
        linv[u(c * m + c)] = S(1) / l[u(c * m + c)];
        for (int i = c + 1; i < m; ++i) {
            S v = S(0);
            for (int k = c; k < i; ++k) v -= l[u(i * m + k)] * linv[u(k * m + c)];
            linv[u(i * m + c)] = v / l[u(i * m + i)];
        }
    }
    const auto E = [&](int a, int i) { return linv[u(i * m + a)]; };
    std::vector<S> ginv(u(m * m), S(0));
    for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d) {
            S v = S(0);
            for (int i = std::max(c, d); i < m; ++i) v += E(c, i) * E(d, i);
            ginv[u(c * m + d)] = v;
        }

    std::vector<S> low(u(m * m * m)), up(u(m * m * m));
    for (int f = 0; f < m; ++f)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                low[u((f * m + a) * m + b)] = S(0.5) * (dG(a, b, f) + dG(b, a, f) - dG(f, a, b));
    for (int c = 0; c < m; ++c)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                S v = S(0);
                for (int f = 0; f < m; ++f) v += ginv[u(c * m + f)] * low[u((f * m + a) * m + b)];
                up[u((c * m + a) * m + b)] = v;
            }

    // Coordinate components over pairs a < b, c < d; the remaining entries
    // follow from antisymmetry in each pair.
    std::vector<std::array<int, 2>> pairs;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) pairs.push_back({i, j});
    const int np = static_cast<int>(pairs.size());
    std::vector<S> r(u(np * np));
    std::vector<double> mag(u(np * np));
    for (int pa = 0; pa < np; ++pa)
        for (int pc = 0; pc < np; ++pc) {
            const auto [a, b] = pairs[u(pa)];
            const auto [c, d] = pairs[u(pc)];
            const S t[4] = {d2G(b, c, a, d), d2G(a, d, b, c), d2G(b, d, a, c), d2G(a, c, b, d)};
            S v = S(0.5) * (t[0] + t[1] - t[2] - t[3]);
            S w = S(0.5) * (abs_of(t[0]) + abs_of(t[1]) + abs_of(t[2]) + abs_of(t[3]));
            for (int f = 0; f < m; ++f) {
                const S p = low[u((f * m + b) * m + c)] * up[u((f * m + a) * m + d)];
                const S q = low[u((f * m + b) * m + d)] * up[u((f * m + a) * m + c)];
                v += p - q;
                w += abs_of(p) + abs_of(q);
            }
            r[u(pa * np + pc)] = v;
            mag[u(pa * np + pc)] = static_cast<double>(w);
        }

    // The frame acts on pairs through 2x2 minors: R' = W^T R W with
    // W((a,b),(i,j)) = E(a,i) E(b,j) - E(b,i) E(a,j).
    std::vector<S> wm(u(np * np));
    std::vector<double> wabs(u(np * np));
    for (int pa = 0; pa < np; ++pa)
        for (int pi = 0; pi < np; ++pi) {
            const auto [a, b] = pairs[u(pa)];
            const auto [i, j] = pairs[u(pi)];
            const S x = E(a, i) * E(b, j), y = E(b, i) * E(a, j);
            wm[u(pa * np + pi)] = x - y;
            wabs[u(pa * np + pi)] = static_cast<double>(abs_of(x) + abs_of(y));
        }
    std::vector<S> half(u(np * np), S(0));  // R W
    std::vector<double> half_mag(u(np * np), 0.0);
    for (int pa = 0; pa < np; ++pa)
        for (int pc = 0; pc < np; ++pc) {
            const S rv = r[u(pa * np + pc)];
            const double mv = mag[u(pa * np + pc)];
            for (int q = 0; q < np; ++q) {
                half[u(pa * np + q)] += rv * wm[u(pc * np + q)];
                half_mag[u(pa * np + q)] += mv * wabs[u(pc * np + q)];
            }
        }
    std::vector<S> full(u(np * np), S(0));
    std::vector<double> full_mag(u(np * np), 0.0);
    for (int pa = 0; pa < np; ++pa)
        for (int pi = 0; pi < np; ++pi) {
            const S wv = wm[u(pa * np + pi)];
            const double wa = wabs[u(pa * np + pi)];
            for (int q = 0; q < np; ++q) {
                full[u(pi * np + q)] += wv * half[u(pa * np + q)];
                full_mag[u(pi * np + q)] += wa * half_mag[u(pa * np + q)];
            }
        }

    FramedCurvature out{Riemann(m), Eigen::MatrixXd::Zero(m, m), 0.0};
    double worst = 0.0;
    for (int pi = 0; pi < np; ++pi)
        for (int pk = 0; pk < np; ++pk) {
            const auto [i, j] = pairs[u(pi)];
            const auto [k, l] = pairs[u(pk)];
            const double v = static_cast<double>(full[u(pi * np + pk)]);
            out.riemann(i, j, k, l) = v;
            out.riemann(j, i, k, l) = -v;
            out.riemann(i, j, l, k) = -v;
            out.riemann(j, i, l, k) = v;
            worst = std::max(worst, full_mag[u(pi * np + pk)]);
        }
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < m; ++i) out.frame(a, i) = static_cast<double>(E(a, i));
    out.error_estimate = detail::unit_roundoff<S>() * pivot_growth * worst;
    return out;
}

FlatJet<double> flatten(const MetricJet& jet) {
    const int m = jet.m;
    FlatJet<double> f;
    f.m = m;
    const std::size_t mm = static_cast<std::size_t>(m * m);
    f.g.resize(mm);
    f.dg.resize(mm * static_cast<std::size_t>(m));
    f.d2g.resize(mm * mm);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const std::size_t ij = static_cast<std::size_t>(i * m + j);
            f.g[ij] = jet.g(i, j);
            for (int a = 0; a < m; ++a) {
                f.dg[static_cast<std::size_t>(a) * mm + ij] = jet.dg[static_cast<std::size_t>(a)](i, j);
                for (int b = 0; b < m; ++b)
                    f.d2g[static_cast<std::size_t>(a * m + b) * mm + ij] = jet.second(a, b)(i, j);
            }
        }
    return f;
}

bool well_conditioned(const FramedCurvature& fc) {
    return fc.error_estimate <= kAccuracyTarget * fc.riemann.norm();
}

}  // namespace

CurvaturePoint curvature_at_chart(const ChartSpec& chart, std::span<const double> x) {
    FramedCurvature fc;
    if (chart.flat_jets.flat) {
        if (static_cast<int>(x.size()) != chart.m) throw DomainError("curvature_at: point has wrong dimension");
        if (!chart.domain.contains_interior(x)) throw DomainError("curvature_at: point outside chart interior");
        fc = framed_curvature(chart.flat_jets.flat(x));
    } else {
        fc = framed_curvature(flatten(metric_derivatives(chart, x)));
    }
    if (!well_conditioned(fc) && chart.flat_jets.extended) fc = framed_curvature(chart.flat_jets.extended(x));
    if (!well_conditioned(fc) && chart.flat_jets.quad) fc = framed_curvature(chart.flat_jets.quad(x));
    check_symmetries(fc.riemann, "curvature_at");
    return from_riemann(std::move(fc.riemann), std::move(fc.frame));
}

CurvaturePoint curvature_homogeneous(const HomogeneousSpec& h) {
    Riemann r = homogeneous_riemann(h);
    check_symmetries(r, "curvature_at");
    return from_riemann(std::move(r));
}

CurvaturePoint curvature_product(const CurvaturePoint& a, const CurvaturePoint& b) {
    const int ma = a.m, m = a.m + b.m;
    Riemann r(m);
    for (int i = 0; i < a.m; ++i)
        for (int j = 0; j < a.m; ++j)
            for (int k = 0; k < a.m; ++k)
                for (int l = 0; l < a.m; ++l) r(i, j, k, l) = a.riemann(i, j, k, l);
    for (int i = 0; i < b.m; ++i)
        for (int j = 0; j < b.m; ++j)
            for (int k = 0; k < b.m; ++k)
                for (int l = 0; l < b.m; ++l) r(ma + i, ma + j, ma + k, ma + l) = b.riemann(i, j, k, l);
    std::optional<Eigen::MatrixXd> frame;
    if (a.frame && b.frame) {
        Eigen::MatrixXd f = Eigen::MatrixXd::Zero(m, m);
        f.topLeftCorner(a.m, a.m) = *a.frame;
        f.bottomRightCorner(b.m, b.m) = *b.frame;
        frame = std::move(f);
    }
    return from_riemann(std::move(r), std::move(frame));
}

void verify_sign_convention() {
    static std::once_flag once;
    std::call_once(once, [] {
        const ManifoldPtr s2 = catalog_get("sphere", {2, 1.0});
        const double x[2] = {1.0, 2.0};
        const CurvaturePoint cp = curvature_at_chart(*s2->chart(), x);
        if (std::abs(cp.riemann(0, 1, 0, 1) - 1.0) > 1e-10)
            throw ConsistencyError("sign convention self-test failed: unit sphere gives R_0101 = " +
                                   std::to_string(cp.riemann(0, 1, 0, 1)));
        HomogeneousSpec s3;
        s3.m = 3;
        s3.c.assign(27, 0.0);
        for (auto [i, j, k] : {std::array{0, 1, 2}, std::array{1, 2, 0}, std::array{2, 0, 1}}) {
            s3(i, j, k) = 2.0;
            s3(j, i, k) = -2.0;
        }
        const Riemann r = homogeneous_riemann(s3);
        if (std::abs(r(0, 1, 0, 1) - 1.0) > 1e-12)
            throw ConsistencyError("sign convention self-test failed on the left-invariant round S^3");
    });
}

CurvaturePoint curvature_at(const ManifoldSpec& spec, std::span<const double> x) {
    verify_sign_convention();
    if (const auto* c = spec.chart()) return curvature_at_chart(*c, x);
    if (const auto* h = spec.homogeneous()) return curvature_homogeneous(*h);
    const auto* p = spec.product();
    if (static_cast<int>(x.size()) != spec.point_dimension())
        throw DomainError("curvature_at: product point has wrong dimension");
    if (p->combined) return curvature_at_chart(*p->combined, x);
    const std::size_t split = static_cast<std::size_t>(p->first->point_dimension());
    return curvature_product(curvature_at(*p->first, x.subspan(0, split)), curvature_at(*p->second, x.subspan(split)));
}

CurvaturePoint reframe(const CurvaturePoint& cp, const Eigen::MatrixXd& q) {
    if (q.rows() != cp.m || q.cols() != cp.m) throw DomainError("reframe: frame change has wrong shape");
    std::optional<Eigen::MatrixXd> frame;
    if (cp.frame) frame = Eigen::MatrixXd(*cp.frame * q);
    return from_riemann(transform(cp.riemann, q), std::move(frame));
}

std::vector<double> sorted_eigenvalues(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw DomainError("eigenvalues: matrix not square");
    if (a.rows() == 0) return {};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end());
    return ev;
}

double operator_norm(const Eigen::MatrixXd& a) {
    const auto ev = sorted_eigenvalues(a);
    if (ev.empty()) return 0.0;
    return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

CurvOpMatrix assemble_curv_op(const CurvaturePoint& cp) {
    if (cp.m < 2) throw DomainError("assemble_curv_op: dimension must be at least 2");
    const auto pairs = enumerate_basis(cp.m, 2);
    CurvOpMatrix op;
    op.n = static_cast<int>(pairs.size());
    op.entries.resize(op.n, op.n);
    for (int r = 0; r < op.n; ++r)
        for (int s = 0; s < op.n; ++s) {
            const auto& p = pairs[static_cast<std::size_t>(r)].indices;
            const auto& q = pairs[static_cast<std::size_t>(s)].indices;
            op.entries(r, s) = cp.riemann(p[0], p[1], q[0], q[1]);
        }
    const double asym = (op.entries - op.entries.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTol * cp.riemann.norm() + 1e-13)
        throw ConsistencyError("assemble_curv_op: curvature operator not symmetric");
    op.spectrum = sorted_eigenvalues(op.entries);
    op.op_norm = std::max(std::abs(op.spectrum.front()), std::abs(op.spectrum.back()));
    op.frob_norm = op.entries.norm();
    return op;
}

double partial_eig_sum(const CurvOpMatrix& op, int count) {
    if (count < 1 || count > op.n) throw DomainError("partial_eig_sum: count out of range");
    double s = 0.0;
    for (int k = 0; k < count; ++k) s += op.spectrum[static_cast<std::size_t>(k)];
    return s;
}

namespace {
void require_symmetric(const Eigen::MatrixXd& a, const char* what) {
    if (a.rows() != a.cols()) throw DomainError(std::string(what) + ": matrix not square");
    if (a.size() > 0 && (a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw DomainError(std::string(what) + ": matrix not symmetric");
}
}  // namespace

WeylGap weyl_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DomainError("weyl_gap: shape mismatch");
    require_symmetric(a, "weyl_gap");
    require_symmetric(b, "weyl_gap");
    const auto la = sorted_eigenvalues(a);
    const auto lb = sorted_eigenvalues(b);
    WeylGap w;
    for (std::size_t j = 0; j < la.size(); ++j) w.max_gap = std::max(w.max_gap, std::abs(la[j] - lb[j]));
    w.bound = operator_norm(a - b);
    w.holds = w.max_gap <= w.bound + 1e-10;
    return w;
}

NormSandwich norm_sandwich_check(const Eigen::MatrixXd& a) {
    require_symmetric(a, "norm_sandwich_check");
    NormSandwich r;
    r.op = operator_norm(a);
    r.frob = a.norm();
    r.holds = r.op <= r.frob + 1e-12 && r.frob <= std::sqrt(static_cast<double>(a.rows())) * r.op + 1e-12;
    return r;
}

}  // namespace curvlab
