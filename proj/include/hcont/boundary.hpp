/// \file boundary.hpp
/// Boundary case Gamma = [-1,1]: closed-form exponent, constants and
/// maximizer, the explicit solution of 1/2 (K u + u) + eps^2 u = p_z, the
/// truncated Hilbert transform, the Koppelman-Pincus transform, and the
/// h -> 0 limit of the interior problem on [-1,1] + ih.
#pragma once

#include <cmath>
#include <ostream>
#include <span>
#include <vector>

#include "hcont/geometry.hpp"
#include "hcont/matrix.hpp"
#include "hcont/quadrature.hpp"

namespace hcont {

namespace detail {

template <Scalar T>
void require_upper(const Complex<T>& z, const char* who) {
    if (!(z.im > T(0.0))) throw ConfigError(std::string(who) + ": z must lie in the upper half-plane");
}

/// arctan((Re z + 1)/Im z) - arctan((Re z - 1)/Im z), the angle subtended by [-1,1].
template <Scalar T>
T subtended_angle(const Complex<T>& z) {
    return atan((z.re + T(1.0)) / z.im) - atan((z.re - T(1.0)) / z.im);
}

/// ln((1 + x)/(1 - x)) for real x in (-1,1).
template <Scalar T>
T log_ratio(const T& x) {
    return log((T(1.0) + x) / (T(1.0) - x));
}

}  // namespace detail

/// gamma(z) = -arg((z + 1)/(z - 1)) / pi.
template <Scalar T>
T gamma_exponent(const Complex<T>& z) {
    detail::require_upper(z, "gamma_exponent");
    const Complex<T> r = (z + Complex<T>(T(1.0))) / (z - Complex<T>(T(1.0)));
    return -arg(r) / pi_v<T>();
}

/// Angular form of gamma(z).
template <Scalar T>
T gamma_exponent_arctan(const Complex<T>& z) {
    detail::require_upper(z, "gamma_exponent");
    return detail::subtended_angle(z) / pi_v<T>();
}

/// ||p_z||^2 on (-1,1) in closed form.
template <Scalar T>
T boundary_p_norm_sq(const Complex<T>& z) {
    detail::require_upper(z, "boundary_p_norm_sq");
    return detail::subtended_angle(z) / z.im;
}

template <Scalar T>
struct BoundaryBound {
    Complex<T> z;
    T eps;
    T gamma;
    T rho;
    /// rho eps^gamma.
    T bound;
    /// Asymptotic constant eps^gamma / (2 sqrt(Im z * angle)).
    T B;
    /// 1/2 ln((conj z + 1)/(conj z - 1)).
    Complex<T> alpha_half_log;
    /// 1/2 ln(1 + eps^-2).
    T beta;
};

template <Scalar T>
BoundaryBound<T> boundary_bound(const Complex<T>& z, const T& eps) {
    detail::require_upper(z, "boundary_bound");
    if (!(eps > T(0.0)) || !(eps < T(1.0))) throw ConfigError("boundary_bound: eps must lie in (0,1)");
    BoundaryBound<T> b;
    b.z = z;
    b.eps = eps;
    b.gamma = gamma_exponent(z);
    const T ang = detail::subtended_angle(z);
    b.rho = T(3.0) / sqrt(z.im * ang);
    const T eg = pow(eps, b.gamma);
    b.bound = b.rho * eg;
    b.B = eg / (T(2.0) * sqrt(z.im * ang));
    const Complex<T> zc = conj(z);
    b.alpha_half_log = log((zc + Complex<T>(T(1.0))) / (zc - Complex<T>(T(1.0)))) * T(0.5);
    b.beta = T(0.5) * log(T(1.0) + T(1.0) / (eps * eps));
    return b;
}

/// W(zeta) = eps p(zeta)/||p|| exp((i/pi) ln(eps) ln((1+zeta)/(1-zeta))).
/// Real zeta are boundary values from above (principal log on (-1,1), arg pi
/// outside).
template <Scalar T>
Complex<T> maximizer_W(const Complex<T>& zeta, const Complex<T>& z, const T& eps) {
    detail::require_upper(z, "maximizer_W");
    if (!(eps > T(0.0)) || !(eps < T(1.0))) throw ConfigError("maximizer_W: eps must lie in (0,1)");
    if (zeta.im < T(0.0)) throw ConfigError("maximizer_W: zeta must lie in the closed upper half-plane");
    if (zeta.im == T(0.0) && abs(zeta.re) == T(1.0)) throw ConfigError("maximizer_W: zeta = +-1 is a branch point");
    const Complex<T> one(T(1.0));
    Complex<T> lg;
    if (zeta.im == T(0.0) && abs(zeta.re) > T(1.0)) {
        lg = {log(abs((T(1.0) + zeta.re) / (T(1.0) - zeta.re))), pi_v<T>()};
    } else {
        lg = log((one + zeta) / (one - zeta));
    }
    const Complex<T> p = imag_unit<T>() / (zeta - conj(z));
    const T pn = sqrt(boundary_p_norm_sq(z));
    const Complex<T> ex = exp(Complex<T>(T(0.0), log(eps) / pi_v<T>()) * lg);
    return p * (eps / pn) * ex;
}

/// Closed-form ||W||^2_{H^2} = eps^2 - 1 + pi / angle.
template <Scalar T>
T maximizer_W_h2_norm_sq(const Complex<T>& z, const T& eps) {
    return eps * eps - T(1.0) + pi_v<T>() / detail::subtended_angle(z);
}

/// Explicit solution u(x) = 2 p(x) sinh(beta) exp(-i (beta/pi)(L(x) - 2 alpha)),
/// given L = ln((1+x)/(1-x)) so callers on a tanh grid can pass L = 2t.
template <Scalar T>
Complex<T> explicit_u_with_log(const T& x, const T& L, const Complex<T>& z, const T& eps) {
    const T beta = T(0.5) * log(T(1.0) + T(1.0) / (eps * eps));
    const Complex<T> zc = conj(z);
    const Complex<T> alpha = log((zc + Complex<T>(T(1.0))) / (zc - Complex<T>(T(1.0)))) * T(0.5);
    const Complex<T> p = imag_unit<T>() / (Complex<T>(x) - zc);
    const Complex<T> ph = (Complex<T>(L) - alpha * T(2.0)) * (beta / pi_v<T>());
    return p * (T(2.0) * sinh(beta)) * exp(Complex<T>(ph.im, -ph.re));
}

template <Scalar T>
Complex<T> explicit_u(const T& x, const Complex<T>& z, const T& eps) {
    detail::require_upper(z, "explicit_u");
    if (!(eps > T(0.0))) throw ConfigError("explicit_u: eps must be positive");
    if (!(abs(x) < T(1.0))) throw ConfigError("explicit_u: need |x| < 1");
    return explicit_u_with_log(x, detail::log_ratio(x), z, eps);
}

/// u'(x) = u(x) (-1/(x - conj z) - i (beta/pi) 2/(1 - x^2)); one_minus_x2 is
/// passed separately for accuracy near the endpoints.
template <Scalar T>
Complex<T> explicit_u_derivative(const T& x, const T& one_minus_x2, const Complex<T>& u, const Complex<T>& z,
                                 const T& eps) {
    const T beta = T(0.5) * log(T(1.0) + T(1.0) / (eps * eps));
    const Complex<T> a = -(Complex<T>(T(1.0)) / (Complex<T>(x) - conj(z)));
    const Complex<T> b{T(0.0), -(beta / pi_v<T>()) * T(2.0) / one_minus_x2};
    return u * (a + b);
}

/// Analytic continuation of the explicit solution to zeta in the upper half-plane.
template <Scalar T>
Complex<T> explicit_u_at(const Complex<T>& zeta, const Complex<T>& z, const T& eps) {
    detail::require_upper(z, "explicit_u_at");
    const T beta = T(0.5) * log(T(1.0) + T(1.0) / (eps * eps));
    const Complex<T> one(T(1.0));
    const Complex<T> zc = conj(z);
    const Complex<T> alpha = log((zc + one) / (zc - one)) * T(0.5);
    const Complex<T> L = log((one + zeta) / (one - zeta));
    const Complex<T> p = imag_unit<T>() / (zeta - zc);
    const Complex<T> ph = (L - alpha * T(2.0)) * (beta / pi_v<T>());
    return p * (T(2.0) * sinh(beta)) * exp(Complex<T>(ph.im, -ph.re));
}

/// ||u||_{L^2(-1,1)} = 2 ||p|| sinh(beta) exp(-2 beta Im(alpha)/pi).
template <Scalar T>
T explicit_u_norm(const Complex<T>& z, const T& eps) {
    detail::require_upper(z, "explicit_u_norm");
    const T beta = T(0.5) * log(T(1.0) + T(1.0) / (eps * eps));
    const Complex<T> zc = conj(z);
    const Complex<T> alpha = log((zc + Complex<T>(T(1.0))) / (zc - Complex<T>(T(1.0)))) * T(0.5);
    return T(2.0) * sqrt(boundary_p_norm_sq(z)) * sinh(beta) * exp(T(-2.0) * beta * alpha.im / pi_v<T>());
}

/// (3/2) eps |u(z)| / ||u||_{L^2(-1,1)}.
template <Scalar T>
T boundary_limit_bound(const Complex<T>& z, const T& eps) {
    return T(1.5) * eps * abs(explicit_u_at(z, z, eps)) / explicit_u_norm(z, eps);
}

/// (i/pi) PV int_{-1}^{1} u(y)/(x - y) dy at the nodes by singularity
/// subtraction: sum_{k != j} w_k (u_k - u_j)/(x_j - x_k) - w_j u'_j + u_j L(x_j).
template <Scalar T>
CVector<T> truncated_hilbert(std::span<const T> nodes, std::span<const T> weights, std::span<const T> log_ratio,
                             std::span<const Complex<T>> u, std::span<const Complex<T>> du) {
    const std::size_t n = nodes.size();
    if (weights.size() != n || log_ratio.size() != n || u.size() != n || du.size() != n)
        throw ConfigError("truncated_hilbert: size mismatch");
    CVector<T> out(n);
    const Complex<T> c{T(0.0), T(1.0) / pi_v<T>()};
    for (std::size_t j = 0; j < n; ++j) {
        Complex<T> acc;
        for (std::size_t k = 0; k < n; ++k) {
            if (k == j) continue;
            acc += (u[k] - u[j]) * (weights[k] / (nodes[j] - nodes[k]));
        }
        acc -= du[j] * weights[j];
        acc += u[j] * log_ratio[j];
        out[j] = c * acc;
    }
    return out;
}

/// Barycentric differentiation matrix on arbitrary distinct nodes of a
/// Gauss-Legendre rule (weights (-1)^j sqrt((1 - x_j^2) w_j)).
template <Scalar T>
Matrix<T> gauss_differentiation_matrix(const QuadratureRule<T>& rule) {
    const std::size_t n = rule.order();
    std::vector<T> b(n);
    for (std::size_t j = 0; j < n; ++j) {
        b[j] = sqrt((T(1.0) - rule.nodes[j] * rule.nodes[j]) * rule.weights[j]);
        if (j % 2) b[j] = -b[j];
    }
    Matrix<T> d(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        T diag(0.0);
        for (std::size_t k = 0; k < n; ++k) {
            if (k == j) continue;
            d(j, k) = b[k] / b[j] / (rule.nodes[j] - rule.nodes[k]);
            diag -= d(j, k);
        }
        d(j, j) = diag;
    }
    return d;
}

/// Gauss-rule variant; u' is obtained from the interpolating polynomial.
template <Scalar T>
CVector<T> truncated_hilbert(std::span<const Complex<T>> u, const QuadratureRule<T>& rule) {
    const std::size_t n = rule.order();
    if (u.size() != n) throw ConfigError("truncated_hilbert: size mismatch");
    const Matrix<T> d = gauss_differentiation_matrix(rule);
    CVector<T> du(n);
    std::vector<T> lr(n);
    for (std::size_t j = 0; j < n; ++j) {
        Complex<T> acc;
        for (std::size_t k = 0; k < n; ++k) acc += u[k] * d(j, k);
        du[j] = acc;
        lr[j] = detail::log_ratio(rule.nodes[j]);
    }
    return truncated_hilbert<T>(rule.nodes, rule.weights, lr, u, du);
}

/// Tanh-rule variant with explicit derivative values; L(x_j) = 2 t_j.
template <Scalar T>
CVector<T> truncated_hilbert(std::span<const Complex<T>> u, std::span<const Complex<T>> du, const TanhRule<T>& rule) {
    std::vector<T> lr;
    lr.reserve(rule.order());
    for (const auto& t : rule.t) lr.push_back(T(2.0) * t);
    return truncated_hilbert<T>(rule.nodes, rule.weights, lr, u, du);
}

/// Relative residual ||1/2 (K u + u) + eps^2 u - p_z|| / ||p_z|| of the
/// explicit solution on a tanh rule.
template <Scalar T>
T boundary_equation_residual(const Complex<T>& z, const T& eps, const TanhRule<T>& rule) {
    const std::size_t n = rule.order();
    CVector<T> u(n), du(n), p(n);
    for (std::size_t j = 0; j < n; ++j) {
        const T x = rule.nodes[j];
        u[j] = explicit_u_with_log(x, T(2.0) * rule.t[j], z, eps);
        du[j] = explicit_u_derivative(x, rule.one_minus_x2[j], u[j], z, eps);
        p[j] = imag_unit<T>() / (Complex<T>(x) - conj(z));
    }
    const CVector<T> ku = truncated_hilbert<T>(u, du, rule);
    T num(0.0), den(0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const Complex<T> r = (ku[j] + u[j]) * T(0.5) + u[j] * (eps * eps) - p[j];
        num += rule.weights[j] * norm(r);
        den += rule.weights[j] * norm(p[j]);
    }
    return sqrt(num / den);
}

/// Hermitian part of the sqrt-weight Nystrom matrix of the truncated Hilbert
/// transform on a Gauss rule: (i/pi) sqrt(w_j w_k)/(x_j - x_k), zero diagonal.
template <Scalar T>
CMatrix<T> hilbert_hermitian_matrix(const QuadratureRule<T>& rule) {
    const std::size_t n = rule.order();
    CMatrix<T> a(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            if (k != j)
                a(j, k) = Complex<T>(T(0.0), sqrt(rule.weights[j] * rule.weights[k]) /
                                                 (pi_v<T>() * (rule.nodes[j] - rule.nodes[k])));
    return a;
}

/// Uniform grids for the Koppelman-Pincus transform in the variables
/// x = tanh t and zeta = tanh s.
struct KPGrid {
    double t_half = 30.0;
    std::size_t nt = 3001;
    double s_half = 250.0;
    std::size_t ns = 16001;

    [[nodiscard]] double dt() const { return 2.0 * t_half / double(nt - 1); }
    [[nodiscard]] double ds() const { return 2.0 * s_half / double(ns - 1); }
    [[nodiscard]] double t(std::size_t j) const { return -t_half + dt() * double(j); }
    [[nodiscard]] double s(std::size_t k) const { return -s_half + ds() * double(k); }
};

struct KPResult {
    /// Values at the output grid points (zeta_k = tanh s_k, or x_j = tanh t_j).
    std::vector<Complex<double>> values;
    /// Magnitude of the weighted integrand at the truncation edges.
    double truncation_estimate = 0.0;
};

namespace detail {

/// out_k = (step/pi) sum_j in_j exp(i sign (2/pi) a_j b_k), uniform grids.
inline std::vector<Complex<double>> kp_sum(std::span<const Complex<double>> in, double a0, double da,
                                           std::size_t nb, double b0, double db, double sign, double step) {
    std::vector<Complex<double>> out(nb);
    constexpr std::size_t reseed = 64;
    for (std::size_t k = 0; k < nb; ++k) {
        const double b = b0 + db * double(k);
        const double fac = sign * 2.0 / std::numbers::pi * b;
        const Complex<double> rot = polar(1.0, fac * da);
        Complex<double> acc, e;
        for (std::size_t j = 0; j < in.size(); ++j) {
            if (j % reseed == 0) e = polar(1.0, fac * (a0 + da * double(j)));
            acc += in[j] * e;
            e *= rot;
        }
        out[k] = acc * (step / std::numbers::pi);
    }
    return out;
}

}  // namespace detail

/// g(zeta) = int f(x) conj(sigma(x, zeta)) dx on zeta_k = tanh s_k, from f
/// sampled at x_j = tanh t_j. With F(t) = f(tanh t) sech t and
/// G(s) = g(tanh s) sech s the transform is G(s) = (1/pi) int F(t) e^{-2its/pi} dt.
inline KPResult kp_transform(std::span<const Complex<double>> f_nodes, const KPGrid& grid = {}) {
    if (f_nodes.size() != grid.nt) throw ConfigError("kp_transform: samples must match the t-grid");
    std::vector<Complex<double>> F(grid.nt);
    for (std::size_t j = 0; j < grid.nt; ++j) F[j] = f_nodes[j] / std::cosh(grid.t(j));
    KPResult r;
    r.truncation_estimate = std::max(abs(F.front()), abs(F.back()));
    const auto G = detail::kp_sum(F, grid.t(0), grid.dt(), grid.ns, grid.s(0), grid.ds(), -1.0, grid.dt());
    r.values.resize(grid.ns);
    for (std::size_t k = 0; k < grid.ns; ++k) r.values[k] = G[k] * std::cosh(grid.s(k));
    r.truncation_estimate = std::max(r.truncation_estimate, std::max(abs(G.front()), abs(G.back())));
    return r;
}

/// Inverse transform from g on zeta_k = tanh s_k back to f on x_j = tanh t_j.
inline KPResult kp_inverse(std::span<const Complex<double>> g_nodes, const KPGrid& grid = {}) {
    if (g_nodes.size() != grid.ns) throw ConfigError("kp_inverse: samples must match the s-grid");
    std::vector<Complex<double>> G(grid.ns);
    for (std::size_t k = 0; k < grid.ns; ++k) G[k] = g_nodes[k] / std::cosh(grid.s(k));
    KPResult r;
    r.truncation_estimate = std::max(abs(G.front()), abs(G.back()));
    const auto F = detail::kp_sum(G, grid.s(0), grid.ds(), grid.nt, grid.t(0), grid.dt(), 1.0, grid.ds());
    r.values.resize(grid.nt);
    for (std::size_t j = 0; j < grid.nt; ++j) r.values[j] = F[j] * std::cosh(grid.t(j));
    return r;
}

/// L^2(-1,1) norm of samples on x_j = tanh t_j (or zeta_k = tanh s_k) of a
/// uniform grid with the given step.
inline double kp_l2_norm(std::span<const Complex<double>> values, double first, double step) {
    double acc = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) {
        const double c = std::cosh(first + step * double(j));
        acc += norm(values[j]) / (c * c);
    }
    return std::sqrt(acc * step);
}

/// (i/pi) PV int_a^b f(y)/(x - y) dy for f supported in [a,b], by singularity
/// subtraction on a Gauss rule of the support.
template <class F>
Complex<double> hilbert_of_compact(const F& f, double a, double b, double x, const QuadratureRule<double>& rule) {
    const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
    const Complex<double> fx = (x > a && x < b) ? Complex<double>(f(x)) : Complex<double>{};
    Complex<double> acc;
    for (std::size_t i = 0; i < rule.order(); ++i) {
        const double y = mid + hw * rule.nodes[i];
        acc += (Complex<double>(f(y)) - fx) * (hw * rule.weights[i] / (x - y));
    }
    if (x != a && x != b) acc += fx * std::log(std::abs((x - a) / (x - b)));
    return Complex<double>(0.0, 1.0 / std::numbers::pi) * acc;
}

/// Discretization controls for the interior problem on [-1,1] + ih as h -> 0.
struct PanelNystromOptions {
    int levels = 20;
    int order = 16;
    int upsample = 64;
};

struct InteriorLimitResult {
    double h = 0.0;
    Complex<double> u_at_z;
    double norm_L2 = 0.0;
    /// (3/2) eps |u(z)| / ||u||.
    double M = 0.0;
    std::size_t nodes = 0;
};

namespace detail {

struct PanelBasis {
    QuadratureRule<double> base;
    QuadratureRule<double> fine;
    /// vinv(k, i) = w_i P_k(t_i) (2k+1)/2.
    Matrix<double> vinv;
    /// Interpolation from the base nodes to the fine nodes.
    Matrix<double> interp;
};

inline std::vector<double> legendre_values(int n, double x) {
    std::vector<double> p(static_cast<std::size_t>(n));
    p[0] = 1.0;
    if (n > 1) p[1] = x;
    for (int k = 1; k + 1 < n; ++k) p[k + 1] = ((2.0 * k + 1.0) * x * p[k] - k * p[k - 1]) / (k + 1.0);
    return p;
}

inline PanelBasis make_panel_basis(int order, int upsample) {
    PanelBasis pb{gauss_legendre<double>(order), gauss_legendre<double>(upsample), Matrix<double>(order, order),
                  Matrix<double>(upsample, order)};
    for (int i = 0; i < order; ++i) {
        const auto p = legendre_values(order, pb.base.nodes[i]);
        for (int k = 0; k < order; ++k) pb.vinv(k, i) = pb.base.weights[i] * p[k] * (2.0 * k + 1.0) / 2.0;
    }
    for (int f = 0; f < upsample; ++f) {
        const auto p = legendre_values(order, pb.fine.nodes[f]);
        for (int i = 0; i < order; ++i) {
            double s = 0.0;
            for (int k = 0; k < order; ++k) s += p[k] * pb.vinv(k, i);
            pb.interp(f, i) = s;
        }
    }
    return pb;
}

/// Weights omega_i with sum_i omega_i f(t_i) ~ int_{-1}^{1} f(t)/(c - t) dt.
inline std::vector<Complex<double>> panel_weights(const PanelBasis& pb, const Complex<double>& c) {
    const std::size_t n = pb.base.order();
    const Complex<double> one(1.0);
    const Complex<double> sq = sqrt(c * c - one);
    const double bern = std::max(abs(c + sq), abs(c - sq));
    std::vector<Complex<double>> w(n);
    if (bern < 1.3) {
        std::vector<Complex<double>> q(n);
        q[0] = log(c + one) - log(c - one);
        if (n > 1) q[1] = c * q[0] - Complex<double>(2.0);
        for (std::size_t k = 1; k + 1 < n; ++k)
            q[k + 1] = (c * q[k] * (2.0 * double(k) + 1.0) - q[k - 1] * double(k)) / (double(k) + 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            Complex<double> s;
            for (std::size_t k = 0; k < n; ++k) s += q[k] * pb.vinv(k, i);
            w[i] = s;
        }
    } else if (bern < 3.0) {
        for (std::size_t f = 0; f < pb.fine.order(); ++f) {
            const Complex<double> kf = Complex<double>(pb.fine.weights[f]) / (c - Complex<double>(pb.fine.nodes[f]));
            for (std::size_t i = 0; i < n; ++i) w[i] += kf * pb.interp(f, i);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) w[i] = Complex<double>(pb.base.weights[i]) / (c - Complex<double>(pb.base.nodes[i]));
    }
    return w;
}

}  // namespace detail

namespace detail {

struct PanelSystem {
    std::vector<double> x;
    std::vector<double> w;
    /// Product-integration Nystrom matrix of K_h (no eps^2 shift).
    CMatrix<double> a;
};

inline PanelSystem assemble_panel_Kh(double h, const PanelNystromOptions& opts) {
    if (!(h > 0.0)) throw ConfigError("panel Nystrom: h must be positive");
    if (h < 1e-9) throw NumericError("panel Nystrom: h below 1e-9 is beyond binary64 resolution of the mesh");
    const auto pb = make_panel_basis(opts.order, opts.upsample);
    const auto br = graded_breakpoints<double>(opts.levels, 2);
    const std::size_t panels = br.size() - 1;
    const std::size_t m = pb.base.order();
    const std::size_t n = panels * m;
    PanelSystem ps{std::vector<double>(n), std::vector<double>(n), CMatrix<double>(n, n)};
    std::vector<double> mids(panels), hws(panels);
    for (std::size_t q = 0; q < panels; ++q) {
        mids[q] = 0.5 * (br[q] + br[q + 1]);
        hws[q] = 0.5 * (br[q + 1] - br[q]);
        for (std::size_t i = 0; i < m; ++i) {
            ps.x[q * m + i] = mids[q] + hws[q] * pb.base.nodes[i];
            ps.w[q * m + i] = hws[q] * pb.base.weights[i];
        }
    }
    const Complex<double> c2pi(0.0, 1.0 / (2.0 * std::numbers::pi));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t q = 0; q < panels; ++q) {
            const Complex<double> c = Complex<double>(ps.x[j] - mids[q], 2.0 * h) / hws[q];
            const auto pw = panel_weights(pb, c);
            for (std::size_t i = 0; i < m; ++i) ps.a(j, q * m + i) = c2pi * pw[i];
        }
    }
    return ps;
}

}  // namespace detail

/// Solves (K_h + eps^2) v = p_z on [-1,1] + ih by product-integration Nystrom
/// on dyadically graded panels and extends v to z.
inline InteriorLimitResult solve_interior_limit(const Complex<double>& z, double eps, double h,
                                                const PanelNystromOptions& opts = {}) {
    detail::require_upper(z, "solve_interior_limit");
    if (!(eps > 0.0)) throw ConfigError("solve_interior_limit: eps must be positive");
    auto ps = detail::assemble_panel_Kh(h, opts);
    const std::size_t n = ps.x.size();
    for (std::size_t j = 0; j < n; ++j) ps.a(j, j) += Complex<double>(eps * eps);
    CVector<double> rhs(n);
    for (std::size_t j = 0; j < n; ++j) rhs[j] = Complex<double>(0.0, 1.0) / (Complex<double>(ps.x[j], h) - conj(z));
    const CVector<double> v = LU<double>(std::move(ps.a)).solve(rhs);

    InteriorLimitResult r;
    r.h = h;
    r.nodes = n;
    double nrm = 0.0;
    Complex<double> kz;
    for (std::size_t k = 0; k < n; ++k) {
        nrm += ps.w[k] * norm(v[k]);
        kz += v[k] * ps.w[k] / (z - Complex<double>(ps.x[k], -h));
    }
    const Complex<double> c2pi(0.0, 1.0 / (2.0 * std::numbers::pi));
    r.norm_L2 = std::sqrt(nrm);
    r.u_at_z = (Complex<double>(0.0, 1.0) / (z - conj(z)) - c2pi * kz) / (eps * eps);
    r.M = 1.5 * eps * abs(r.u_at_z) / r.norm_L2;
    return r;
}

/// Largest eigenvalue of the Hermitian part of W^{1/2} A W^{-1/2}, A the
/// panel Nystrom matrix of K_h, by power iteration.
inline double kh_lambda_max(double h, const PanelNystromOptions& opts = {}, int iterations = 300) {
    const auto ps = detail::assemble_panel_Kh(h, opts);
    const std::size_t n = ps.x.size();
    CMatrix<double> s(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
            const double r = std::sqrt(ps.w[j] / ps.w[k]);
            const Complex<double> ajk = ps.a(j, k) * r;
            const Complex<double> akj = ps.a(k, j) / r;
            s(j, k) = (ajk + conj(akj)) * 0.5;
        }
    CVector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = Complex<double>(std::sqrt(ps.w[j]));
    double lam = 0.0;
    for (int it = 0; it < iterations; ++it) {
        const double nv = norm2<double>(v);
        for (auto& e : v) e /= nv;
        const CVector<double> av = apply<double>(s, v);
        lam = inner<double>(av, v).re;
        v = av;
    }
    return lam;
}

struct HLimitRow {
    double h = 0.0;
    double M_h = 0.0;
    double M_boundary = 0.0;
    /// |M_h - M_boundary| / M_boundary.
    double gap = 0.0;
    double lambda_max = 0.0;
};

inline std::vector<HLimitRow> h_limit_study(const Complex<double>& z, double eps, std::span<const double> h_list,
                                            const PanelNystromOptions& opts = {}) {
    for (std::size_t i = 0; i < h_list.size(); ++i) {
        if (!(h_list[i] > 0.0)) throw ConfigError("h_limit_study: h values must be positive");
        if (i > 0 && !(h_list[i] < h_list[i - 1])) throw ConfigError("h_limit_study: h values must decrease");
    }
    const double mb = boundary_limit_bound(z, eps);
    std::vector<HLimitRow> rows;
    for (double h : h_list) {
        HLimitRow r;
        r.h = h;
        r.M_h = solve_interior_limit(z, eps, h, opts).M;
        r.M_boundary = mb;
        r.gap = std::abs(r.M_h - mb) / mb;
        r.lambda_max = kh_lambda_max(h);
        rows.push_back(r);
    }
    return rows;
}

/// CSV rows "h,M_h,M_boundary,gap".
inline void write_hlimit_csv(std::ostream& os, std::span<const HLimitRow> rows) {
    os << "h,M_h,M_boundary,gap\n";
    for (const auto& r : rows)
        os << to_string(r.h) << ',' << to_string(r.M_h) << ',' << to_string(r.M_boundary) << ',' << to_string(r.gap)
           << '\n';
}

/// CSV rows "zr,zi,gamma,rho".
template <Scalar T>
void write_gamma_map_csv(std::ostream& os, std::span<const Complex<T>> zs) {
    os << "zr,zi,gamma,rho\n";
    for (const auto& z : zs) {
        const T rho = T(3.0) / sqrt(z.im * detail::subtended_angle(z));
        os << to_string(z.re) << ',' << to_string(z.im) << ',' << to_string(gamma_exponent(z)) << ',' << to_string(rho)
           << '\n';
    }
}

}  // namespace hcont
