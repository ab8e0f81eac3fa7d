/// \file asymptotics.hpp
/// Theoretical decay rates and exponents for shifted segments: Moebius
/// contraction, Riemann invariant, Widom rate, the conformal map of the
/// exterior of Gamma and its reflection onto an annulus, the transplant
/// exponent theta(z), the test function built from that map, and power-law
/// fitting.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hcont/fit.hpp"
#include "hcont/geometry.hpp"
#include "hcont/specfun.hpp"

namespace hcont {

struct MoebiusResult {
    /// (max over Gamma of |(tau - ci)/(tau + ci)|)^2 at the best c.
    double rho1 = 1.0;
    double c = 0.0;
};

namespace detail {

inline std::vector<Complex<double>> moebius_samples(const CurveSpec& curve) {
    std::vector<Complex<double>> pts;
    std::visit(
        [&](const auto& c) {
            using C = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<C, SegmentShifted>) {
                // |r_c| grows with |Re tau| on a horizontal segment.
                pts.push_back({c.a, c.h});
                pts.push_back({c.b, c.h});
            } else if constexpr (std::is_same_v<C, Polyline>) {
                constexpr int per_leg = 256;
                for (std::size_t k = 0; k + 1 < c.vertices.size(); ++k)
                    for (int i = 0; i < per_leg; ++i)
                        pts.push_back(c.vertices[k] + (c.vertices[k + 1] - c.vertices[k]) * (double(i) / per_leg));
                pts.push_back(c.vertices.back());
            } else {
                throw ConfigError("moebius_contraction: curve must lie inside the upper half-plane");
            }
        },
        curve.kind());
    return pts;
}

inline double moebius_objective(const std::vector<Complex<double>>& pts, double c) {
    double worst = 0.0;
    for (const auto& t : pts) {
        const double num = t.re * t.re + (t.im - c) * (t.im - c);
        const double den = t.re * t.re + (t.im + c) * (t.im + c);
        worst = std::max(worst, num / den);
    }
    return worst;
}

}  // namespace detail

/// Best squared contraction over the family r_c(tau) = (tau - ci)/(tau + ci).
inline MoebiusResult moebius_contraction(const CurveSpec& curve) {
    const auto pts = detail::moebius_samples(curve);
    double ymax = 0.0;
    for (const auto& p : pts) ymax = std::max(ymax, std::max(p.im, std::abs(p.re)));
    const double lo = std::log(1e-3 * ymax), hi = std::log(1e3 * ymax);
    constexpr int grid = 400;
    int best = 0;
    double fbest = 2.0;
    for (int i = 0; i <= grid; ++i) {
        const double f = detail::moebius_objective(pts, std::exp(lo + (hi - lo) * i / grid));
        if (f < fbest) {
            fbest = f;
            best = i;
        }
    }
    double a = lo + (hi - lo) * std::max(best - 1, 0) / grid;
    double b = lo + (hi - lo) * std::min(best + 1, grid) / grid;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = detail::moebius_objective(pts, std::exp(x1));
    double f2 = detail::moebius_objective(pts, std::exp(x2));
    for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = detail::moebius_objective(pts, std::exp(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = detail::moebius_objective(pts, std::exp(x2));
        }
    }
    MoebiusResult r;
    r.c = std::exp((a + b) / 2.0);
    r.rho1 = detail::moebius_objective(pts, r.c);
    return r;
}

/// Solution of the modulus equation for [-1,1] + ih and the resulting
/// annulus: tau = K(1-m)/K(m), rho_Gamma = exp(2 pi tau).
template <Scalar T>
struct RiemannInvariant {
    T h;
    T m_param;
    T m_complement;
    T tau;
    T rho_gamma;
    [[nodiscard]] T ln_rho() const { return T(2.0) * pi_v<T>() * tau; }
};

/// Left side K(m) E(x|m) - E(m) F(x|m) of the modulus equation, with
/// x = sin(phi) = sqrt((K - E)/(m K)), as a function of m1 = 1 - m.
template <Scalar T>
T modulus_equation_lhs(const T& m1) {
    const T m = T(1.0) - m1;
    const auto ke = ellip_KE(m, m1);
    const T mk = m * ke.K;
    const T x2 = (ke.K - ke.E) / mk;
    const T c2 = (ke.E - m1 * ke.K) / mk;
    const T d = ke.E / ke.K;
    const T s = sqrt(x2);
    const T rf = carlson_RF(c2, d, T(1.0));
    const T rd = carlson_RD(c2, d, T(1.0));
    const T f = s * rf;
    const T e = s * rf - m * x2 * s * rd / T(3.0);
    return ke.K * e - ke.E * f;
}

template <Scalar T>
RiemannInvariant<T> riemann_invariant(const T& h) {
    if (!(h > T(0.0))) throw ConfigError("riemann_invariant: h must be positive");
    const T target = pi_v<T>() / (T(2.0) * h);
    // Search variable s = ln(m1); the left side decreases in m1.
    const double s_lo = std::log(1e-280), s_hi = std::log(1.0 - 1e-9);
    auto f = [&](const T& s) { return modulus_equation_lhs(exp(s)) - target; };

    constexpr int scan = 64;
    std::vector<T> vals;
    for (int i = 0; i <= scan; ++i) vals.push_back(f(T(s_lo + (s_hi - s_lo) * i / scan)));
    for (int i = 0; i < scan; ++i)
        if (!(vals[i + 1] < vals[i])) throw NumericError("riemann_invariant: modulus equation is not monotone on the bracket");
    if (!(vals.front() > T(0.0) && vals.back() < T(0.0))) {
        throw NumericError("riemann_invariant: no sign change on the bracket (f(lo) " +
                           to_string(to_double(vals.front())) + ", f(hi) " + to_string(to_double(vals.back())) + ")");
    }
    T a(s_lo), b(s_hi);
    for (int i = 0; i < scan; ++i) {
        if (vals[i + 1] < T(0.0)) {
            a = T(s_lo + (s_hi - s_lo) * i / scan);
            b = T(s_lo + (s_hi - s_lo) * (i + 1) / scan);
            break;
        }
    }
    for (int it = 0; it < 300 && b - a > T(4.0 * scalar_traits<T>::unit_roundoff) * abs(a); ++it) {
        const T mid = (a + b) * T(0.5);
        if (f(mid) > T(0.0)) a = mid;
        else b = mid;
    }
    RiemannInvariant<T> r;
    r.h = h;
    r.m_complement = exp((a + b) * T(0.5));
    r.m_param = T(1.0) - r.m_complement;
    r.tau = ellip_KE(r.m_complement, r.m_param).K / ellip_KE(r.m_param, r.m_complement).K;
    r.rho_gamma = exp(r.ln_rho());
    return r;
}

/// Widom rate W = pi K(sech(pi/2h)) / K(tanh(pi/2h)), modulus convention.
template <Scalar T>
T widom_rate(const T& h) {
    if (!(h > T(0.0))) throw ConfigError("widom_rate: h must be positive");
    const T a = pi_v<T>() / (T(2.0) * h);
    const T sech = T(1.0) / cosh(a);
    const T th = tanh(a);
    const T num = ellip_KE(sech * sech, th * th).K;
    const T den = ellip_KE(th * th, sech * sech).K;
    return pi_v<T>() * num / den;
}

/// Conformal map of the exterior of Gamma = [-1,1] + ih and its reflection.
/// In the coordinate w of the period strip, g(w) = h [cot(pi w) + 4 sum ...]
/// maps the annulus |Im w| < tau/2 onto the exterior; Im w = -tau/2 covers
/// both sides of Gamma and Psi(zeta) = exp(-2 pi i w).
template <Scalar T>
class SegmentConformalMap {
public:
    explicit SegmentConformalMap(const T& h) : inv_(riemann_invariant(h)) {}

    [[nodiscard]] const RiemannInvariant<T>& invariant() const noexcept { return inv_; }
    [[nodiscard]] T h() const { return inv_.h; }
    [[nodiscard]] T tau() const { return inv_.tau; }
    [[nodiscard]] T rho() const { return inv_.rho_gamma; }

    /// Psi^{-1} in w-coordinates.
    [[nodiscard]] Complex<T> g(const Complex<T>& w) const { return periodic_zeta_series(w, inv_.tau).value * inv_.h; }

    [[nodiscard]] std::pair<Complex<T>, Complex<T>> g_and_derivative(const Complex<T>& w) const {
        const auto s = periodic_zeta_series(w, inv_.tau);
        return {s.value * inv_.h, s.derivative * inv_.h};
    }

    struct Inverse {
        Complex<T> w;
        T residual;
        int iterations = 0;
    };

    /// Solves g(w) = target with Im w on the side of the real axis opposite
    /// to target (so 0 < Im w < tau/2 when Im target < 0), Re w in [-1/2, 1/2).
    [[nodiscard]] Inverse solve(const Complex<T>& target) const {
        if (target.im == T(0.0)) throw ConfigError("SegmentConformalMap: target must lie off the real axis");
        const T sgn = target.im < T(0.0) ? T(1.0) : T(-1.0);
        const T half = inv_.tau * T(0.5);
        const T tol = T(256.0 * scalar_traits<T>::unit_roundoff) * (abs(target) + T(1.0));
        std::vector<Complex<T>> starts;
        starts.push_back(Complex<T>(inv_.h) / (target * pi_v<T>()));
        for (int k = 0; k < 8; ++k)
            for (double r : {0.1, 0.25, 0.4})
                starts.push_back({T((k + 0.5) / 8.0 - 0.5), sgn * inv_.tau * T(r)});
        std::ostringstream dump;
        for (const auto& w0 : starts) {
            auto res = newton(target, w0, sgn, half);
            if (res && res->residual < tol) {
                const double shift = std::floor(to_double(res->w.re) + 0.5);
                res->w.re -= T(shift);
                return *res;
            }
            dump << " start (" << to_double(w0.re) << ',' << to_double(w0.im)
                 << ") residual " << (res ? to_double(res->residual) : -1.0) << ';';
        }
        throw NumericError("SegmentConformalMap: Newton failed from all starts:" + dump.str());
    }

    /// Psi(zeta) = exp(-2 pi i w(zeta)).
    [[nodiscard]] Complex<T> psi(const Complex<T>& zeta) const {
        const Complex<T> w = solve(zeta).w;
        return exp(Complex<T>(T(0.0), T(-2.0) * pi_v<T>()) * w);
    }

    /// theta(z) = 2 Im w(conj z) / tau = ln|Psi(conj z)| / (pi tau).
    [[nodiscard]] T theta(const Complex<T>& z) const {
        if (!(z.im > T(0.0))) throw ConfigError("theta_exponent: z must lie in the upper half-plane");
        const auto r = solve(conj(z));
        return T(2.0) * r.w.im / inv_.tau;
    }

private:
    std::optional<Inverse> newton(const Complex<T>& target, Complex<T> w, const T& sgn, const T& half) const {
        auto inside = [&](const Complex<T>& v) { return sgn * v.im > T(0.0) && sgn * v.im < half; };
        if (!inside(w)) return std::nullopt;
        auto [gv, dg] = g_and_derivative(w);
        T res = abs(gv - target);
        for (int it = 0; it < 200; ++it) {
            if (res < T(64.0 * scalar_traits<T>::unit_roundoff) * (abs(target) + T(1.0))) return Inverse{w, res, it};
            const Complex<T> step = (gv - target) / dg;
            T damp(1.0);
            bool moved = false;
            for (int k = 0; k < 40; ++k, damp *= T(0.5)) {
                const Complex<T> wn = w - step * damp;
                if (!inside(wn)) continue;
                const auto [gn, dn] = g_and_derivative(wn);
                const T rn = abs(gn - target);
                if (rn < res) {
                    w = wn;
                    gv = gn;
                    dg = dn;
                    res = rn;
                    moved = true;
                    break;
                }
            }
            if (!moved) return Inverse{w, res, it};
        }
        return Inverse{w, res, 200};
    }

    RiemannInvariant<T> inv_;
};

template <Scalar T>
T theta_exponent(const Complex<T>& z, const T& h) {
    return SegmentConformalMap<T>(h).theta(z);
}

/// Partial sum of the test function
/// f(zeta) = eps^{2-theta} / (zeta + ih) sum_{n>=1} a^n / (eps^2 + rho^{-n}),
/// a = conj(Psi(z)) Psi(zeta).
template <Scalar T>
struct UguessValue {
    Complex<T> value;
    /// Bound on the omitted terms.
    T tail_bound;
    /// |a|, the ratio-test constant.
    T ratio;
    int terms = 0;
};

template <Scalar T>
class UguessModel {
public:
    UguessModel(const SegmentConformalMap<T>& map, const Complex<T>& z, const T& eps, int terms = 200)
        : map_(map), z_(z), eps_(eps), terms_(terms) {
        if (!(eps > T(0.0))) throw ConfigError("uguess: eps must be positive");
        if (terms < 1 || terms > 200) throw ConfigError("uguess: terms must lie in [1, 200]");
        theta_ = map.theta(z);
        psi_z_conj_ = conj(map.psi(z));
        scale_ = pow(eps, T(2.0) - theta_);
    }

    [[nodiscard]] T theta() const { return theta_; }

    /// Evaluation at zeta = g(w).
    [[nodiscard]] UguessValue<T> eval_w(const Complex<T>& w, const Complex<T>& zeta) const {
        const Complex<T> a = psi_z_conj_ * exp(Complex<T>(T(0.0), T(-2.0) * pi_v<T>()) * w);
        const T ra = abs(a);
        if (!(ra < T(1.0))) throw ConfigError("uguess: |conj(Psi(z)) Psi(zeta)| >= 1, series diverges");
        const T e2 = eps_ * eps_;
        const T rinv = T(1.0) / map_.rho();
        Complex<T> s, an = a;
        T rn = rinv;
        for (int n = 1; n <= terms_; ++n) {
            s += an / (e2 + rn);
            an *= a;
            rn *= rinv;
        }
        UguessValue<T> v;
        v.ratio = ra;
        v.terms = terms_;
        v.tail_bound = scale_ * abs(an) / (e2 * (T(1.0) - ra)) / abs(zeta + Complex<T>(T(0.0), map_.h()));
        v.value = s * scale_ / (zeta + Complex<T>(T(0.0), map_.h()));
        return v;
    }

    [[nodiscard]] UguessValue<T> eval(const Complex<T>& zeta) const {
        const Complex<T> w = map_.solve(zeta).w;
        return eval_w(w, zeta);
    }

    /// RMS of the two boundary traces on Gamma: sqrt(1/2 int |f|^2 |dzeta|)
    /// over the circle Im w = -tau/2, trapezoid rule with n points.
    [[nodiscard]] T norm_on_gamma(int n = 512) const {
        const T y = -map_.tau() * T(0.5);
        T acc(0.0);
        for (int k = 0; k < n; ++k) {
            const Complex<T> w{(T(k) + T(0.5)) / T(n), y};
            const auto [zeta, dz] = map_.g_and_derivative(w);
            acc += norm(eval_w(w, zeta).value) * abs(dz);
        }
        return sqrt(acc / T(n) * T(0.5));
    }

private:
    SegmentConformalMap<T> map_;
    Complex<T> z_;
    T eps_;
    int terms_;
    T theta_;
    Complex<T> psi_z_conj_;
    T scale_;
};

template <Scalar T>
UguessValue<T> uguess_eval(const Complex<T>& zeta, const Complex<T>& z, const T& eps, const T& h, int terms = 200) {
    const SegmentConformalMap<T> map(h);
    return UguessModel<T>(map, z, eps, terms).eval(zeta);
}

/// Least-squares slope of ln M against ln eps.
struct PowerLawFit {
    double gamma_hat = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    /// M was not nondecreasing in eps on the input grid.
    bool non_monotone = false;
};

inline PowerLawFit powerlaw_fit(std::span<const double> eps, std::span<const double> m) {
    if (eps.size() != m.size()) throw ConfigError("powerlaw_fit: eps and M lengths differ");
    if (eps.size() < 6) throw ConfigError("powerlaw_fit: need at least 6 points");
    std::vector<std::size_t> order(eps.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return eps[a] < eps[b]; });
    if (!(eps[order.front()] > 0.0)) throw ConfigError("powerlaw_fit: eps must be positive");
    if (std::log10(eps[order.back()] / eps[order.front()]) < 3.0 - 1e-9)
        throw ConfigError("powerlaw_fit: eps must span at least 3 decades");
    PowerLawFit f;
    std::vector<double> x, y;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t i = order[k];
        if (!(m[i] > 0.0)) throw ConfigError("powerlaw_fit: M values must be positive");
        if (k > 0 && m[i] < m[order[k - 1]]) f.non_monotone = true;
        x.push_back(std::log(eps[i]));
        y.push_back(std::log(m[i]));
    }
    const LinearFit lf = fit_line(x, y);
    f.gamma_hat = lf.slope;
    f.intercept = lf.intercept;
    f.r2 = lf.r2;
    return f;
}

/// Rates for one shifted segment, plus fitted exponents per extrapolation point.
struct RateReport {
    double h = 0.0;
    double rho1 = 0.0;
    double rho_gamma = 0.0;
    double ln_rho_gamma = 0.0;
    double tau = 0.0;
    double m_param = 0.0;
    double widom_W = 0.0;
    std::optional<double> alpha_hat;
    struct Point {
        Complex<double> z;
        double gamma_hat = 0.0;
        double theta = 0.0;
        double r2 = 0.0;
    };
    std::vector<Point> points;
};

template <Scalar T>
RateReport rate_report(const T& h) {
    RateReport r;
    r.h = to_double(h);
    r.rho1 = moebius_contraction(SegmentShifted{-1.0, 1.0, to_double(h)}).rho1;
    const auto inv = riemann_invariant(h);
    r.rho_gamma = to_double(inv.rho_gamma);
    r.ln_rho_gamma = to_double(inv.ln_rho());
    r.tau = to_double(inv.tau);
    r.m_param = to_double(inv.m_param);
    r.widom_W = to_double(widom_rate(h));
    return r;
}

/// CSV rows "x,gamma_hat,theta,r2" (x = Re z).
inline void write_exponent_csv(std::ostream& os, const RateReport& r) {
    os << "x,gamma_hat,theta,r2\n";
    for (const auto& p : r.points)
        os << to_string(p.z.re) << ',' << to_string(p.gamma_hat) << ',' << to_string(p.theta) << ','
           << to_string(p.r2) << '\n';
}

}  // namespace hcont
