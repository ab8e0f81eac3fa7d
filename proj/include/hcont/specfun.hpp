/// \file specfun.hpp
/// Complete and incomplete elliptic integrals (parameter convention) and the
/// Weierstrass zeta function with periods 1 and i tau.
#pragma once

#include <string>

#include "hcont/complex.hpp"
#include "hcont/errors.hpp"

namespace hcont {

template <Scalar T>
struct EllipticKE {
    T K;
    T E;
    int iterations = 0;
};

/// K(m) and E(m) by the arithmetic-geometric mean. Both m and its complement
/// m1 = 1 - m are passed so that either can be tiny without cancellation.
template <Scalar T>
EllipticKE<T> ellip_KE(const T& m, const T& m1) {
    if (!(m >= T(0.0)) || !(m1 > T(0.0))) throw ConfigError("elliptic parameter must satisfy 0 <= m < 1");
    const T u(scalar_traits<T>::unit_roundoff);
    T a(1.0);
    T b = sqrt(m1);
    T c2 = m;
    T pow2(0.5);
    T sum = pow2 * c2;
    int it = 0;
    while (abs(a - b) > T(8.0) * u * a) {
        if (++it > 64) throw NumericError("ellip_KE: AGM failed to converge");
        const T an = (a + b) * T(0.5);
        const T cn = (a - b) * T(0.5);
        b = sqrt(a * b);
        a = an;
        pow2 *= T(2.0);
        sum += pow2 * cn * cn;
    }
    EllipticKE<T> r;
    r.K = pi_v<T>() / (T(2.0) * a);
    r.E = r.K * (T(1.0) - sum);
    r.iterations = it;
    return r;
}

/// Complete integral of the first kind, parameter convention.
template <Scalar T>
T ellip_K(const T& m) {
    if (!(m < T(1.0))) throw ConfigError("ellip_K: parameter m must be < 1");
    return ellip_KE(m, T(1.0) - m).K;
}

/// Complete integral of the second kind, parameter convention.
template <Scalar T>
T ellip_E(const T& m) {
    if (!(m < T(1.0))) throw ConfigError("ellip_E: parameter m must be < 1");
    return ellip_KE(m, T(1.0) - m).E;
}

/// Complete integral of the first kind in the modulus convention, K(k^2).
template <Scalar T>
T ellip_K_modulus(const T& k) {
    if (!(k >= T(0.0)) || !(k < T(1.0))) throw ConfigError("ellip_K_modulus: modulus must lie in [0,1)");
    return ellip_KE(k * k, (T(1.0) - k) * (T(1.0) + k)).K;
}

/// Carlson symmetric integral R_F(x,y,z).
template <Scalar T>
T carlson_RF(T x, T y, T z) {
    if (x < T(0.0) || y < T(0.0) || z < T(0.0)) throw ConfigError("carlson_RF: arguments must be nonnegative");
    const T tol = T(0.5) * pow(T(scalar_traits<T>::unit_roundoff), T(1.0 / 6.0));
    T mu, dx, dy, dz;
    for (int it = 0;; ++it) {
        if (it > 200) throw NumericError("carlson_RF: no convergence");
        mu = (x + y + z) / T(3.0);
        dx = (mu - x) / mu;
        dy = (mu - y) / mu;
        dz = (mu - z) / mu;
        T big = abs(dx);
        if (abs(dy) > big) big = abs(dy);
        if (abs(dz) > big) big = abs(dz);
        if (big < tol) break;
        const T sx = sqrt(x), sy = sqrt(y), sz = sqrt(z);
        const T lam = sx * (sy + sz) + sy * sz;
        x = (x + lam) * T(0.25);
        y = (y + lam) * T(0.25);
        z = (z + lam) * T(0.25);
    }
    const T e2 = dx * dy - dz * dz;
    const T e3 = dx * dy * dz;
    return (T(1.0) + (e2 / T(24.0) - T(1.0) / T(10.0) - T(3.0) * e3 / T(44.0)) * e2 + e3 / T(14.0)) / sqrt(mu);
}

/// Carlson symmetric integral R_D(x,y,z).
template <Scalar T>
T carlson_RD(T x, T y, T z) {
    if (x < T(0.0) || y < T(0.0) || !(z > T(0.0))) throw ConfigError("carlson_RD: invalid arguments");
    const T tol = T(0.25) * pow(T(scalar_traits<T>::unit_roundoff), T(1.0 / 6.0));
    T sum(0.0), fac(1.0);
    T mu, dx, dy, dz;
    for (int it = 0;; ++it) {
        if (it > 200) throw NumericError("carlson_RD: no convergence");
        mu = (x + y + T(3.0) * z) / T(5.0);
        dx = (mu - x) / mu;
        dy = (mu - y) / mu;
        dz = (mu - z) / mu;
        T big = abs(dx);
        if (abs(dy) > big) big = abs(dy);
        if (abs(dz) > big) big = abs(dz);
        if (big < tol) break;
        const T sx = sqrt(x), sy = sqrt(y), sz = sqrt(z);
        const T lam = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (z + lam));
        fac *= T(0.25);
        x = (x + lam) * T(0.25);
        y = (y + lam) * T(0.25);
        z = (z + lam) * T(0.25);
    }
    const T c1 = T(3.0) / T(14.0), c2 = T(1.0) / T(6.0), c3 = T(9.0) / T(22.0), c4 = T(3.0) / T(26.0);
    const T c5 = T(9.0) / T(88.0), c6 = T(9.0) / T(52.0);
    const T ea = dx * dy, eb = dz * dz;
    const T ec = ea - eb, ed = ea - T(6.0) * eb, ee = ed + ec + ec;
    const T series = T(1.0) + ed * (-c1 + c5 * ed - c6 * dz * ee) + dz * (c2 * ee + dz * (-c3 * ec + dz * c4 * ea));
    return T(3.0) * sum + fac * series / (mu * sqrt(mu));
}

/// F(phi|m) from s = sin(phi) and c2 = cos^2(phi) (both supplied to avoid
/// cancellation near phi = pi/2).
template <Scalar T>
T ellip_F_sc(const T& s, const T& c2, const T& m) {
    return s * carlson_RF(c2, T(1.0) - m * s * s, T(1.0));
}

/// E(phi|m) from s = sin(phi) and c2 = cos^2(phi).
template <Scalar T>
T ellip_Einc_sc(const T& s, const T& c2, const T& m) {
    const T d = T(1.0) - m * s * s;
    return s * carlson_RF(c2, d, T(1.0)) - m * s * s * s * carlson_RD(c2, d, T(1.0)) / T(3.0);
}

namespace detail {

template <Scalar T>
void check_amplitude(const T& phi, const T& m) {
    if (!(phi >= T(0.0)) || phi > pi_v<T>() / T(2.0) * (T(1.0) + T(4.0 * scalar_traits<T>::unit_roundoff)))
        throw ConfigError("incomplete elliptic integral: amplitude must lie in [0, pi/2]");
    if (!(m >= T(0.0)) || !(m < T(1.0))) throw ConfigError("incomplete elliptic integral: need 0 <= m < 1");
}

}  // namespace detail

/// Incomplete integral of the first kind, amplitude phi in [0, pi/2].
template <Scalar T>
T ellip_F(const T& phi, const T& m) {
    detail::check_amplitude(phi, m);
    const T s = sin(phi), c = cos(phi);
    return ellip_F_sc(s, c * c, m);
}

/// Incomplete integral of the second kind, amplitude phi in [0, pi/2].
template <Scalar T>
T ellip_Einc(const T& phi, const T& m) {
    detail::check_amplitude(phi, m);
    const T s = sin(phi), c = cos(phi);
    return ellip_Einc_sc(s, c * c, m);
}

/// cot(pi w) + 4 sum_n q^{2n}/(1-q^{2n}) sin(2 n pi w), q = exp(-pi tau), and
/// its derivative in w. Requires |Im w| < tau.
template <Scalar T>
struct ZetaSeries {
    Complex<T> value;
    Complex<T> derivative;
    int terms = 0;
};

template <Scalar T>
ZetaSeries<T> periodic_zeta_series(const Complex<T>& w, const T& tau) {
    if (!(tau > T(0.0))) throw ConfigError("periodic_zeta_series: tau must be positive");
    if (!(abs(w.im) < tau)) throw ConfigError("periodic_zeta_series: |Im w| must be below tau");
    const T pi = pi_v<T>();
    const T u(scalar_traits<T>::unit_roundoff);
    const T q2 = exp(T(-2.0) * pi * tau);
    const Complex<T> a = exp(Complex<T>(T(0.0), T(2.0) * pi) * w);  // e^{2 pi i w}
    const Complex<T> rp = a * q2;
    const Complex<T> rm = q2 / a;
    const Complex<T> ct = cot(w * pi);
    ZetaSeries<T> r;
    Complex<T> s, ds;
    Complex<T> pp = rp, pm = rm;
    T q2n = q2;
    for (int n = 1;; ++n) {
        if (n > 20000) throw NumericError("periodic_zeta_series: series too slow, |Im w| too close to tau");
        const T den = T(1.0) - q2n;
        // 4 q^{2n}/(1-q^{2n}) sin(2 n pi w) = -2i q^{2n} (a^n - a^{-n}) / (1-q^{2n}).
        const Complex<T> dif = (pp - pm) / den;
        const Complex<T> sm = (pp + pm) / den;
        s += Complex<T>(dif.im, -dif.re) * T(2.0);
        ds += sm * (T(4.0) * pi * T(n));
        r.terms = n;
        if (abs(pp) + abs(pm) < u * (abs(s) + abs(ct) + T(1e-300))) break;
        pp *= rp;
        pm *= rm;
        q2n *= q2;
    }
    r.value = ct + s;
    r.derivative = (Complex<T>(T(1.0)) + ct * ct) * (-pi) + ds;
    return r;
}

/// Quasi-period eta_1 with zeta(z + 1) = zeta(z) + 2 eta_1.
template <Scalar T>
T weierstrass_eta1(const T& tau) {
    if (!(tau > T(0.0))) throw ConfigError("weierstrass_eta1: tau must be positive");
    const T pi = pi_v<T>();
    const T u(scalar_traits<T>::unit_roundoff);
    const T q2 = exp(T(-2.0) * pi * tau);
    T s(0.0), q2n = q2;
    for (int n = 1; n < 100000; ++n) {
        const T t = T(n) * q2n / (T(1.0) - q2n);
        s += t;
        if (t < u * (s + T(1e-300))) break;
        q2n *= q2;
    }
    return pi * pi / T(6.0) * (T(1.0) - T(24.0) * s);
}

namespace detail {

template <Scalar T>
struct LatticeReduction {
    Complex<T> z0;
    long j = 0;
    long k = 0;
};

template <Scalar T>
LatticeReduction<T> reduce_lattice(const Complex<T>& z, const T& tau) {
    LatticeReduction<T> r;
    const double kk = std::round(to_double(z.im / tau));
    const T im0 = z.im - T(kk) * tau;
    const double jj = std::round(to_double(z.re));
    r.z0 = {z.re - T(jj), im0};
    r.j = static_cast<long>(jj);
    r.k = static_cast<long>(kk);
    return r;
}

template <Scalar T>
void check_pole(const Complex<T>& z0) {
    const T d = abs(z0);
    if (d < T(100.0 * scalar_traits<T>::unit_roundoff))
        throw ConfigError("weierstrass_zeta: argument lies on the lattice (distance " + to_string(to_double(d)) + ")");
}

}  // namespace detail

/// Weierstrass zeta with periods 1 and i tau.
template <Scalar T>
Complex<T> weierstrass_zeta(const Complex<T>& z, const T& tau) {
    const auto r = detail::reduce_lattice(z, tau);
    detail::check_pole(r.z0);
    const T pi = pi_v<T>();
    const T eta1 = weierstrass_eta1(tau);
    const Complex<T> base = r.z0 * (T(2.0) * eta1) + periodic_zeta_series(r.z0, tau).value * pi;
    // zeta(z + j + k i tau) = zeta(z) + 2 j eta_1 + k (2 i tau eta_1 - 2 pi i).
    const Complex<T> shift{T(2.0) * T(static_cast<double>(r.j)) * eta1,
                           T(static_cast<double>(r.k)) * (T(2.0) * tau * eta1 - T(2.0) * pi)};
    return base + shift;
}

/// zeta'(z) = -wp(z).
template <Scalar T>
Complex<T> weierstrass_zeta_prime(const Complex<T>& z, const T& tau) {
    const auto r = detail::reduce_lattice(z, tau);
    detail::check_pole(r.z0);
    return Complex<T>(T(2.0) * weierstrass_eta1(tau)) + periodic_zeta_series(r.z0, tau).derivative * pi_v<T>();
}

}  // namespace hcont
