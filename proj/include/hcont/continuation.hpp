/// \file continuation.hpp
/// Solutions of (K + eps^2) u = p_z by eigen-expansion and by direct
/// factorization, the continuation bound, its two dual branches, and the
/// dual-certificate function Phi(eta).
#pragma once

#include <optional>
#include <string>

#include "hcont/spectral.hpp"

namespace hcont {

/// Treatment of the unresolved spectral tail n > rank_cutoff.
enum class TailClosure {
    none,
    /// The missing mass pi/Im z - sum |pi_n|^2/lambda_n is assigned to modes
    /// with lambda_n << eps^2.
    sum_rule,
};

enum class SolveMethod { spectral, direct };

template <Scalar T>
struct ContinuationSolution {
    T eps;
    Complex<T> z;
    SolveMethod method = SolveMethod::spectral;
    CVector<T> u_coeffs;
    CVector<T> u_nodes;
    Complex<T> u_at_z;
    T norm_L2_Gamma;
    T norm_H2;
    T M_value;
    /// Unresolved sum-rule mass used by the tail closure.
    T tail_mass;
    /// Bound on the L^2(Gamma)-norm^2 contribution neglected by the closure.
    T truncation_bound;
};

namespace detail {

template <Scalar T>
T bound_value(const T& uz, const T& eps, const T& l2, const T& h2) {
    const T a = T(1.0) / h2;
    const T b = eps / l2;
    return uz * (a < b ? a : b);
}

template <Scalar T>
void check_eps_floor(const T& eps, const T& noise_floor) {
    if (!(eps > T(0.0))) throw ConfigError("eps must be positive");
    if (eps * eps < T(1e-2) * noise_floor) {
        throw NumericError("eps^2 = " + to_string(to_double(eps * eps)) + " is below the precision floor " +
                           to_string(to_double(T(1e-2) * noise_floor)) + " of mode " +
                           std::string(scalar_traits<T>::name) + "; rerun with --mode dd or a larger eps");
    }
}

}  // namespace detail

/// u_n = pi_n / (lambda_n + eps^2) and the eigen-sum formulas for u(z) and
/// the two norms.
template <Scalar T>
ContinuationSolution<T> solve_spectral(const SpectralData<T>& s, const T& eps,
                                       TailClosure closure = TailClosure::sum_rule) {
    if (!s.has_projections()) throw ConfigError("solve_spectral: projections missing");
    detail::check_eps_floor(eps, s.noise_floor);
    const T e2 = eps * eps;
    const std::size_t r = s.rank_cutoff;
    ContinuationSolution<T> sol;
    sol.eps = eps;
    sol.z = *s.z;
    sol.method = SolveMethod::spectral;
    sol.u_coeffs.resize(r);
    T s_uz(0.0), s_l2(0.0), s_h2(0.0), mass(0.0);
    for (std::size_t n = 0; n < r; ++n) {
        const T lam = s.lambdas[n];
        const T d = lam + e2;
        const T p2 = norm(s.pis[n]);
        sol.u_coeffs[n] = s.pis[n] / d;
        s_uz += p2 / (lam * d);
        s_l2 += p2 / (d * d);
        s_h2 += p2 / (lam * d * d);
        mass += p2 / lam;
    }
    sol.tail_mass = T(0.0);
    sol.truncation_bound = T(0.0);
    if (closure == TailClosure::sum_rule) {
        T tail = pi_v<T>() / sol.z.im - mass;
        if (tail < T(0.0)) tail = T(0.0);
        sol.tail_mass = tail;
        s_uz += tail / e2;
        s_h2 += tail / (e2 * e2);
        sol.truncation_bound = T(10.0) * s.noise_floor * tail / (e2 * e2);
    }
    sol.u_at_z = Complex<T>(s_uz / (T(2.0) * pi_v<T>()));
    sol.norm_L2_Gamma = sqrt(s_l2);
    sol.norm_H2 = sqrt(s_h2);
    sol.M_value = detail::bound_value(sol.u_at_z.re, eps, sol.norm_L2_Gamma, sol.norm_H2);

    sol.u_nodes.assign(s.size(), Complex<T>{});
    for (std::size_t j = 0; j < s.size(); ++j) {
        Complex<T> acc;
        for (std::size_t n = 0; n < r; ++n) acc += sol.u_coeffs[n] * s.vectors(j, n);
        sol.u_nodes[j] = acc / sqrt(s.curve.arc_weights[j]);
    }
    return sol;
}

/// LDL* solve of (A + eps^2) x = sqrt(w) p and the extension
/// 2 pi eps^2 u(z) = pi/Im z - (u, p_z)_{L^2(Gamma)}. The H^2 norm follows
/// from 2 pi Re u(z) = ||u||^2_{L^2(Gamma)} + eps^2 ||u||^2_{H^2}.
template <Scalar T>
ContinuationSolution<T> solve_direct(const OperatorMatrix<T>& a, const RHSVector<T>& p, const T& eps) {
    if (a.symmetrization != Symmetrization::sqrt_weight || !p.sqrt_weighted)
        throw ConfigError("solve_direct: expects sqrt-weight operator and right-hand side");
    if (p.values.size() != a.dim()) throw ConfigError("solve_direct: discretization mismatch");
    if (!(eps > T(0.0))) throw ConfigError("eps must be positive");
    const T e2 = eps * eps;
    CMatrix<T> m = a.entries;
    for (std::size_t j = 0; j < a.dim(); ++j) m(j, j).re += e2;
    const HermitianLDL<T> ldl(std::move(m));
    const CVector<T> x = ldl.solve(p.values);

    ContinuationSolution<T> sol;
    sol.eps = eps;
    sol.z = p.z;
    sol.method = SolveMethod::direct;
    sol.u_nodes.resize(a.dim());
    for (std::size_t j = 0; j < a.dim(); ++j) sol.u_nodes[j] = x[j] / sqrt(a.curve.arc_weights[j]);
    const Complex<T> up = inner<T>(x, p.values);
    const T two_pi = T(2.0) * pi_v<T>();
    sol.u_at_z = (Complex<T>(pi_v<T>() / p.z.im) - up) / (two_pi * e2);
    sol.norm_L2_Gamma = norm2<T>(x);
    T h2sq = (two_pi * sol.u_at_z.re - sol.norm_L2_Gamma * sol.norm_L2_Gamma) / e2;
    if (h2sq < T(0.0)) h2sq = T(0.0);
    sol.norm_H2 = sqrt(h2sq);
    sol.tail_mass = T(0.0);
    sol.truncation_bound = T(0.0);
    sol.M_value = detail::bound_value(sol.u_at_z.re, eps, sol.norm_L2_Gamma, sol.norm_H2);
    return sol;
}

/// The bound and its two upper branches obtained with eta = eps^2.
template <Scalar T>
struct BoundReport {
    T M;
    /// 3/2 M, the rigorous worst-case bound.
    T rigorous;
    /// u(z) / ||u||_{H^2}.
    T branch_H2;
    /// eps u(z) / ||u||_{L^2(Gamma)}.
    T branch_L2;
    /// u(z) / (2 ||u||_{H^2}) + eps^2 ||u||_{H^2} / (2 pi).
    T UB1;
    /// eps u(z) / (2 ||u||_{L^2}) + eps ||u||_{L^2} / (2 pi).
    T UB2;
    [[nodiscard]] T branch_ratio() const { return branch_L2 / branch_H2; }
};

template <Scalar T>
BoundReport<T> bound_M(const ContinuationSolution<T>& sol) {
    const T uz = sol.u_at_z.re;
    const T two_pi = T(2.0) * pi_v<T>();
    BoundReport<T> b;
    b.branch_H2 = uz / sol.norm_H2;
    b.branch_L2 = sol.eps * uz / sol.norm_L2_Gamma;
    b.M = b.branch_H2 < b.branch_L2 ? b.branch_H2 : b.branch_L2;
    b.rigorous = T(1.5) * b.M;
    b.UB1 = uz / (T(2.0) * sol.norm_H2) + sol.eps * sol.eps * sol.norm_H2 / two_pi;
    b.UB2 = sol.eps * uz / (T(2.0) * sol.norm_L2_Gamma) + sol.eps * sol.norm_L2_Gamma / two_pi;
    return b;
}

/// Phi(eta) = sum |pi|^2/(lambda+eta)^2 / sum |pi|^2/(lambda (lambda+eta)^2).
template <Scalar T>
T phi(const SpectralData<T>& s, const T& eta, TailClosure closure = TailClosure::sum_rule) {
    if (!(eta > T(0.0))) throw ConfigError("phi: eta must be positive");
    T num(0.0), den(0.0), mass(0.0);
    for (std::size_t n = 0; n < s.rank_cutoff; ++n) {
        const T lam = s.lambdas[n];
        const T d = lam + eta;
        const T p2 = norm(s.pis[n]);
        num += p2 / (d * d);
        den += p2 / (lam * d * d);
        mass += p2 / lam;
    }
    if (closure == TailClosure::sum_rule) {
        T tail = pi_v<T>() / s.z->im - mass;
        if (tail > T(0.0)) den += tail / (eta * eta);
    }
    return num / den;
}

/// Phi(infinity) = sum |pi_n|^2 / sum |pi_n|^2/lambda_n.
template <Scalar T>
T phi_infinity(const SpectralData<T>& s, TailClosure closure = TailClosure::sum_rule) {
    T num(0.0), den(0.0);
    for (std::size_t n = 0; n < s.rank_cutoff; ++n) {
        num += norm(s.pis[n]);
        den += norm(s.pis[n]) / s.lambdas[n];
    }
    if (closure == TailClosure::sum_rule) {
        const T full = pi_v<T>() / s.z->im;
        if (full > den) den = full;
    }
    return num / den;
}

/// Multipliers for the default choice eta = eps^2 and the root eta* of
/// Phi(eta) = eps^2 (nu from ||(K+eta)^{-1} p||_{H^2}).
template <Scalar T>
struct DualCertificate {
    T eta_default;
    std::optional<T> eta_star;
    T mu;
    T nu;
    T phi_value;
    std::string diagnostic;
    [[nodiscard]] std::optional<T> ratio() const {
        if (!eta_star) return std::nullopt;
        return *eta_star / eta_default;
    }
};

template <Scalar T>
DualCertificate<T> eta_star(const SpectralData<T>& s, const T& eps, TailClosure closure = TailClosure::sum_rule) {
    const T e2 = eps * eps;
    DualCertificate<T> c;
    c.eta_default = e2;
    auto nu_of = [&](const T& eta) {
        T den(0.0), mass(0.0);
        for (std::size_t n = 0; n < s.rank_cutoff; ++n) {
            const T d = s.lambdas[n] + eta;
            den += norm(s.pis[n]) / (s.lambdas[n] * d * d);
            mass += norm(s.pis[n]) / s.lambdas[n];
        }
        if (closure == TailClosure::sum_rule) {
            const T tail = pi_v<T>() / s.z->im - mass;
            if (tail > T(0.0)) den += tail / (eta * eta);
        }
        return sqrt(den);
    };
    c.nu = nu_of(e2);
    c.mu = e2 * c.nu;
    c.phi_value = phi(s, e2, closure);

    const T sup = phi_infinity(s, closure);
    if (!(e2 < sup)) {
        c.diagnostic = "no root: eps^2 >= Phi(infinity) = " + to_string(to_double(sup));
        return c;
    }
    T lo = s.noise_floor > T(0.0) ? s.noise_floor * T(1e-4) : T(1e-300);
    T hi = s.lambdas.front() * T(1e8);
    if (!(phi(s, lo, closure) < e2)) {
        c.diagnostic = "no root: Phi at the lower bracket already exceeds eps^2";
        return c;
    }
    if (!(phi(s, hi, closure) > e2)) {
        c.diagnostic = "no root: Phi stays below eps^2 on the bracket";
        return c;
    }
    // Bisection in log(eta).
    for (int it = 0; it < 400; ++it) {
        const T mid = sqrt(lo * hi);
        if (phi(s, mid, closure) < e2) lo = mid;
        else hi = mid;
        if (hi / lo - T(1.0) < T(64.0 * scalar_traits<T>::unit_roundoff)) break;
    }
    c.eta_star = sqrt(lo * hi);
    return c;
}

}  // namespace hcont
