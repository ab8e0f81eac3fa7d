/// \file spectral.hpp
/// Hermitian eigendecomposition by cyclic complex Jacobi rotations, spectral
/// projections of p_z, and eigenvalue diagnostics.
#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hcont/fit.hpp"
#include "hcont/operator.hpp"

namespace hcont {

/// Eigenpairs of the sqrt-weight operator, sorted by decreasing eigenvalue.
/// Column n of `vectors` holds sqrt(w_j) e_n(tau_j).
template <Scalar T>
struct SpectralData {
    std::vector<T> lambdas;
    CMatrix<T> vectors;
    CVector<T> pis;
    std::optional<Complex<T>> z;
    std::size_t rank_cutoff = 0;
    T noise_floor;
    CurveDiscretization<T> curve;
    T offdiag_residual;
    int sweeps = 0;

    [[nodiscard]] std::size_t size() const noexcept { return lambdas.size(); }
    [[nodiscard]] bool has_projections() const noexcept { return !pis.empty(); }
};

struct JacobiOptions {
    int max_sweeps = 60;
    /// Stop when the off-diagonal Frobenius norm drops below tol * ||A||_F;
    /// zero selects 1e-30 (dd) or 1e-14 (f64).
    double tol = 0.0;
};

/// Cyclic two-sided Jacobi for a Hermitian matrix.
template <Scalar T>
SpectralData<T> eigendecompose(const OperatorMatrix<T>& op, JacobiOptions opts = {}) {
    if (op.symmetrization != Symmetrization::sqrt_weight)
        throw ConfigError("eigendecompose: operator must be in sqrt-weight (Hermitian) form");
    const std::size_t n = op.dim();
    CMatrix<T> a = op.entries;
    CMatrix<T> v = CMatrix<T>::identity(n);
    const double tol = opts.tol > 0.0 ? opts.tol : (std::is_same_v<T, DDReal> ? 1e-30 : 1e-14);
    const T anorm = frobenius_norm(a);
    const T u(scalar_traits<T>::unit_roundoff);

    auto offdiag = [&]() {
        T s(0.0);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) s += norm(a(j, k));
        return sqrt(T(2.0) * s);
    };

    int sweep = 0;
    T off = offdiag();
    while (off > T(tol) * anorm) {
        if (sweep == opts.max_sweeps) {
            throw NumericError("eigendecompose: no convergence after " + std::to_string(sweep) +
                               " sweeps (off-diagonal residual " + to_string(to_double(off / anorm)) + " relative)");
        }
        ++sweep;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex<T> apq = a(p, q);
                const T r = abs(apq);
                if (r == T(0.0)) continue;
                const T app = a(p, p).re;
                const T aqq = a(q, q).re;
                if (r <= u * sqrt(abs(app * aqq))) {
                    a(p, q) = Complex<T>{};
                    a(q, p) = Complex<T>{};
                    continue;
                }
                const Complex<T> ph = apq / r;  // e^{i phi}
                const Complex<T> phc = conj(ph);
                const T zeta = (aqq - app) / (T(2.0) * r);
                const T t = (zeta >= T(0.0) ? T(1.0) : T(-1.0)) / (abs(zeta) + sqrt(T(1.0) + zeta * zeta));
                const T c = T(1.0) / sqrt(T(1.0) + t * t);
                const T s = t * c;
                // A <- U* A U with U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]].
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const Complex<T> akp = a(k, p);
                    const Complex<T> akq = a(k, q) * phc;
                    const Complex<T> nkp = akp * c - akq * s;
                    const Complex<T> nkq = akp * s + akq * c;
                    a(k, p) = nkp;
                    a(k, q) = nkq;
                    a(p, k) = conj(nkp);
                    a(q, k) = conj(nkq);
                }
                a(p, p) = Complex<T>(app - t * r);
                a(q, q) = Complex<T>(aqq + t * r);
                a(p, q) = Complex<T>{};
                a(q, p) = Complex<T>{};
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex<T> vkp = v(k, p);
                    const Complex<T> vkq = v(k, q) * phc;
                    v(k, p) = vkp * c - vkq * s;
                    v(k, q) = vkp * s + vkq * c;
                }
            }
        }
        off = offdiag();
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i).re > a(j, j).re; });

    SpectralData<T> sd;
    sd.curve = op.curve;
    sd.vectors = CMatrix<T>(n, n);
    for (std::size_t m = 0; m < n; ++m) {
        sd.lambdas.push_back(a(order[m], order[m]).re);
        for (std::size_t k = 0; k < n; ++k) sd.vectors(k, m) = v(k, order[m]);
    }
    sd.noise_floor = u * anorm;
    sd.rank_cutoff = n;
    for (std::size_t m = 0; m < n; ++m) {
        if (sd.lambdas[m] < T(10.0) * sd.noise_floor) {
            sd.rank_cutoff = m;
            break;
        }
    }
    sd.offdiag_residual = off / anorm;
    sd.sweeps = sweep;
    return sd;
}

/// pi_n = (p_z, e_n)_{L^2(Gamma)}, computed as the sqrt-weight inner product.
template <Scalar T>
SpectralData<T> project_rhs(SpectralData<T> s, const RHSVector<T>& p) {
    if (!p.sqrt_weighted) throw ConfigError("project_rhs: right-hand side must be sqrt-weight scaled");
    if (p.values.size() != s.size()) throw ConfigError("project_rhs: discretization mismatch");
    s.pis.assign(s.size(), Complex<T>{});
    for (std::size_t m = 0; m < s.size(); ++m) {
        Complex<T> acc;
        for (std::size_t j = 0; j < s.size(); ++j) acc += p.values[j] * conj(s.vectors(j, m));
        s.pis[m] = acc;
    }
    s.z = p.z;
    return s;
}

/// Nystrom extension e_n(z) = (1/lambda_n) sum_k w_k i/(2 pi (z - conj tau_k)) e_n(tau_k).
template <Scalar T>
Complex<T> eigenfunction_at(const SpectralData<T>& s, std::size_t n, const Complex<T>& z) {
    const Complex<T> c{T(0.0), T(1.0) / (T(2.0) * pi_v<T>())};
    Complex<T> acc;
    for (std::size_t k = 0; k < s.size(); ++k)
        acc += c / (z - conj(s.curve.points[k])) * sqrt(s.curve.arc_weights[k]) * s.vectors(k, n);
    return acc / s.lambdas[n];
}

/// || A - V diag(lambda) V* ||_F / ||A||_F.
template <Scalar T>
T reconstruction_error(const OperatorMatrix<T>& op, const SpectralData<T>& s) {
    const std::size_t n = op.dim();
    T err(0.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            Complex<T> acc;
            for (std::size_t m = 0; m < n; ++m) acc += s.vectors(j, m) * s.lambdas[m] * conj(s.vectors(k, m));
            err += norm(op.entries(j, k) - acc);
        }
    }
    return sqrt(err) / frobenius_norm(op.entries);
}

/// max |<v_i, v_j> - delta_ij| over i, j < limit.
template <Scalar T>
T orthonormality_error(const SpectralData<T>& s, std::size_t limit) {
    T worst(0.0);
    for (std::size_t i = 0; i < limit; ++i) {
        for (std::size_t j = i; j < limit; ++j) {
            Complex<T> acc;
            for (std::size_t k = 0; k < s.size(); ++k) acc += s.vectors(k, i) * conj(s.vectors(k, j));
            if (i == j) acc -= Complex<T>(T(1.0));
            const T e = abs(acc);
            if (e > worst) worst = e;
        }
    }
    return worst;
}

/// Partial sums of |pi_n|^2 / lambda_n toward pi / Im z.
template <Scalar T>
struct SumRuleReport {
    std::vector<T> partial;
    T target;
    T gap;
    /// Geometric-tail bound built from the last resolvable terms.
    T tail_bound;
    [[nodiscard]] T relative_gap() const { return gap / target; }
};

template <Scalar T>
SumRuleReport<T> sum_rule(const SpectralData<T>& s) {
    if (!s.has_projections()) throw ConfigError("sum_rule: projections missing");
    SumRuleReport<T> r;
    T acc(0.0);
    std::vector<T> terms;
    for (std::size_t n = 0; n < s.rank_cutoff; ++n) {
        terms.push_back(norm(s.pis[n]) / s.lambdas[n]);
        acc += terms.back();
        r.partial.push_back(acc);
    }
    r.target = pi_v<T>() / s.z->im;
    r.gap = r.target - acc;
    // Largest ratio of consecutive terms over the last four, doubled for safety.
    r.tail_bound = T(0.0);
    if (terms.size() >= 5) {
        T ratio(0.0);
        for (std::size_t k = terms.size() - 4; k < terms.size(); ++k) {
            const T q = terms[k] / terms[k - 1];
            if (q > ratio) ratio = q;
        }
        if (ratio < T(1.0)) r.tail_bound = T(2.0) * terms.back() * ratio / (T(1.0) - ratio);
        else r.tail_bound = T(std::numeric_limits<double>::infinity());
    }
    return r;
}

/// Least-squares decay rates of ln lambda_n and ln |pi_n|^2 over a window of
/// 1-based indices [first, last].
struct DecayFit {
    double alpha_hat = 0.0;
    double beta_hat = 0.0;
    double r2_lambda = 0.0;
    double r2_pi = 0.0;
    std::size_t first = 0;
    std::size_t last = 0;
    [[nodiscard]] bool in_band() const { return alpha_hat < beta_hat && beta_hat < 2.0 * alpha_hat; }
};

inline DecayFit decay_fit_values(std::span<const double> lambdas, std::span<const double> pi_sq, std::size_t first,
                                 std::size_t last) {
    if (first < 1 || last > lambdas.size() || last < first + 7)
        throw ConfigError("decay_fit: window must lie in [1, n] with at least 8 points");
    std::vector<double> x, yl, yp;
    for (std::size_t n = first; n <= last; ++n) {
        x.push_back(static_cast<double>(n));
        yl.push_back(std::log(lambdas[n - 1]));
        if (!pi_sq.empty()) yp.push_back(std::log(pi_sq[n - 1]));
    }
    DecayFit f;
    f.first = first;
    f.last = last;
    const LinearFit fl = fit_line(x, yl);
    f.alpha_hat = -fl.slope;
    f.r2_lambda = fl.r2;
    if (!yp.empty()) {
        const LinearFit fp = fit_line(x, yp);
        f.beta_hat = -fp.slope;
        f.r2_pi = fp.r2;
    }
    if (!(f.alpha_hat > 0.0)) throw NumericError("decay_fit: non-positive eigenvalue decay rate");
    return f;
}

template <Scalar T>
DecayFit decay_fit(const SpectralData<T>& s, std::size_t first = 0, std::size_t last = 0) {
    if (first == 0) first = 5;
    if (last == 0) last = s.rank_cutoff > 3 ? s.rank_cutoff - 3 : 0;
    if (last > s.rank_cutoff) throw ConfigError("decay_fit: window exceeds rank cutoff");
    std::vector<double> lam, pis;
    for (std::size_t n = 0; n < s.rank_cutoff; ++n) {
        lam.push_back(to_double(s.lambdas[n]));
        if (s.has_projections()) pis.push_back(to_double(norm(s.pis[n])));
    }
    return decay_fit_values(lam, pis, first, last);
}

/// Largest J with lambda_J >= eps^2 (1-based; 0 when lambda_1 < eps^2).
template <Scalar T>
std::size_t switchover_index(const SpectralData<T>& s, const T& eps) {
    const T e2 = eps * eps;
    std::size_t j = 0;
    for (std::size_t n = 0; n < s.rank_cutoff; ++n)
        if (s.lambdas[n] >= e2) j = n + 1;
    return j;
}

/// CSV rows "n,lambda,ln_lambda,re_pi,im_pi,abs_pi_sq" up to the rank cutoff.
template <Scalar T>
void write_spectrum_csv(std::ostream& os, const SpectralData<T>& s) {
    os << "n,lambda,ln_lambda,re_pi,im_pi,abs_pi_sq\n";
    for (std::size_t n = 0; n < s.rank_cutoff; ++n) {
        const Complex<T> p = s.has_projections() ? s.pis[n] : Complex<T>{};
        os << n + 1 << ',' << to_string(s.lambdas[n]) << ',' << to_string(log(s.lambdas[n])) << ','
           << to_string(p.re) << ',' << to_string(p.im) << ',' << to_string(norm(p)) << '\n';
    }
}

}  // namespace hcont
