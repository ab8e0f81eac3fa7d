/// \file operator.hpp
/// Nystrom matrices of the curve operator with kernel i/(2 pi (tau - conj tau'))
/// and the right-hand side p_z(tau) = i/(tau - conj z).
#pragma once

#include <ostream>
#include <string>

#include "hcont/geometry.hpp"
#include "hcont/matrix.hpp"

namespace hcont {

enum class Symmetrization { plain, sqrt_weight };

/// Plain form: A_jk = K(tau_j, tau_k) w_k.
/// Sqrt-weight form: A_jk = sqrt(w_j) K(tau_j, tau_k) sqrt(w_k), Hermitian.
template <Scalar T>
struct OperatorMatrix {
    CMatrix<T> entries;
    Symmetrization symmetrization = Symmetrization::sqrt_weight;
    CurveDiscretization<T> curve;

    [[nodiscard]] std::size_t dim() const noexcept { return entries.rows(); }

    [[nodiscard]] T trace() const {
        T s(0.0);
        for (std::size_t j = 0; j < dim(); ++j) s += entries(j, j).re;
        return s;
    }
};

/// Samples of p_z on the nodes, optionally scaled by sqrt(w_j).
template <Scalar T>
struct RHSVector {
    CVector<T> values;
    Complex<T> z;
    bool sqrt_weighted = true;
};

namespace detail {

template <Scalar T>
std::vector<T> sqrt_weights(const CurveDiscretization<T>& d) {
    std::vector<T> s;
    s.reserve(d.size());
    for (const auto& w : d.arc_weights) s.push_back(sqrt(w));
    return s;
}

}  // namespace detail

/// Nystrom matrix of the curve operator. Hermitian by construction in the
/// sqrt-weight form (only the upper triangle is evaluated).
template <Scalar T>
OperatorMatrix<T> assemble_K(const CurveDiscretization<T>& disc,
                             Symmetrization sym = Symmetrization::sqrt_weight) {
    const std::size_t n = disc.size();
    if (n == 0) throw ConfigError("assemble_K: empty discretization");
    for (const auto& p : disc.points)
        if (!(p.im > T(0.0))) throw ConfigError("assemble_K: curve nodes must lie strictly in the upper half-plane");
    OperatorMatrix<T> op{CMatrix<T>(n, n), sym, disc};
    const T inv2pi = T(1.0) / (T(2.0) * pi_v<T>());
    const Complex<T> c{T(0.0), inv2pi};
    const auto sw = detail::sqrt_weights(disc);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j; k < n; ++k) {
            const Complex<T> kern = c / (disc.points[j] - conj(disc.points[k]));
            if (sym == Symmetrization::sqrt_weight) {
                const Complex<T> v = kern * (sw[j] * sw[k]);
                op.entries(j, k) = v;
                op.entries(k, j) = conj(v);
            } else {
                op.entries(j, k) = kern * disc.arc_weights[k];
                op.entries(k, j) = conj(kern) * disc.arc_weights[j];
            }
        }
        if (sym == Symmetrization::sqrt_weight) op.entries(j, j).im = T(0.0);
    }
    return op;
}

/// Frobenius norms of M A - A M* - R and of R, with M = diag(tau_j) and
/// R_jk = i w_k / (2 pi); plain form only.
template <Scalar T>
struct DisplacementReport {
    T residual;
    T rhs_norm;
    [[nodiscard]] T relative() const { return residual / rhs_norm; }
};

template <Scalar T>
DisplacementReport<T> displacement_residual(const OperatorMatrix<T>& a) {
    if (a.symmetrization != Symmetrization::plain)
        throw ConfigError("displacement_residual: operator must be in plain form");
    const auto& pts = a.curve.points;
    const T inv2pi = T(1.0) / (T(2.0) * pi_v<T>());
    T res(0.0), rn(0.0);
    for (std::size_t j = 0; j < a.dim(); ++j) {
        for (std::size_t k = 0; k < a.dim(); ++k) {
            const Complex<T> r{T(0.0), a.curve.arc_weights[k] * inv2pi};
            const Complex<T> d = pts[j] * a.entries(j, k) - a.entries(j, k) * conj(pts[k]) - r;
            res += norm(d);
            rn += norm(r);
        }
    }
    return {sqrt(res), sqrt(rn)};
}

/// Nystrom matrix of the convolution operator with kernel i/(2 pi (x - y + 2ih))
/// on (a,b), sqrt-weight form.
template <Scalar T>
OperatorMatrix<T> assemble_Kh_boundary(const T& a, const T& b, const T& h, const QuadratureRule<T>& rule) {
    if (!(h > T(0.0))) throw ConfigError("assemble_Kh_boundary: h must be positive");
    if (!(b > a)) throw ConfigError("assemble_Kh_boundary: need a < b");
    CurveDiscretization<T> d;
    d.source_rule = rule;
    const T mid = (a + b) * T(0.5);
    const T hw = (b - a) * T(0.5);
    for (std::size_t i = 0; i < rule.order(); ++i) {
        d.points.push_back({mid + hw * rule.nodes[i], T(0.0)});
        d.arc_weights.push_back(hw * rule.weights[i]);
    }
    const std::size_t n = d.size();
    OperatorMatrix<T> op{CMatrix<T>(n, n), Symmetrization::sqrt_weight, d};
    const Complex<T> c{T(0.0), T(1.0) / (T(2.0) * pi_v<T>())};
    const auto sw = detail::sqrt_weights(d);
    const Complex<T> shift{T(0.0), T(2.0) * h};
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j; k < n; ++k) {
            const Complex<T> v = c / (Complex<T>(d.points[j].re - d.points[k].re) + shift) * (sw[j] * sw[k]);
            op.entries(j, k) = v;
            op.entries(k, j) = conj(v);
        }
        op.entries(j, j).im = T(0.0);
    }
    return op;
}

/// p_z(tau_j) = i / (tau_j - conj z), scaled by sqrt(w_j) when requested.
template <Scalar T>
RHSVector<T> rhs_vector(const CurveDiscretization<T>& disc, const Complex<T>& z, bool sqrt_weighted = true) {
    if (!(z.im > T(0.0))) throw ConfigError("rhs_vector: z must lie in the upper half-plane");
    RHSVector<T> r{CVector<T>(disc.size()), z, sqrt_weighted};
    const Complex<T> i = imag_unit<T>();
    for (std::size_t j = 0; j < disc.size(); ++j) {
        Complex<T> v = i / (disc.points[j] - conj(z));
        if (sqrt_weighted) v *= sqrt(disc.arc_weights[j]);
        r.values[j] = v;
    }
    return r;
}

/// Debug dump: CSV rows "j,k,re,im".
template <Scalar T>
void write_matrix_csv(std::ostream& os, const OperatorMatrix<T>& a) {
    os << "j,k,re,im\n";
    for (std::size_t j = 0; j < a.dim(); ++j)
        for (std::size_t k = 0; k < a.dim(); ++k)
            os << j << ',' << k << ',' << to_string(a.entries(j, k).re) << ',' << to_string(a.entries(j, k).im) << '\n';
}

}  // namespace hcont
