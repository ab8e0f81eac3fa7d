/// \file matrix.hpp
/// Small dense matrix type and the factorizations the solvers need.
#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcont/complex.hpp"
#include "hcont/errors.hpp"

namespace hcont {

/// Row-major dense matrix with value semantics.
template <class E>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, E fill = E{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = E(1);
        return m;
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    E& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    const E& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<E> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const E> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    std::span<const E> data() const noexcept { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<E> data_;
};

template <Scalar T>
using CMatrix = Matrix<Complex<T>>;

template <Scalar T>
using CVector = std::vector<Complex<T>>;

template <Scalar T>
T frobenius_norm(const CMatrix<T>& a) {
    T s(0.0);
    for (const auto& v : a.data()) s += norm(v);
    return sqrt(s);
}

template <Scalar T>
CMatrix<T> multiply(const CMatrix<T>& a, const CMatrix<T>& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("multiply: shape mismatch");
    CMatrix<T> c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex<T> aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

template <Scalar T>
CMatrix<T> adjoint(const CMatrix<T>& a) {
    CMatrix<T> r(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(j, i) = conj(a(i, j));
    return r;
}

template <Scalar T>
CVector<T> apply(const CMatrix<T>& a, std::span<const Complex<T>> x) {
    CVector<T> y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Complex<T> s;
        const auto r = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) s += r[j] * x[j];
        y[i] = s;
    }
    return y;
}

/// Hermitian inner product (x, y) = sum x_j conj(y_j).
template <Scalar T>
Complex<T> inner(std::span<const Complex<T>> x, std::span<const Complex<T>> y) {
    Complex<T> s;
    for (std::size_t j = 0; j < x.size(); ++j) s += x[j] * conj(y[j]);
    return s;
}

template <Scalar T>
T norm2(std::span<const Complex<T>> x) {
    T s(0.0);
    for (const auto& v : x) s += norm(v);
    return sqrt(s);
}

/// LDL* factorization of a Hermitian positive definite matrix.
template <Scalar T>
class HermitianLDL {
public:
    explicit HermitianLDL(CMatrix<T> a) : f_(std::move(a)), d_(f_.rows()) {
        const std::size_t n = f_.rows();
        min_pivot_ = T(0.0);
        for (std::size_t j = 0; j < n; ++j) {
            T dj = f_(j, j).re;
            for (std::size_t k = 0; k < j; ++k) dj -= d_[k] * norm(f_(j, k));
            if (!(dj > T(0.0))) {
                throw NumericError("LDL* factorization lost positivity at pivot " + std::to_string(j) +
                                   " (pivot " + to_string(to_double(dj)) + ")");
            }
            d_[j] = dj;
            if (j == 0 || dj < min_pivot_) min_pivot_ = dj;
            for (std::size_t i = j + 1; i < n; ++i) {
                Complex<T> s = f_(i, j);
                for (std::size_t k = 0; k < j; ++k) s -= f_(i, k) * d_[k] * conj(f_(j, k));
                f_(i, j) = s / dj;
            }
        }
    }

    [[nodiscard]] CVector<T> solve(std::span<const Complex<T>> b) const {
        const std::size_t n = f_.rows();
        CVector<T> y(b.begin(), b.end());
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < i; ++k) y[i] -= f_(i, k) * y[k];
        for (std::size_t i = 0; i < n; ++i) y[i] /= d_[i];
        for (std::size_t i = n; i-- > 0;)
            for (std::size_t k = i + 1; k < n; ++k) y[i] -= conj(f_(k, i)) * y[k];
        return y;
    }

    [[nodiscard]] const T& min_pivot() const noexcept { return min_pivot_; }

private:
    CMatrix<T> f_;
    std::vector<T> d_;
    T min_pivot_;
};

/// LU factorization with partial pivoting for general complex systems.
template <Scalar T>
class LU {
public:
    explicit LU(CMatrix<T> a) : f_(std::move(a)), piv_(f_.rows()) {
        const std::size_t n = f_.rows();
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = k;
            T best = abs(f_(k, k));
            for (std::size_t i = k + 1; i < n; ++i) {
                const T v = abs(f_(i, k));
                if (v > best) { best = v; p = i; }
            }
            if (best == T(0.0)) throw NumericError("LU: singular matrix at column " + std::to_string(k));
            piv_[k] = p;
            if (p != k)
                for (std::size_t j = 0; j < n; ++j) std::swap(f_(k, j), f_(p, j));
            const Complex<T> inv = Complex<T>(T(1.0)) / f_(k, k);
            for (std::size_t i = k + 1; i < n; ++i) {
                const Complex<T> m = f_(i, k) * inv;
                f_(i, k) = m;
                auto ri = f_.row(i);
                const auto rk = f_.row(k);
                for (std::size_t j = k + 1; j < n; ++j) ri[j] -= m * rk[j];
            }
        }
    }

    [[nodiscard]] CVector<T> solve(std::span<const Complex<T>> b) const {
        const std::size_t n = f_.rows();
        CVector<T> y(b.begin(), b.end());
        for (std::size_t k = 0; k < n; ++k) std::swap(y[k], y[piv_[k]]);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < i; ++k) y[i] -= f_(i, k) * y[k];
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t k = i + 1; k < n; ++k) y[i] -= f_(i, k) * y[k];
            y[i] /= f_(i, i);
        }
        return y;
    }

private:
    CMatrix<T> f_;
    std::vector<std::size_t> piv_;
};

}  // namespace hcont
