/// \file complex.hpp
/// Complex numbers over either scalar mode. std::complex is only specified
/// for the built-in floating types, so double-double needs its own type.
#pragma once

#include <ostream>

#include "hcont/xprec.hpp"

namespace hcont {

template <Scalar T>
struct Complex {
    T re{};
    T im{};

    constexpr Complex() = default;
    constexpr Complex(T r) : re(r) {}  // NOLINT: real embedding
    constexpr Complex(T r, T i) : re(r), im(i) {}
    constexpr Complex(double r) requires(!std::is_same_v<T, double>) : re(r) {}  // NOLINT
    constexpr Complex(double r, double i) requires(!std::is_same_v<T, double>) : re(r), im(i) {}
    constexpr Complex(int r) : re(static_cast<double>(r)) {}  // NOLINT

    Complex& operator+=(const Complex& b) { re += b.re; im += b.im; return *this; }
    Complex& operator-=(const Complex& b) { re -= b.re; im -= b.im; return *this; }
    Complex& operator*=(const Complex& b) { return *this = *this * b; }
    Complex& operator/=(const Complex& b) { return *this = *this / b; }
    Complex& operator*=(const T& b) { re *= b; im *= b; return *this; }
    Complex& operator/=(const T& b) { re /= b; im /= b; return *this; }

    friend Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
    friend Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
    friend Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
    friend Complex operator*(const Complex& a, const Complex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend Complex operator*(const Complex& a, const T& b) { return {a.re * b, a.im * b}; }
    friend Complex operator*(const T& a, const Complex& b) { return {a * b.re, a * b.im}; }
    friend Complex operator/(const Complex& a, const T& b) { return {a.re / b, a.im / b}; }
    friend Complex operator/(const Complex& a, const Complex& b) {
        // Scale by the larger component of b to avoid overflow in |b|^2.
        const T s = abs(b.re) > abs(b.im) ? abs(b.re) : abs(b.im);
        const Complex bs{b.re / s, b.im / s};
        const T d = bs.re * bs.re + bs.im * bs.im;
        const Complex as{a.re / s, a.im / s};
        return {(as.re * bs.re + as.im * bs.im) / d, (as.im * bs.re - as.re * bs.im) / d};
    }
    friend Complex operator/(const T& a, const Complex& b) { return Complex(a) / b; }

    friend bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }
};

template <Scalar T>
constexpr Complex<T> conj(const Complex<T>& a) { return {a.re, -a.im}; }

template <Scalar T>
T norm(const Complex<T>& a) { return a.re * a.re + a.im * a.im; }

template <Scalar T>
T abs(const Complex<T>& a) {
    const T ar = abs(a.re);
    const T ai = abs(a.im);
    const T m = ar > ai ? ar : ai;
    if (m == T(0.0)) return T(0.0);
    const T x = ar / m;
    const T y = ai / m;
    return m * sqrt(x * x + y * y);
}

template <Scalar T>
T arg(const Complex<T>& a) { return atan2(a.im, a.re); }

template <Scalar T>
Complex<T> polar(const T& r, const T& theta) { return {r * cos(theta), r * sin(theta)}; }

template <Scalar T>
Complex<T> exp(const Complex<T>& a) {
    const T e = exp(a.re);
    return {e * cos(a.im), e * sin(a.im)};
}

/// Principal logarithm, Im in (-pi, pi].
template <Scalar T>
Complex<T> log(const Complex<T>& a) { return {log(abs(a)), arg(a)}; }

/// Principal square root, Re >= 0.
template <Scalar T>
Complex<T> sqrt(const Complex<T>& a) {
    if (a.re == T(0.0) && a.im == T(0.0)) return {};
    const T r = abs(a);
    if (a.re >= T(0.0)) {
        const T t = sqrt((r + a.re) * T(0.5));
        return {t, a.im / (t * T(2.0))};
    }
    const T t = sqrt((r - a.re) * T(0.5));
    return {abs(a.im) / (t * T(2.0)), a.im >= T(0.0) ? t : -t};
}

template <Scalar T>
Complex<T> sin(const Complex<T>& a) { return {sin(a.re) * cosh(a.im), cos(a.re) * sinh(a.im)}; }

template <Scalar T>
Complex<T> cos(const Complex<T>& a) { return {cos(a.re) * cosh(a.im), -(sin(a.re) * sinh(a.im))}; }

template <Scalar T>
Complex<T> sinh(const Complex<T>& a) { return {sinh(a.re) * cos(a.im), cosh(a.re) * sin(a.im)}; }

template <Scalar T>
Complex<T> cosh(const Complex<T>& a) { return {cosh(a.re) * cos(a.im), sinh(a.re) * sin(a.im)}; }

/// cot(a) = i (e^{2ia} + 1)/(e^{2ia} - 1), stable for large |Im a|.
template <Scalar T>
Complex<T> cot(const Complex<T>& a) {
    const Complex<T> i{T(0.0), T(1.0)};
    if (a.im > T(0.0)) {
        const Complex<T> e = exp(Complex<T>{T(-2.0) * a.im, T(2.0) * a.re});
        return i * (e + T(1.0)) / (e - T(1.0));
    }
    const Complex<T> e = exp(Complex<T>{T(2.0) * a.im, T(-2.0) * a.re});
    return -(i * (e + T(1.0)) / (e - T(1.0)));
}

template <Scalar T>
Complex<T> pow(const Complex<T>& a, int n) {
    Complex<T> result{T(1.0)};
    Complex<T> base = a;
    unsigned m = n < 0 ? static_cast<unsigned>(-n) : static_cast<unsigned>(n);
    while (m) {
        if (m & 1U) result *= base;
        base *= base;
        m >>= 1U;
    }
    return n < 0 ? Complex<T>{T(1.0)} / result : result;
}

template <Scalar T>
constexpr Complex<T> imag_unit() { return {T(0.0), T(1.0)}; }

template <Scalar T>
bool isfinite(const Complex<T>& a) { return isfinite(a.re) && isfinite(a.im); }

template <Scalar T, Scalar U>
Complex<U> complex_cast(const Complex<T>& a) {
    if constexpr (std::is_same_v<T, U>) {
        return a;
    } else if constexpr (std::is_same_v<U, double>) {
        return {to_double(a.re), to_double(a.im)};
    } else {
        return {U(a.re), U(a.im)};
    }
}

template <Scalar T>
std::ostream& operator<<(std::ostream& os, const Complex<T>& a) {
    return os << '(' << to_string(a.re) << ',' << to_string(a.im) << ')';
}

}  // namespace hcont
