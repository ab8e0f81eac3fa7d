/// \file xprec.hpp
/// Double-word ("double-double") real arithmetic with about 31 significant
/// decimal digits, plus the scalar traits that let every kernel run in either
/// binary64 or double-double mode.
#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace hcont {

// Bring the binary64 overloads into scope so unqualified calls inside
// templates resolve for both scalar modes.
using std::abs;
using std::atan;
using std::atan2;
using std::ceil;
using std::cos;
using std::cosh;
using std::exp;
using std::floor;
using std::isfinite;
using std::isnan;
using std::ldexp;
using std::log;
using std::pow;
using std::round;
using std::sin;
using std::sinh;
using std::sqrt;
using std::tanh;

namespace detail {

inline double two_sum(double a, double b, double& err) noexcept {
    const double s = a + b;
    const double bb = s - a;
    err = (a - (s - bb)) + (b - bb);
    return s;
}

inline double quick_two_sum(double a, double b, double& err) noexcept {
    const double s = a + b;
    err = b - (s - a);
    return s;
}

#if defined(__FMA__) || defined(FP_FAST_FMA)
inline double two_prod(double a, double b, double& err) noexcept {
    const double p = a * b;
    err = std::fma(a, b, -p);
    return p;
}
#else
inline void split(double a, double& hi, double& lo) noexcept {
    constexpr double splitter = 134217729.0;  // 2^27 + 1
    const double t = splitter * a;
    hi = t - (t - a);
    lo = a - hi;
}

inline double two_prod(double a, double b, double& err) noexcept {
    const double p = a * b;
    double ah, al, bh, bl;
    split(a, ah, al);
    split(b, bh, bl);
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    return p;
}
#endif

}  // namespace detail

/// Unevaluated sum hi + lo of two binary64 numbers with |lo| <= ulp(hi)/2.
class DDReal {
public:
    constexpr DDReal() noexcept = default;
    constexpr DDReal(double x) noexcept : hi_(x) {}  // NOLINT: implicit widening is exact
    constexpr DDReal(int x) noexcept : hi_(static_cast<double>(x)) {}  // NOLINT

    /// Builds a normalized value from an arbitrary pair (exact sum).
    static DDReal from_pair(double hi, double lo) noexcept {
        double err;
        const double s = detail::two_sum(hi, lo, err);
        return raw(s, err);
    }

    /// Wraps a pair that is already normalized.
    static constexpr DDReal raw(double hi, double lo) noexcept {
        DDReal r;
        r.hi_ = hi;
        r.lo_ = lo;
        return r;
    }

    [[nodiscard]] constexpr double hi() const noexcept { return hi_; }
    [[nodiscard]] constexpr double lo() const noexcept { return lo_; }
    [[nodiscard]] constexpr double to_double() const noexcept { return hi_ + lo_; }
    explicit constexpr operator double() const noexcept { return hi_ + lo_; }

    DDReal& operator+=(const DDReal& b) noexcept { return *this = *this + b; }
    DDReal& operator-=(const DDReal& b) noexcept { return *this = *this - b; }
    DDReal& operator*=(const DDReal& b) noexcept { return *this = *this * b; }
    DDReal& operator/=(const DDReal& b) noexcept { return *this = *this / b; }

    friend constexpr DDReal operator-(const DDReal& a) noexcept { return raw(-a.hi_, -a.lo_); }
    friend constexpr DDReal operator+(const DDReal& a) noexcept { return a; }

    friend DDReal operator+(const DDReal& a, const DDReal& b) noexcept {
        double s2, t2;
        double s1 = detail::two_sum(a.hi_, b.hi_, s2);
        if (!std::isfinite(s1)) return raw(s1, 0.0);
        const double t1 = detail::two_sum(a.lo_, b.lo_, t2);
        s2 += t1;
        s1 = detail::quick_two_sum(s1, s2, s2);
        s2 += t2;
        s1 = detail::quick_two_sum(s1, s2, s2);
        return raw(s1, s2);
    }

    friend DDReal operator-(const DDReal& a, const DDReal& b) noexcept { return a + (-b); }

    friend DDReal operator*(const DDReal& a, const DDReal& b) noexcept {
        double p2;
        double p1 = detail::two_prod(a.hi_, b.hi_, p2);
        if (!std::isfinite(p1)) return raw(p1, 0.0);
        p2 += a.hi_ * b.lo_ + a.lo_ * b.hi_;
        p1 = detail::quick_two_sum(p1, p2, p2);
        return raw(p1, p2);
    }

    friend DDReal operator*(const DDReal& a, double b) noexcept {
        double p2;
        double p1 = detail::two_prod(a.hi_, b, p2);
        if (!std::isfinite(p1)) return raw(p1, 0.0);
        p2 += a.lo_ * b;
        p1 = detail::quick_two_sum(p1, p2, p2);
        return raw(p1, p2);
    }
    friend DDReal operator*(double a, const DDReal& b) noexcept { return b * a; }

    friend DDReal operator/(const DDReal& a, const DDReal& b) noexcept {
        const double q1 = a.hi_ / b.hi_;
        if (!std::isfinite(q1) || q1 == 0.0) return raw(q1, 0.0);
        DDReal r = a - b * q1;
        const double q2 = r.hi_ / b.hi_;
        r = r - b * q2;
        const double q3 = r.hi_ / b.hi_;
        double e;
        const double s = detail::quick_two_sum(q1, q2, e);
        return raw(s, e) + DDReal(q3);
    }

    friend bool operator==(const DDReal& a, const DDReal& b) noexcept {
        return a.hi_ == b.hi_ && a.lo_ == b.lo_;
    }
    friend std::partial_ordering operator<=>(const DDReal& a, const DDReal& b) noexcept {
        if (auto c = a.hi_ <=> b.hi_; c != 0) return c;
        return a.lo_ <=> b.lo_;
    }

private:
    double hi_ = 0.0;
    double lo_ = 0.0;
};

namespace dd_const {
inline constexpr DDReal pi = DDReal::raw(3.141592653589793116e+00, 1.224646799147353207e-16);
inline constexpr DDReal half_pi = DDReal::raw(1.570796326794896558e+00, 6.123233995736766036e-17);
inline constexpr DDReal two_pi = DDReal::raw(6.283185307179586232e+00, 2.449293598294706414e-16);
inline constexpr DDReal ln2 = DDReal::raw(6.931471805599452862e-01, 2.319046813846299558e-17);
}  // namespace dd_const

inline bool isfinite(const DDReal& a) noexcept { return std::isfinite(a.hi()) && std::isfinite(a.lo()); }
inline bool isnan(const DDReal& a) noexcept { return std::isnan(a.hi()) || std::isnan(a.lo()); }
inline DDReal abs(const DDReal& a) noexcept { return a.hi() < 0.0 ? -a : a; }
inline DDReal ldexp(const DDReal& a, int e) noexcept {
    return DDReal::raw(std::ldexp(a.hi(), e), std::ldexp(a.lo(), e));
}

inline DDReal floor(const DDReal& a) noexcept {
    const double hi = std::floor(a.hi());
    if (hi != a.hi()) return DDReal(hi);
    return DDReal::from_pair(hi, std::floor(a.lo()));
}

inline DDReal round(const DDReal& a) noexcept { return floor(a + DDReal(0.5)); }
inline DDReal ceil(const DDReal& a) noexcept { return -floor(-a); }

inline DDReal sqr(const DDReal& a) noexcept { return a * a; }

inline DDReal sqrt(const DDReal& a) noexcept {
    if (a.hi() == 0.0) return DDReal(0.0);
    if (a.hi() < 0.0) return DDReal(std::numeric_limits<double>::quiet_NaN());
    if (!std::isfinite(a.hi())) return a;
    const double x = 1.0 / std::sqrt(a.hi());
    const double ax = a.hi() * x;
    const DDReal ax2 = DDReal(ax) * DDReal(ax);
    return DDReal::from_pair(ax, 0.0) + DDReal((a - ax2).hi() * (x * 0.5));
}

namespace detail {

// exp(r) - 1 for |r| <= ln2/2 via scaling by 2^-10 and repeated squaring.
inline DDReal expm1_reduced(const DDReal& r) noexcept {
    const DDReal s = ldexp(r, -10);
    DDReal term = s;
    DDReal sum = s;
    for (int n = 2; n < 20; ++n) {
        term = term * s / DDReal(n);
        sum += term;
        if (std::abs(term.hi()) < 1e-36 * std::abs(sum.hi())) break;
    }
    for (int i = 0; i < 10; ++i) sum = sum * (DDReal(2.0) + sum);
    return sum;
}

}  // namespace detail

inline DDReal exp(const DDReal& a) noexcept {
    if (a.hi() > 709.78) return DDReal(std::numeric_limits<double>::infinity());
    if (a.hi() < -745.0) return DDReal(0.0);
    if (a.hi() == 0.0) return DDReal(1.0);
    const double k = std::nearbyint(a.hi() / dd_const::ln2.hi());
    const DDReal r = a - dd_const::ln2 * k;
    return ldexp(DDReal(1.0) + detail::expm1_reduced(r), static_cast<int>(k));
}

inline DDReal expm1(const DDReal& a) noexcept {
    if (std::abs(a.hi()) < 0.34) return detail::expm1_reduced(a);
    return exp(a) - DDReal(1.0);
}

inline DDReal log(const DDReal& a) noexcept {
    if (a.hi() <= 0.0) {
        return DDReal(a.hi() == 0.0 ? -std::numeric_limits<double>::infinity()
                                    : std::numeric_limits<double>::quiet_NaN());
    }
    if (!std::isfinite(a.hi())) return a;
    const DDReal y(std::log(a.hi()));
    return y + a * exp(-y) - DDReal(1.0);
}

namespace detail {

// Taylor series for sin and cos on |r| <= pi/4.
inline void sincos_reduced(const DDReal& r, DDReal& s, DDReal& c) noexcept {
    const DDReal r2 = r * r;
    DDReal term = r;
    s = r;
    for (int n = 1; n < 30; ++n) {
        term = -term * r2 / DDReal(static_cast<double>((2 * n) * (2 * n + 1)));
        s += term;
        if (std::abs(term.hi()) < 1e-36) break;
    }
    term = DDReal(1.0);
    c = DDReal(1.0);
    for (int n = 1; n < 30; ++n) {
        term = -term * r2 / DDReal(static_cast<double>((2 * n - 1) * (2 * n)));
        c += term;
        if (std::abs(term.hi()) < 1e-36) break;
    }
}

}  // namespace detail

inline void sincos(const DDReal& a, DDReal& s, DDReal& c) noexcept {
    if (!isfinite(a)) {
        s = c = DDReal(std::numeric_limits<double>::quiet_NaN());
        return;
    }
    const double kq = std::nearbyint(a.hi() / dd_const::half_pi.hi());
    const DDReal r = a - dd_const::half_pi * kq;
    DDReal sr, cr;
    detail::sincos_reduced(r, sr, cr);
    const long q = static_cast<long>(std::fmod(kq, 4.0) + 4.0) % 4;
    switch (q) {
        case 0: s = sr; c = cr; break;
        case 1: s = cr; c = -sr; break;
        case 2: s = -sr; c = -cr; break;
        default: s = -cr; c = sr; break;
    }
}

inline DDReal sin(const DDReal& a) noexcept {
    DDReal s, c;
    sincos(a, s, c);
    return s;
}

inline DDReal cos(const DDReal& a) noexcept {
    DDReal s, c;
    sincos(a, s, c);
    return c;
}

inline DDReal atan2(const DDReal& y, const DDReal& x) noexcept {
    if (x.hi() == 0.0 && y.hi() == 0.0) return DDReal(0.0);
    const DDReal t0(std::atan2(y.hi(), x.hi()));
    DDReal s, c;
    sincos(t0, s, c);
    // tan(theta - t0) for the residual angle; its cube is below dd resolution.
    const DDReal num = y * c - x * s;
    const DDReal den = x * c + y * s;
    const DDReal d = num / den;
    return t0 + d - d * d * d / DDReal(3.0);
}

inline DDReal atan(const DDReal& x) noexcept { return atan2(x, DDReal(1.0)); }

inline DDReal asin(const DDReal& x) noexcept {
    return atan2(x, sqrt((DDReal(1.0) - x) * (DDReal(1.0) + x)));
}

inline DDReal sinh(const DDReal& a) noexcept {
    if (std::abs(a.hi()) < 0.3) {
        const DDReal e = expm1(a);
        return e * (DDReal(1.0) + DDReal(1.0) / (DDReal(1.0) + e)) * DDReal(0.5);
    }
    const DDReal e = exp(a);
    return (e - DDReal(1.0) / e) * DDReal(0.5);
}

inline DDReal cosh(const DDReal& a) noexcept {
    const DDReal e = exp(a);
    return (e + DDReal(1.0) / e) * DDReal(0.5);
}

inline DDReal tanh(const DDReal& a) noexcept {
    if (a.hi() > 40.0) return DDReal(1.0);
    if (a.hi() < -40.0) return DDReal(-1.0);
    return sinh(a) / cosh(a);
}

inline DDReal pow(const DDReal& a, const DDReal& b) noexcept { return exp(b * log(a)); }

inline DDReal pow(const DDReal& a, int n) noexcept {
    DDReal result(1.0);
    DDReal base = a;
    unsigned m = n < 0 ? static_cast<unsigned>(-n) : static_cast<unsigned>(n);
    while (m) {
        if (m & 1U) result *= base;
        base *= base;
        m >>= 1U;
    }
    return n < 0 ? DDReal(1.0) / result : result;
}

using std::asin;
using std::expm1;

/// Compile-time description of a scalar mode.
template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
    static constexpr std::string_view name = "f64";
    static constexpr double unit_roundoff = 0x1p-53;
    static constexpr int print_digits = 17;
};

template <>
struct scalar_traits<DDReal> {
    static constexpr std::string_view name = "dd";
    static constexpr double unit_roundoff = 0x1p-106;
    static constexpr int print_digits = 33;
};

template <class T>
concept Scalar = requires { scalar_traits<T>::unit_roundoff; };

template <Scalar T>
[[nodiscard]] constexpr double to_double(const T& x) noexcept {
    return static_cast<double>(x);
}

template <Scalar T>
[[nodiscard]] constexpr T pi_v() noexcept {
    if constexpr (std::is_same_v<T, DDReal>) {
        return dd_const::pi;
    } else {
        return std::numbers::pi;
    }
}

namespace detail {
using wide_float = boost::multiprecision::cpp_bin_float_50;

inline wide_float widen(const DDReal& a) { return wide_float(a.hi()) + wide_float(a.lo()); }

inline DDReal narrow(const wide_float& w) {
    const double hi = w.convert_to<double>();
    if (!std::isfinite(hi)) return DDReal(hi);
    const double lo = wide_float(w - hi).convert_to<double>();
    return DDReal::from_pair(hi, lo);
}
}  // namespace detail

/// Decimal scientific notation with the mode's round-trip digit count.
inline std::string to_string(const DDReal& a, int digits = scalar_traits<DDReal>::print_digits) {
    if (!isfinite(a)) return std::isnan(a.hi()) ? "nan" : (a.hi() > 0 ? "inf" : "-inf");
    return detail::widen(a).str(digits, std::ios_base::scientific);
}

inline std::string to_string(double a, int digits = scalar_traits<double>::print_digits) {
    if (!std::isfinite(a)) return std::isnan(a) ? "nan" : (a > 0 ? "inf" : "-inf");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, a);
    return buf;
}

/// Parses a decimal literal (dot separator, locale independent).
template <Scalar T>
[[nodiscard]] T parse_scalar(std::string_view text) {
    try {
        const detail::wide_float w{std::string(text)};
        if constexpr (std::is_same_v<T, DDReal>) {
            return detail::narrow(w);
        } else {
            return w.convert_to<double>();
        }
    } catch (const std::exception&) {
        throw std::invalid_argument("not a decimal number: '" + std::string(text) + "'");
    }
}

inline std::ostream& operator<<(std::ostream& os, const DDReal& a) { return os << to_string(a); }

}  // namespace hcont
