/// \file geometry.hpp
/// Constraint curves, their quadrature discretizations, curve literals, and
/// the half-strip conformal transplant.
#pragma once

#include <algorithm>
#include <charconv>
#include <limits>
#include <locale>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hcont/complex.hpp"
#include "hcont/errors.hpp"
#include "hcont/quadrature.hpp"

namespace hcont {

/// Horizontal segment [a,b] + ih strictly inside the upper half-plane.
struct SegmentShifted {
    double a = -1.0;
    double b = 1.0;
    double h = 1.0;
};

/// Piecewise-linear curve through vertices in the open upper half-plane.
struct Polyline {
    std::vector<Complex<double>> vertices;
};

/// Interval [a,b] on the real axis (boundary case).
struct BoundaryInterval {
    double a = -1.0;
    double b = 1.0;
};

/// Curve specification; orientation is left to right along the parameter.
class CurveSpec {
public:
    using Kind = std::variant<SegmentShifted, Polyline, BoundaryInterval>;

    CurveSpec(Kind kind) : kind_(std::move(kind)) { validate(); }  // NOLINT
    CurveSpec(SegmentShifted c) : CurveSpec(Kind(c)) {}              // NOLINT
    CurveSpec(Polyline c) : CurveSpec(Kind(std::move(c))) {}         // NOLINT
    CurveSpec(BoundaryInterval c) : CurveSpec(Kind(c)) {}            // NOLINT

    [[nodiscard]] const Kind& kind() const noexcept { return kind_; }
    [[nodiscard]] bool is_interior() const noexcept { return !std::holds_alternative<BoundaryInterval>(kind_); }

    [[nodiscard]] double arc_length() const {
        return std::visit(
            [](const auto& c) -> double {
                using C = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<C, Polyline>) {
                    double s = 0.0;
                    for (std::size_t k = 0; k + 1 < c.vertices.size(); ++k)
                        s += to_double(abs(c.vertices[k + 1] - c.vertices[k]));
                    return s;
                } else {
                    return c.b - c.a;
                }
            },
            kind_);
    }

    /// Distance in the imaginary direction from the real axis (segments only).
    [[nodiscard]] double height() const {
        if (const auto* s = std::get_if<SegmentShifted>(&kind_)) return s->h;
        throw ConfigError("curve height is defined for shifted segments only");
    }

    /// Canonical literal, inverse of parse_curve.
    [[nodiscard]] std::string literal() const {
        std::ostringstream os;
        os.imbue(std::locale::classic());
        os.precision(17);
        std::visit(
            [&os](const auto& c) {
                using C = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<C, SegmentShifted>) {
                    os << "segment:" << c.a << ',' << c.b << "@h=" << c.h;
                } else if constexpr (std::is_same_v<C, BoundaryInterval>) {
                    os << "interval:" << c.a << ',' << c.b;
                } else {
                    os << "polyline:";
                    for (std::size_t k = 0; k < c.vertices.size(); ++k) {
                        if (k) os << ',';
                        os << '(' << c.vertices[k].re << ',' << c.vertices[k].im << ')';
                    }
                }
            },
            kind_);
        return os.str();
    }

private:
    void validate() const {
        std::visit(
            [](const auto& c) {
                using C = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<C, SegmentShifted>) {
                    if (!(c.h > 0.0)) throw ConfigError("segment: h must be positive");
                    if (!(c.b > c.a)) throw ConfigError("segment: need a < b (zero-length curve)");
                } else if constexpr (std::is_same_v<C, BoundaryInterval>) {
                    if (!(c.b > c.a)) throw ConfigError("interval: need a < b (zero-length curve)");
                } else {
                    if (c.vertices.size() < 2) throw ConfigError("polyline: need at least two vertices");
                    for (const auto& v : c.vertices)
                        if (!(v.im > 0.0)) throw ConfigError("polyline: vertices must lie in the open upper half-plane");
                    for (std::size_t k = 0; k + 1 < c.vertices.size(); ++k)
                        if (to_double(abs(c.vertices[k + 1] - c.vertices[k])) == 0.0)
                            throw ConfigError("polyline: repeated vertex (zero-length leg)");
                }
            },
            kind_);
    }

    Kind kind_;
};

/// Node points tau_j on the curve with arc-length weights w_j = |dtau|.
template <Scalar T>
struct CurveDiscretization {
    std::vector<Complex<T>> points;
    std::vector<T> arc_weights;
    QuadratureRule<T> source_rule;

    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }

    [[nodiscard]] T length() const {
        T s(0.0);
        for (const auto& w : arc_weights) s += w;
        return s;
    }
};

namespace detail {

template <Scalar T>
void append_leg(CurveDiscretization<T>& d, const Complex<T>& p0, const Complex<T>& p1, const QuadratureRule<T>& rule) {
    const Complex<T> mid = (p0 + p1) * T(0.5);
    const Complex<T> half = (p1 - p0) * T(0.5);
    const T scale = abs(half);
    for (std::size_t i = 0; i < rule.order(); ++i) {
        d.points.push_back(mid + half * rule.nodes[i]);
        d.arc_weights.push_back(scale * rule.weights[i]);
    }
}

}  // namespace detail

/// Affine image of the rule on each leg of the curve (one copy per leg for
/// polylines; corners are not refined).
template <Scalar T>
CurveDiscretization<T> discretize(const CurveSpec& curve, const QuadratureRule<T>& rule) {
    if (rule.order() == 0) throw ConfigError("discretize: empty quadrature rule");
    CurveDiscretization<T> d;
    d.source_rule = rule;
    std::visit(
        [&](const auto& c) {
            using C = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<C, SegmentShifted>) {
                // Real and imaginary parts kept separate so h is exact in dd.
                const T mid = (T(c.a) + T(c.b)) * T(0.5);
                const T hw = (T(c.b) - T(c.a)) * T(0.5);
                for (std::size_t i = 0; i < rule.order(); ++i) {
                    d.points.push_back({mid + hw * rule.nodes[i], T(c.h)});
                    d.arc_weights.push_back(hw * rule.weights[i]);
                }
            } else if constexpr (std::is_same_v<C, BoundaryInterval>) {
                const T mid = (T(c.a) + T(c.b)) * T(0.5);
                const T hw = (T(c.b) - T(c.a)) * T(0.5);
                for (std::size_t i = 0; i < rule.order(); ++i) {
                    d.points.push_back({mid + hw * rule.nodes[i], T(0.0)});
                    d.arc_weights.push_back(hw * rule.weights[i]);
                }
            } else {
                for (std::size_t k = 0; k + 1 < c.vertices.size(); ++k) {
                    detail::append_leg(d, complex_cast<double, T>(c.vertices[k]),
                                       complex_cast<double, T>(c.vertices[k + 1]), rule);
                }
            }
        },
        curve.kind());
    return d;
}

/// Shortest distance from a point to the curve.
inline double distance_to_curve(const CurveSpec& curve, const Complex<double>& z) {
    auto seg_dist = [](Complex<double> p0, Complex<double> p1, Complex<double> q) {
        const Complex<double> d = p1 - p0;
        double t = ((q.re - p0.re) * d.re + (q.im - p0.im) * d.im) / norm(d);
        t = std::clamp(t, 0.0, 1.0);
        return abs(q - (p0 + d * t));
    };
    return std::visit(
        [&](const auto& c) -> double {
            using C = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<C, SegmentShifted>) {
                return seg_dist({c.a, c.h}, {c.b, c.h}, z);
            } else if constexpr (std::is_same_v<C, BoundaryInterval>) {
                return seg_dist({c.a, 0.0}, {c.b, 0.0}, z);
            } else {
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k + 1 < c.vertices.size(); ++k)
                    best = std::min(best, seg_dist(c.vertices[k], c.vertices[k + 1], z));
                return best;
            }
        },
        curve.kind());
}

namespace detail {

inline double parse_double(std::string_view s, std::string_view what) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || s.empty())
        throw ConfigError("invalid number '" + std::string(s) + "' in " + std::string(what));
    return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '(') ++depth;
        if (s[i] == ')') --depth;
        if (s[i] == sep && depth == 0) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    out.push_back(s.substr(start));
    return out;
}

}  // namespace detail

/// Parses "segment:a,b@h=H", "interval:a,b" or "polyline:(x,y),(x,y),...".
inline CurveSpec parse_curve(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw ConfigError("curve literal needs 'kind:' prefix: " + std::string(text));
    const std::string_view kind = text.substr(0, colon);
    const std::string_view body = text.substr(colon + 1);
    if (kind == "segment") {
        const auto at = body.find("@h=");
        if (at == std::string_view::npos) throw ConfigError("segment literal needs '@h=': " + std::string(text));
        const auto ends = detail::split(body.substr(0, at), ',');
        if (ends.size() != 2) throw ConfigError("segment literal needs two endpoints: " + std::string(text));
        return SegmentShifted{detail::parse_double(ends[0], text), detail::parse_double(ends[1], text),
                              detail::parse_double(body.substr(at + 3), text)};
    }
    if (kind == "interval") {
        const auto ends = detail::split(body, ',');
        if (ends.size() != 2) throw ConfigError("interval literal needs two endpoints: " + std::string(text));
        return BoundaryInterval{detail::parse_double(ends[0], text), detail::parse_double(ends[1], text)};
    }
    if (kind == "polyline") {
        Polyline p;
        for (auto item : detail::split(body, ',')) {
            while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
            if (item.size() < 2 || item.front() != '(' || item.back() != ')')
                throw ConfigError("polyline vertex must be '(x,y)': " + std::string(item));
            const auto xy = detail::split(item.substr(1, item.size() - 2), ',');
            if (xy.size() != 2) throw ConfigError("polyline vertex must be '(x,y)': " + std::string(item));
            p.vertices.push_back({detail::parse_double(xy[0], text), detail::parse_double(xy[1], text)});
        }
        return p;
    }
    throw ConfigError("unknown curve kind '" + std::string(kind) + "'");
}

/// Parses "x+yi", "x-yi", "yi", "x" (also accepts 'j').
inline Complex<double> parse_complex(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (s.empty()) throw ConfigError("empty complex literal");
    if (s.back() != 'i' && s.back() != 'j') return {detail::parse_double(s, "complex literal"), 0.0};
    const std::string_view body = s.substr(0, s.size() - 1);
    // Split at the last sign that is not an exponent sign or leading sign.
    std::size_t pos = std::string_view::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            pos = k;
            break;
        }
    }
    auto imag_of = [](std::string_view t) {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        return detail::parse_double(t, "complex literal");
    };
    if (pos == std::string_view::npos) return {0.0, imag_of(body)};
    return {detail::parse_double(body.substr(0, pos), "complex literal"), imag_of(body.substr(pos))};
}

/// Conformal map of the half-strip {Re z > 0, |Im z| < 1} onto the upper
/// half-plane, zeta = i sinh(pi z / 2): [-i, i] goes to [1, -1] and the
/// positive real axis to the positive imaginary axis.
template <Scalar T>
Complex<T> halfstrip_map(const Complex<T>& z) {
    const Complex<T> w = sinh(z * (pi_v<T>() / T(2.0)));
    return {-w.im, w.re};
}

/// Exponent (2/pi) arccot(sinh(pi x / 2)) of the half-strip transplant.
template <Scalar T>
T halfstrip_exponent(const T& x) {
    if (!(x > T(0.0))) throw ConfigError("halfstrip_exponent: x must be positive");
    const T s = sinh(x * (pi_v<T>() / T(2.0)));
    return T(2.0) / pi_v<T>() * atan(T(1.0) / s);
}

}  // namespace hcont
