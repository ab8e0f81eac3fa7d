/// \file quadrature.hpp
/// Gauss-Legendre rules at arbitrary order, composite and graded rules, and a
/// tanh-substitution trapezoid rule for endpoint-singular integrands on (-1,1).
#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "hcont/errors.hpp"
#include "hcont/xprec.hpp"

namespace hcont {

/// Nodes and positive weights of an interpolatory rule.
template <Scalar T>
struct QuadratureRule {
    std::vector<T> nodes;
    std::vector<T> weights;

    [[nodiscard]] std::size_t order() const noexcept { return nodes.size(); }

    [[nodiscard]] T weight_sum() const {
        T s(0.0);
        for (const auto& w : weights) s += w;
        return s;
    }
};

namespace detail {

/// P_n(x) and P_{n-1}(x) by the three-term recurrence.
template <Scalar T>
void legendre_pair(int n, const T& x, T& pn, T& pnm1) {
    T p0(1.0);
    T p1 = x;
    if (n == 0) {
        pn = p0;
        pnm1 = T(0.0);
        return;
    }
    for (int k = 1; k < n; ++k) {
        const T p2 = (T(2 * k + 1) * x * p1 - T(k) * p0) / T(k + 1);
        p0 = p1;
        p1 = p2;
    }
    pn = p1;
    pnm1 = p0;
}

inline std::shared_ptr<const QuadratureRule<DDReal>> gauss_legendre_dd(int n) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const QuadratureRule<DDReal>>> cache;
    {
        const std::lock_guard lock(mutex);
        if (auto it = cache.find(n); it != cache.end()) return it->second;
    }
    auto rule = std::make_shared<QuadratureRule<DDReal>>();
    rule->nodes.resize(n);
    rule->weights.resize(n);
    const int half = n / 2;
    for (int i = 0; i < half; ++i) {
        // Root i counted from the right end.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        bool converged = false;
        for (int it = 0; it < 100; ++it) {
            double pn, pm;
            legendre_pair<double>(n, x, pn, pm);
            const double dp = n * (x * pn - pm) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                converged = true;
                break;
            }
        }
        if (!converged) throw NumericError("gauss_legendre: root refinement failed at node " + std::to_string(i));
        DDReal xd(x);
        DDReal dp;
        for (int it = 0; it < 3; ++it) {
            DDReal pn, pm;
            legendre_pair<DDReal>(n, xd, pn, pm);
            dp = DDReal(n) * (xd * pn - pm) / (xd * xd - DDReal(1.0));
            const DDReal dx = pn / dp;
            xd -= dx;
            if (std::abs(dx.hi()) < 1e-33) break;
        }
        DDReal pn, pm;
        legendre_pair<DDReal>(n, xd, pn, pm);
        dp = DDReal(n) * (xd * pn - pm) / (xd * xd - DDReal(1.0));
        const DDReal w = DDReal(2.0) / ((DDReal(1.0) - xd * xd) * dp * dp);
        rule->nodes[n - 1 - i] = xd;
        rule->nodes[i] = -xd;
        rule->weights[n - 1 - i] = w;
        rule->weights[i] = w;
    }
    if (n % 2 == 1) {
        DDReal pn, pm;
        legendre_pair<DDReal>(n, DDReal(0.0), pn, pm);
        const DDReal dp = DDReal(n) * pm;  // P'_n(0) = n P_{n-1}(0)
        rule->nodes[half] = DDReal(0.0);
        rule->weights[half] = DDReal(2.0) / (dp * dp);
    }
    const std::lock_guard lock(mutex);
    return cache.emplace(n, std::move(rule)).first->second;
}

}  // namespace detail

/// N-point Gauss-Legendre rule on [-1,1]; nodes increasing.
template <Scalar T>
QuadratureRule<T> gauss_legendre(int n) {
    if (n < 1 || n > 2048) throw ConfigError("gauss_legendre: order must be in [1, 2048], got " + std::to_string(n));
    const auto dd = detail::gauss_legendre_dd(n);
    QuadratureRule<T> r;
    r.nodes.reserve(n);
    r.weights.reserve(n);
    for (int i = 0; i < n; ++i) {
        if constexpr (std::is_same_v<T, DDReal>) {
            r.nodes.push_back(dd->nodes[i]);
            r.weights.push_back(dd->weights[i]);
        } else {
            r.nodes.push_back(to_double(dd->nodes[i]));
            r.weights.push_back(to_double(dd->weights[i]));
        }
    }
    return r;
}

/// Gauss rule of the given order on every panel [b_k, b_{k+1}].
template <Scalar T>
QuadratureRule<T> composite_gauss(std::span<const T> breaks, int order) {
    if (breaks.size() < 2) throw ConfigError("composite_gauss: need at least two breakpoints");
    const auto base = gauss_legendre<T>(order);
    QuadratureRule<T> r;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const T mid = (breaks[k] + breaks[k + 1]) * T(0.5);
        const T hw = (breaks[k + 1] - breaks[k]) * T(0.5);
        if (!(hw > T(0.0))) throw ConfigError("composite_gauss: breakpoints must increase");
        for (int i = 0; i < order; ++i) {
            r.nodes.push_back(mid + hw * base.nodes[i]);
            r.weights.push_back(hw * base.weights[i]);
        }
    }
    return r;
}

/// Breakpoints on [-1,1]: uniform panels on [-1/2,1/2] and dyadic refinement
/// toward both endpoints, the last panel at each end of width 2^-(levels+1).
template <Scalar T>
std::vector<T> graded_breakpoints(int levels, int interior_panels = 2) {
    std::vector<T> right;
    T a(0.5);
    for (int k = 0; k < levels; ++k) {
        a = a + (T(1.0) - a) * T(0.5);
        right.push_back(a);
    }
    std::vector<T> b;
    b.push_back(T(-1.0));
    for (auto it = right.rbegin(); it != right.rend(); ++it) b.push_back(-*it);
    for (int k = 0; k <= interior_panels; ++k) b.push_back(T(-0.5) + T(k) / T(interior_panels));
    for (const auto& v : right) b.push_back(v);
    b.push_back(T(1.0));
    return b;
}

/// Trapezoid rule in t for x = tanh(t) on t in [-H, H]: exponentially
/// convergent for integrands analytic in t, including the oscillatory
/// endpoint behavior (1-x)^{i c}.
template <Scalar T>
struct TanhRule {
    std::vector<T> t;
    std::vector<T> nodes;
    std::vector<T> weights;
    /// 1 - x_j^2 = sech^2 t_j, kept separately to avoid cancellation near the ends.
    std::vector<T> one_minus_x2;
    T step;

    [[nodiscard]] std::size_t order() const noexcept { return nodes.size(); }
};

template <Scalar T>
TanhRule<T> tanh_rule(int n, double half_width = 18.0) {
    if (n < 3) throw ConfigError("tanh_rule: need at least 3 points");
    TanhRule<T> r;
    const T hwidth(half_width);
    r.step = T(2.0) * hwidth / T(n - 1);
    for (int j = 0; j < n; ++j) {
        const T t = -hwidth + r.step * T(j);
        const T c = cosh(t);
        const T sech2 = T(1.0) / (c * c);
        r.t.push_back(t);
        r.nodes.push_back(tanh(t));
        r.weights.push_back(r.step * sech2);
        r.one_minus_x2.push_back(sech2);
    }
    return r;
}

}  // namespace hcont
