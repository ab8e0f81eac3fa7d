#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include "hcont/boundary.hpp"
#include "hcont/spectral.hpp"

namespace {

using hcont::Complex;
using hcont::DDReal;
constexpr double pi = std::numbers::pi;

TEST(GammaExponent, ClosedValues) {
    EXPECT_EQ(hcont::gamma_exponent(Complex<DDReal>(DDReal(0.0), DDReal(1.0))), DDReal(0.5));
    EXPECT_NEAR(hcont::gamma_exponent(Complex<double>{1.0, 1.0}), std::atan(2.0) / pi, 1e-15);
    EXPECT_NEAR(hcont::gamma_exponent_arctan(Complex<double>{1.0, 1.0}), std::atan(2.0) / pi, 1e-15);
    EXPECT_LT(hcont::gamma_exponent(Complex<double>{0.0, 1e6}), 1e-6);
    EXPECT_THROW((void)hcont::gamma_exponent(Complex<double>{0.0, -1.0}), hcont::ConfigError);
}

TEST(GammaExponent, TwoFormulasAgreeOnRandomPoints) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> re(-5.0, 5.0), im(1e-3, 5.0);
    for (int k = 0; k < 200; ++k) {
        const Complex<double> z{re(rng), im(rng)};
        EXPECT_NEAR(hcont::gamma_exponent(z), hcont::gamma_exponent_arctan(z), 1e-15);
    }
}

TEST(GammaExponent, ConstantOnCircularArcs) {
    for (double y0 : {0.3, 1.0, 2.5}) {
        const double c = (y0 * y0 - 1.0) / (2.0 * y0), r = y0 - c;
        const double g0 = hcont::gamma_exponent(Complex<double>{0.0, y0});
        for (double phi : {0.3, 1.0, 2.2}) {
            const Complex<double> z{r * std::cos(phi), c + r * std::sin(phi)};
            if (z.im <= 0.0) continue;
            EXPECT_NEAR(hcont::gamma_exponent(z), g0, 1e-12);
        }
    }
}

TEST(BoundaryBound, UnitPoint) {
    const auto b = hcont::boundary_bound(Complex<double>{0.0, 1.0}, 1e-4);
    EXPECT_NEAR(b.rho, std::sqrt(18.0 / pi), 1e-14);
    EXPECT_NEAR(b.bound, std::sqrt(18.0 / pi) * 1e-2, 1e-16);
    EXPECT_NEAR(b.bound / b.B, 6.0, 1e-13);
}

TEST(BoundaryBound, ExactRatioBelowSqrtTwoB) {
    for (double e : {1e-1, 1e-3, 1e-6}) {
        const Complex<double> z{0.5, 0.7};
        const auto b = hcont::boundary_bound(z, e);
        const double exact = hcont::boundary_limit_bound(z, e) / 1.5;
        EXPECT_GE(exact, b.B * (1.0 - 1e-14));
        EXPECT_LE(exact, std::sqrt(2.0) * b.B);
    }
    EXPECT_THROW((void)hcont::boundary_bound(Complex<double>{0.0, 1.0}, 1.0), hcont::ConfigError);
}

TEST(BoundaryBound, IllPosedNearRealAxis) {
    double prev_rho = 0.0, prev_gamma = 1.0;
    for (double d : {1e-1, 1e-2, 1e-3, 1e-4}) {
        const auto b = hcont::boundary_bound(Complex<double>{2.0, d}, 1e-3);
        EXPECT_GT(b.rho, prev_rho);
        EXPECT_LT(b.gamma, prev_gamma);
        prev_rho = b.rho;
        prev_gamma = b.gamma;
    }
    EXPECT_LT(prev_gamma, 1e-3);
}

TEST(MaximizerW, NormsAndPointValue) {
    const Complex<double> z{0.4, 0.8};
    const double eps = 1e-2;
    const auto rule = hcont::tanh_rule<double>(400);
    double inner = 0.0;
    for (std::size_t j = 0; j < rule.order(); ++j) {
        if (std::abs(rule.nodes[j]) == 1.0) continue;
        inner += rule.weights[j] * norm(hcont::maximizer_W(Complex<double>{rule.nodes[j], 0.0}, z, eps));
    }
    EXPECT_NEAR(std::sqrt(inner), eps, 1e-10);

    // |x| > 1 through x = +-(1 + e^s), trapezoid in s.
    double outer = 0.0;
    const double ds = 0.01;
    for (double s = -30.0; s <= 60.0; s += ds) {
        const double x = 1.0 + std::exp(s);
        outer += (norm(hcont::maximizer_W(Complex<double>{x, 0.0}, z, eps)) +
                  norm(hcont::maximizer_W(Complex<double>{-x, 0.0}, z, eps))) *
                 std::exp(s) * ds;
    }
    const double want = hcont::maximizer_W_h2_norm_sq(z, eps);
    EXPECT_NEAR(inner + outer, want, 1e-8 * want);

    const auto b = hcont::boundary_bound(z, eps);
    EXPECT_NEAR(abs(hcont::maximizer_W(z, z, eps)), b.B, 1e-15);
}

TEST(ExplicitU, UnitEpsAndCentre) {
    const Complex<double> z{0.3, 1.2};
    const double beta = 0.5 * std::log(2.0);
    EXPECT_NEAR(std::sinh(beta), 1.0 / (2.0 * std::sqrt(2.0)), 1e-16);
    const std::complex<double> zc(z.re, -z.im);
    const std::complex<double> alpha = 0.5 * std::log((zc + 1.0) / (zc - 1.0));
    const std::complex<double> p0 = std::complex<double>(0.0, 1.0) / (0.0 - zc);
    const std::complex<double> want = 2.0 * p0 * std::sinh(beta) * std::exp(std::complex<double>(0.0, 2.0 * beta / pi) * alpha);
    const auto got = hcont::explicit_u(0.0, z, 1.0);
    EXPECT_NEAR(got.re, want.real(), 1e-15);
    EXPECT_NEAR(got.im, want.imag(), 1e-15);
    EXPECT_THROW((void)hcont::explicit_u(1.0, z, 1.0), hcont::ConfigError);
}

TEST(ExplicitU, SolvesBoundaryEquation) {
    const auto rule = hcont::tanh_rule<double>(200);
    EXPECT_LT(hcont::boundary_equation_residual(Complex<double>{0.0, 1.0}, 1e-2, rule), 1e-6);
    EXPECT_LT(hcont::boundary_equation_residual(Complex<double>{1.0, 1.0}, 1e-2, rule), 1e-6);
}

TEST(ExplicitU, NormMatchesQuadrature) {
    const Complex<double> z{0.0, 1.0};
    const double eps = 1e-2;
    const auto rule = hcont::tanh_rule<double>(400);
    double acc = 0.0;
    for (std::size_t j = 0; j < rule.order(); ++j) acc += rule.weights[j] * norm(hcont::explicit_u(rule.nodes[j], z, eps));
    EXPECT_NEAR(std::sqrt(acc), hcont::explicit_u_norm(z, eps), 1e-9 * hcont::explicit_u_norm(z, eps));
}

TEST(TruncatedHilbert, ConstantAndOdd) {
    const auto rule = hcont::gauss_legendre<double>(41);
    std::vector<Complex<double>> one(rule.order(), Complex<double>{1.0, 0.0}), lin;
    for (double x : rule.nodes) lin.push_back({x, 0.0});
    const auto k1 = hcont::truncated_hilbert<double>(one, rule);
    const auto kx = hcont::truncated_hilbert<double>(lin, rule);
    for (std::size_t j = 0; j < rule.order(); ++j) {
        const double x = rule.nodes[j];
        EXPECT_NEAR(abs(k1[j] - Complex<double>{0.0, std::log((1.0 + x) / (1.0 - x)) / pi}), 0.0, 1e-12);
    }
    EXPECT_NEAR(abs(kx[20] - Complex<double>{0.0, -2.0 / pi}), 0.0, 1e-12);
}

TEST(TruncatedHilbert, LimitOperatorPositive) {
    const auto rule = hcont::gauss_legendre<double>(120);
    hcont::OperatorMatrix<double> op{hcont::hilbert_hermitian_matrix(rule), hcont::Symmetrization::sqrt_weight, {}};
    for (std::size_t j = 0; j < rule.order(); ++j) {
        op.curve.points.push_back({rule.nodes[j], 0.0});
        op.curve.arc_weights.push_back(rule.weights[j]);
    }
    const auto s = hcont::eigendecompose(op);
    EXPECT_LT(s.lambdas.front(), 1.0);
    EXPECT_GT(s.lambdas.back(), -1.0);
}

TEST(KoppelmanPincus, IsometryRoundTripMultiplier) {
    const hcont::KPGrid g;
    auto bump = [](double x) { return std::abs(x) < 0.5 ? std::exp(4.0 - 4.0 / (1.0 - 4.0 * x * x)) : 0.0; };
    const auto rule = hcont::gauss_legendre<double>(400);
    std::vector<Complex<double>> f(g.nt), kf(g.nt);
    for (std::size_t j = 0; j < g.nt; ++j) {
        const double x = std::tanh(g.t(j));
        f[j] = bump(x);
        kf[j] = hcont::hilbert_of_compact(bump, -0.5, 0.5, x, rule);
    }
    const auto G = hcont::kp_transform(f, g);
    const auto GK = hcont::kp_transform(kf, g);
    const auto back = hcont::kp_inverse(G.values, g);
    std::vector<Complex<double>> dm(g.ns), dr(g.nt);
    for (std::size_t k = 0; k < g.ns; ++k) dm[k] = GK.values[k] - G.values[k] * std::tanh(g.s(k));
    for (std::size_t j = 0; j < g.nt; ++j) dr[j] = back.values[j] - f[j];
    EXPECT_NEAR(hcont::kp_l2_norm(G.values, g.s(0), g.ds()), hcont::kp_l2_norm(f, g.t(0), g.dt()), 1e-6);
    EXPECT_LT(hcont::kp_l2_norm(dr, g.t(0), g.dt()), 1e-6);
    EXPECT_LT(hcont::kp_l2_norm(dm, g.s(0), g.ds()), 1e-5);
    EXPECT_LT(G.truncation_estimate, 1e-6);
}

TEST(HLimit, ApproachesBoundaryBound) {
    const std::vector<double> hs{1e-2, 1e-3};
    const auto rows = hcont::h_limit_study(Complex<double>{0.0, 1.0}, 1e-3, hs);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_LT(rows[1].gap, rows[0].gap);
    for (const auto& r : rows) EXPECT_LE(r.lambda_max, 1.0);
    EXPECT_NEAR(rows[0].M_boundary, hcont::boundary_limit_bound(Complex<double>{0.0, 1.0}, 1e-3), 1e-15);
    std::ostringstream os;
    hcont::write_hlimit_csv(os, rows);
    EXPECT_EQ(os.str().substr(0, 19), "h,M_h,M_boundary,ga");
    const std::vector<double> bad{1e-3, 1e-2};
    EXPECT_THROW((void)hcont::h_limit_study(Complex<double>{0.0, 1.0}, 1e-3, bad), hcont::ConfigError);
}

TEST(GammaMap, CsvHeader) {
    std::vector<Complex<double>> zs{{0.0, 1.0}, {1.0, 1.0}};
    std::ostringstream os;
    hcont::write_gamma_map_csv<double>(os, zs);
    EXPECT_EQ(os.str().substr(0, 16), "zr,zi,gamma,rho\n");
}

}  // namespace
