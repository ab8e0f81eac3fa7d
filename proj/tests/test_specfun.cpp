#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hcont/specfun.hpp"

namespace {

using hcont::Complex;
using hcont::DDReal;

// Frozen values from tests/oracle/derive_constants.py.
const DDReal oracle_K_half = hcont::parse_scalar<DDReal>("1.85407467730137191843385034719526005");
const DDReal oracle_E_half = hcont::parse_scalar<DDReal>("1.35064388104767550252017473533872584");

TEST(EllipticComplete, ZeroParameter) {
    EXPECT_EQ(hcont::ellip_K(0.0), std::numbers::pi / 2);
    EXPECT_EQ(hcont::ellip_E(0.0), std::numbers::pi / 2);
}

TEST(EllipticComplete, HalfAgainstOracle) {
    const DDReal half(0.5);
    EXPECT_LT(hcont::to_double(abs(hcont::ellip_K(half) - oracle_K_half)), 1e-31);
    EXPECT_LT(hcont::to_double(abs(hcont::ellip_E(half) - oracle_E_half)), 1e-31);
}

TEST(EllipticComplete, LegendreRelation) {
    for (double md : {0.1, 0.5, 0.9}) {
        const DDReal m(md), m1 = DDReal(1.0) - m;
        const auto a = hcont::ellip_KE(m, m1);
        const auto b = hcont::ellip_KE(m1, m);
        const DDReal lhs = a.E * b.K + b.E * a.K - a.K * b.K;
        EXPECT_LT(hcont::to_double(abs(lhs - hcont::pi_v<DDReal>() / DDReal(2.0))), 1e-28) << md;
    }
}

TEST(EllipticComplete, ConvergesQuickly) {
    EXPECT_LE(hcont::ellip_KE(DDReal(0.99), DDReal(1.0) - DDReal(0.99)).iterations, 6);
    EXPECT_LE(hcont::ellip_KE(0.99, 0.01).iterations, 5);
    EXPECT_THROW((void)hcont::ellip_K(1.0), hcont::ConfigError);
    EXPECT_THROW((void)hcont::ellip_K(-0.1), hcont::ConfigError);
}

TEST(EllipticIncomplete, ZeroAndComplete) {
    EXPECT_EQ(hcont::ellip_F(0.0, 0.3), 0.0);
    EXPECT_EQ(hcont::ellip_Einc(0.0, 0.3), 0.0);
    EXPECT_NEAR(hcont::ellip_F(std::numbers::pi / 2, 0.3), hcont::ellip_K(0.3), 1e-15);
    EXPECT_NEAR(hcont::ellip_Einc(std::numbers::pi / 2, 0.3), hcont::ellip_E(0.3), 1e-15);
    const DDReal hp = hcont::pi_v<DDReal>() / DDReal(2.0);
    EXPECT_LT(hcont::to_double(abs(hcont::ellip_F(hp, DDReal(0.7)) - hcont::ellip_K(DDReal(0.7)))), 1e-30);
}

TEST(EllipticIncomplete, ZeroParameterIsIdentity) {
    EXPECT_NEAR(hcont::ellip_F(0.9, 0.0), 0.9, 1e-15);
    EXPECT_NEAR(hcont::ellip_Einc(0.9, 0.0), 0.9, 1e-15);
}

TEST(EllipticIncomplete, AmplitudeOfModulusEquationInUnitInterval) {
    for (double m = 0.05; m < 1.0; m += 0.1) {
        const double x = std::sqrt((hcont::ellip_K(m) - hcont::ellip_E(m)) / (m * hcont::ellip_K(m)));
        EXPECT_GT(x, 0.0);
        EXPECT_LT(x, 1.0);
    }
}

TEST(WeierstrassZeta, Odd) {
    const double tau = 0.47;
    for (const Complex<double> z : {Complex<double>{0.2, 0.1}, Complex<double>{-0.33, 0.4}, Complex<double>{0.45, -0.2}}) {
        const auto a = hcont::weierstrass_zeta(z, tau);
        const auto b = hcont::weierstrass_zeta(-z, tau);
        EXPECT_LT(abs(a + b), 1e-13);
    }
}

TEST(WeierstrassZeta, QuasiPeriodConstant) {
    const DDReal tau(0.6);
    const Complex<DDReal> one(DDReal(1.0));
    const Complex<DDReal> ref = hcont::weierstrass_zeta(Complex<DDReal>(DDReal(0.1), DDReal(0.05)) + one, tau) -
                                hcont::weierstrass_zeta(Complex<DDReal>(DDReal(0.1), DDReal(0.05)), tau);
    for (double x : {0.23, -0.4, 0.37}) {
        for (double y : {0.1, -0.25}) {
            const Complex<DDReal> z{DDReal(x), DDReal(y)};
            const auto d = hcont::weierstrass_zeta(z + one, tau) - hcont::weierstrass_zeta(z, tau);
            EXPECT_LT(hcont::to_double(abs(d - ref)), 1e-25);
        }
    }
    EXPECT_LT(hcont::to_double(abs(ref - Complex<DDReal>(DDReal(2.0) * hcont::weierstrass_eta1(tau)))), 1e-25);
}

TEST(WeierstrassZeta, LaurentLeadingTerm) {
    double prev = 1.0;
    for (double r : {1e-1, 1e-2, 1e-3, 1e-4}) {
        const Complex<double> z{r, 0.5 * r};
        const double dev = abs(z * hcont::weierstrass_zeta(z, 0.8) - Complex<double>{1.0, 0.0});
        EXPECT_LT(dev, prev);
        prev = dev;
    }
    EXPECT_LT(prev, 1e-6);
}

TEST(WeierstrassZeta, DerivativeMatchesDifference) {
    const double tau = 0.7, h = 1e-5;
    const Complex<double> z{0.21, 0.13};
    const auto fd = (hcont::weierstrass_zeta(z + Complex<double>{h, 0.0}, tau) -
                     hcont::weierstrass_zeta(z - Complex<double>{h, 0.0}, tau)) /
                    (2.0 * h);
    EXPECT_LT(abs(fd - hcont::weierstrass_zeta_prime(z, tau)), 1e-6 * abs(fd));
}

TEST(WeierstrassZeta, RejectsPole) {
    EXPECT_THROW((void)hcont::weierstrass_zeta(Complex<double>{1.0, 0.0}, 0.5), hcont::ConfigError);
}

}  // namespace
