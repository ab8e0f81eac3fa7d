#include <gtest/gtest.h>

#include <cmath>

#include "hcont/quadrature.hpp"

namespace {

using hcont::DDReal;

TEST(GaussLegendre, OnePoint) {
    const auto r = hcont::gauss_legendre<double>(1);
    ASSERT_EQ(r.order(), 1u);
    EXPECT_EQ(r.nodes[0], 0.0);
    EXPECT_DOUBLE_EQ(r.weights[0], 2.0);
}

TEST(GaussLegendre, TwoPoints) {
    const auto r = hcont::gauss_legendre<double>(2);
    EXPECT_NEAR(r.nodes[0], -1.0 / std::sqrt(3.0), 2e-16);
    EXPECT_NEAR(r.nodes[1], 1.0 / std::sqrt(3.0), 2e-16);
    EXPECT_NEAR(r.weights[0], 1.0, 1e-15);
    EXPECT_NEAR(r.weights[1], 1.0, 1e-15);
}

TEST(GaussLegendre, PolynomialExactnessDD) {
    const auto r = hcont::gauss_legendre<DDReal>(16);
    DDReal s(0.0);
    for (std::size_t j = 0; j < r.order(); ++j) s += r.weights[j] * hcont::pow(r.nodes[j], 30);
    EXPECT_LT(hcont::to_double(abs(s - DDReal(2.0) / DDReal(31.0))), 1e-31);
}

TEST(GaussLegendre, SymmetricIncreasingPositive) {
    for (int n : {5, 40, 121}) {
        const auto r = hcont::gauss_legendre<DDReal>(n);
        DDReal sum(0.0);
        for (std::size_t j = 0; j < r.order(); ++j) {
            if (j > 0) EXPECT_LT(r.nodes[j - 1], r.nodes[j]);
            EXPECT_GT(r.weights[j], DDReal(0.0));
            EXPECT_EQ(r.nodes[j], -r.nodes[r.order() - 1 - j]);
            sum += r.weights[j];
        }
        EXPECT_LT(hcont::to_double(abs(sum - DDReal(2.0))), 1e-30);
    }
}

TEST(GaussLegendre, RejectsNonPositiveOrder) { EXPECT_THROW((void)hcont::gauss_legendre<double>(0), hcont::ConfigError); }

TEST(TanhRule, IntegratesEndpointSingularity) {
    const auto r = hcont::tanh_rule<double>(200);
    double s = 0.0;
    for (std::size_t j = 0; j < r.order(); ++j) s += r.weights[j] * std::log(r.one_minus_x2[j]);
    EXPECT_NEAR(s, 4.0 * std::log(2.0) - 4.0, 1e-12);
}

TEST(CompositeGauss, GradedPanelsIntegrateLog) {
    const auto br = hcont::graded_breakpoints<double>(40);
    const auto r = hcont::composite_gauss<double>(br, 16);
    double s = 0.0;
    for (std::size_t j = 0; j < r.order(); ++j) s += r.weights[j] * std::log(1.0 - r.nodes[j]);
    EXPECT_NEAR(s, 2.0 * std::log(2.0) - 2.0, 1e-12);
}

}  // namespace
