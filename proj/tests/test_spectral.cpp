#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hcont/spectral.hpp"

namespace {

using hcont::Complex;
using hcont::DDReal;
using hcont::Symmetrization;

// Frozen values from tests/oracle/derive_constants.py (60-digit mpmath).
constexpr double oracle_lambda_1 = 0.148777073640746868339110659692768962;
constexpr double oracle_lambda_5 = 1.48635890356922017223571437571153873e-6;
constexpr double oracle_lambda_10 = 5.44844410942830161248657214755433882e-13;
constexpr double oracle_lambda_20 = 6.99812478214701604661997125784225322e-26;
constexpr std::size_t oracle_count_above_1e30 = 23;

struct Segment80 {
    hcont::CurveDiscretization<DDReal> disc =
        hcont::discretize(hcont::parse_curve("segment:-1,1@h=1"), hcont::gauss_legendre<DDReal>(80));
    hcont::OperatorMatrix<DDReal> op = hcont::assemble_K(disc, Symmetrization::sqrt_weight);
    hcont::SpectralData<DDReal> spec = hcont::eigendecompose(op);
};

const Segment80& segment80() {
    static const Segment80 s;
    return s;
}

hcont::OperatorMatrix<double> small_operator(std::size_t n) {
    hcont::OperatorMatrix<double> op{hcont::CMatrix<double>(n, n), Symmetrization::sqrt_weight, {}};
    for (std::size_t j = 0; j < n; ++j) {
        op.curve.points.push_back({double(j), 1.0});
        op.curve.arc_weights.push_back(1.0);
    }
    return op;
}

TEST(Jacobi, OneByOne) {
    auto op = small_operator(1);
    op.entries(0, 0) = Complex<double>{0.25, 0.0};
    const auto s = hcont::eigendecompose(op);
    EXPECT_EQ(s.lambdas[0], 0.25);
    EXPECT_EQ(abs(s.vectors(0, 0)), 1.0);
}

TEST(Jacobi, TwoByTwoClosedForm) {
    auto op = small_operator(2);
    const Complex<double> b{0.1, -0.2};
    op.entries(0, 0) = op.entries(1, 1) = Complex<double>{0.5, 0.0};
    op.entries(0, 1) = b;
    op.entries(1, 0) = conj(b);
    const auto s = hcont::eigendecompose(op);
    EXPECT_NEAR(s.lambdas[0], 0.5 + abs(b), 1e-16);
    EXPECT_NEAR(s.lambdas[1], 0.5 - abs(b), 1e-16);
}

TEST(Jacobi, SegmentEigenvaluesAgainstOracle) {
    const auto& s = segment80().spec;
    auto rel = [&](std::size_t n, double want) { return std::abs(hcont::to_double(s.lambdas[n - 1]) - want) / want; };
    EXPECT_LT(rel(1, oracle_lambda_1), 1e-15);
    EXPECT_LT(rel(5, oracle_lambda_5), 1e-15);
    EXPECT_LT(rel(10, oracle_lambda_10), 1e-15);
    EXPECT_LT(rel(20, oracle_lambda_20), 1e-6);
    std::size_t count = 0;
    for (const auto& l : s.lambdas)
        if (l >= DDReal(1e-30)) ++count;
    EXPECT_EQ(count, oracle_count_above_1e30);
}

TEST(Jacobi, ResolvedSpectrumPositiveDecreasingOrthonormal) {
    const auto& s = segment80().spec;
    ASSERT_GT(s.rank_cutoff, 20u);
    for (std::size_t n = 0; n < s.rank_cutoff; ++n) {
        EXPECT_GT(s.lambdas[n], DDReal(0.0));
        if (n > 0) EXPECT_LT(s.lambdas[n], s.lambdas[n - 1]);
    }
    EXPECT_LT(hcont::to_double(hcont::orthonormality_error(s, s.rank_cutoff)), 1e-28);
    EXPECT_LT(hcont::to_double(hcont::reconstruction_error(segment80().op, s)), 1e-28);
}

TEST(ProjectRhs, BesselAndSumRule) {
    const auto& seg = segment80();
    const Complex<DDReal> z(DDReal(0.0), DDReal(3.0));
    const auto p = hcont::rhs_vector(seg.disc, z);
    const auto s = hcont::project_rhs(seg.spec, p);
    DDReal pi2(0.0);
    for (std::size_t n = 0; n < s.rank_cutoff; ++n) pi2 += norm(s.pis[n]);
    const DDReal pnorm = hcont::norm2<DDReal>(p.values);
    EXPECT_LE(pi2, pnorm * pnorm * (DDReal(1.0) + DDReal(1e-27)));

    const auto r = hcont::sum_rule(s);
    for (std::size_t n = 1; n < r.partial.size(); ++n) EXPECT_GE(r.partial[n], r.partial[n - 1]);
    EXPECT_LT(std::abs(hcont::to_double(r.relative_gap())), 1e-4);
    EXPECT_LT(hcont::to_double(r.target - hcont::pi_v<DDReal>() / DDReal(3.0)), 1e-31);
}

TEST(ProjectRhs, EigenfunctionIdentity) {
    const auto& seg = segment80();
    const Complex<DDReal> z(DDReal(2.0), DDReal(1.0));
    const auto s = hcont::project_rhs(seg.spec, hcont::rhs_vector(seg.disc, z));
    const DDReal two_pi = DDReal(2.0) * hcont::pi_v<DDReal>();
    for (std::size_t n = 0; n < s.rank_cutoff; ++n) {
        const auto en = hcont::eigenfunction_at(s, n, z);
        EXPECT_LT(hcont::to_double(abs(s.pis[n] - conj(en) * (two_pi * s.lambdas[n]))), 1e-20) << "n = " << n;
    }
}

TEST(DecayFit, SyntheticExponential) {
    std::vector<double> l, p;
    for (int n = 1; n <= 30; ++n) {
        l.push_back(std::exp(-double(n)));
        p.push_back(std::exp(-1.5 * n));
    }
    const auto f = hcont::decay_fit_values(l, p, 3, 28);
    EXPECT_NEAR(f.alpha_hat, 1.0, 1e-12);
    EXPECT_NEAR(f.beta_hat, 1.5, 1e-12);
    EXPECT_NEAR(f.r2_lambda, 1.0, 1e-12);
    EXPECT_TRUE(f.in_band());
}

TEST(DecayFit, PerturbedExponential) {
    std::vector<double> l;
    for (int n = 1; n <= 30; ++n) l.push_back(std::exp(-double(n)) * (1.0 + 0.01 * std::sin(double(n))));
    EXPECT_NEAR(hcont::decay_fit_values(l, {}, 3, 28).alpha_hat, 1.0, 1e-2);
}

TEST(DecayFit, RejectsShortWindow) {
    std::vector<double> l(10, 1.0);
    EXPECT_THROW((void)hcont::decay_fit_values(l, {}, 3, 6), hcont::ConfigError);
}

TEST(Switchover, CrossesEpsSquared) {
    const auto& s = segment80().spec;
    const std::size_t j = hcont::switchover_index(s, DDReal(1e-4));
    ASSERT_GT(j, 0u);
    EXPECT_GE(s.lambdas[j - 1], DDReal(1e-8));
    EXPECT_LT(s.lambdas[j], DDReal(1e-8));
}

}  // namespace
