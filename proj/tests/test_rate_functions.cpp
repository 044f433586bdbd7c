#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sharpld/cgf.hpp"
#include "sharpld/errors.hpp"
#include "sharpld/rate_functions.hpp"
#include "sharpld/saddlepoint.hpp"

using namespace sharpld;

namespace {
const ModelParams P1 = reference_params();
}

TEST(RateX, ReferenceValues) {
    EXPECT_EQ(rate_x(P1, 0.0).value, 0.0);
    EXPECT_NEAR(rate_x(P1, 0.1).value, 1.209199, 1e-6);
    EXPECT_NEAR(rate_x(P1, -0.1).value, 0.604600, 1e-6);
}

TEST(RateX, AffineOnEachSide) {
    for (const auto& [x1, x2] : {std::pair{0.05, 0.3}, std::pair{-0.4, -0.01}}) {
        const double mid = rate_x(P1, 0.5 * (x1 + x2)).value;
        const double chord = 0.5 * (rate_x(P1, x1).value + rate_x(P1, x2).value);
        EXPECT_NEAR(mid, chord, 1e-15);
    }
}

TEST(RateV, ReferenceValues) {
    EXPECT_EQ(rate_v(P1, 0.0).value, 0.0);
    EXPECT_NEAR(rate_v(P1, 0.05).value, 0.625, 1e-15);
    EXPECT_TRUE(std::isinf(rate_v(P1, -1.0).value));
}

TEST(FwRate, ClosedFormValues) {
    EXPECT_EQ(fw_rate(0.4, 0.09, 0.09).value, 0.0);
    EXPECT_NEAR(fw_rate(0.4, 0.04, 0.09).value, 0.125, 1e-15);
    EXPECT_TRUE(std::isinf(fw_rate(0.4, 0.04, -0.01).value));
    for (const double x : {0.0, 0.05, 0.3}) EXPECT_NEAR(fw_rate(P1, 0.0, x).value, rate_v(P1, x).value, 1e-15);
    double prev = 0.0;
    for (const double v0 : {0.1, 0.01, 1e-4, 1e-10}) {
        const double gap = std::abs(fw_rate(0.4, v0, 0.2).value - 2.5);
        if (prev > 0.0) {
            EXPECT_LT(gap, prev);
        }
        prev = gap;
    }
    EXPECT_LT(prev, 1e-3);
}

TEST(FwRate, StrictlyConvexForPositiveStart) {
    const double v0 = 0.04, h = 1e-4;
    for (double x = 0.01; x < 0.5; x += 0.01) {
        const double second = (fw_rate(0.4, v0, x + h).value - 2.0 * fw_rate(0.4, v0, x).value +
                               fw_rate(0.4, v0, x - h).value) / (h * h);
        EXPECT_GT(second, 0.0);
        // (2/xi^2) sqrt(v0) / (2 x^{3/2}) scaled: d^2/dx^2 of (2/xi^2)(sqrt x - sqrt v0)^2
        EXPECT_NEAR(second, 12.5 * std::sqrt(v0) / (2.0 * std::pow(x, 1.5)), 1e-3 * second);
    }
}

TEST(AlphaCoeffs, Variance) {
    const AlphaCoeffs c = alpha_coeffs(P1, Marginal::V, 0.2);
    EXPECT_DOUBLE_EQ(c.alpha0, 12.5);
    EXPECT_NEAR(c.alpha1, -1.25, 1e-12);
    EXPECT_DOUBLE_EQ(alpha0(P1, Marginal::V, 3.0), 12.5);
    EXPECT_THROW(alpha_coeffs(P1, Marginal::V, 0.0), Error);
}

TEST(AlphaCoeffs, PriceUsesSideEndpoint) {
    const auto [lo, hi] = limiting_u_pm(P1);
    EXPECT_EQ(alpha0(P1, Marginal::X, 0.1), hi);
    EXPECT_EQ(alpha0(P1, Marginal::X, -0.1), lo);
    EXPECT_THROW(alpha0(P1, Marginal::X, 0.0), Error);
}

TEST(AlphaCoeffs, VarianceSecondOrderRemainder) {
    for (const double x : {0.05, 0.2}) {
        const AlphaCoeffs c = alpha_coeffs(P1, Marginal::V, x);
        std::vector<double> ratio;
        for (const double t : {0.05, 0.02, 0.01, 0.005}) {
            const double r = std::abs(saddle_v(P1, x, t).u_star - c.alpha0 - c.alpha1 * t);
            ratio.push_back(r / (t * t));
        }
        for (const double q : ratio) EXPECT_LT(q, 2.0 * ratio.back() + 1.0);
    }
}

TEST(AlphaCoeffs, ExtrapolationRecoversVarianceClosedForm) {
    const double x = 0.2;
    const AlphaCoeffs c = alpha_coeffs(P1, Marginal::V, x);
    std::vector<double> vals;
    for (const double t : kAlphaExtrapolationTimes) vals.push_back((saddle_v(P1, x, t).u_star - c.alpha0) / t);
    EXPECT_NEAR(extrapolate_to_zero(kAlphaExtrapolationTimes, vals), c.alpha1, 1e-5);
}

TEST(AlphaCoeffs, PriceFirstOrderIsConsistent) {
    const AlphaCoeffs c = alpha_coeffs(P1, Marginal::X, 0.1);
    const double t = 0.002;
    const double u = saddle_x(P1, 0.1, t).u_star;
    EXPECT_LT(std::abs(u - c.alpha0 - c.alpha1 * t), 0.05 * std::abs(c.alpha1) * t);
}

TEST(Extrapolation, ExactForQuadratics) {
    const std::vector<double> ts{0.3, 0.2, 0.1};
    std::vector<double> vs;
    for (const double t : ts) vs.push_back(2.0 - 3.0 * t + 5.0 * t * t);
    EXPECT_NEAR(extrapolate_to_zero(ts, vs), 2.0, 1e-13);
}

TEST(Legendre, LimitingPriceCgfIsBitwiseRate) {
    const CgfCurve c = limiting_cgf(P1, Marginal::X);
    for (const double x : {-0.2, -0.1, 0.1, 0.2, 0.0}) EXPECT_EQ(legendre_transform(c, x).value, rate_x(P1, x).value);
}

TEST(Legendre, LimitingVarianceCgf) {
    const CgfCurve c = limiting_cgf(P1, Marginal::V);
    for (const double x : {0.0, 0.05, 0.3}) EXPECT_EQ(legendre_transform(c, x).value, rate_v(P1, x).value);
    EXPECT_TRUE(std::isinf(legendre_transform(c, -0.1).value));
    LegendreOptions strict;
    strict.on_divergence = DivergencePolicy::Throw;
    try {
        legendre_transform(c, -0.1, strict);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnboundedAbove);
    }
}

TEST(Legendre, GaussianConjugate) {
    const CgfCurve g{-kInfinity, kInfinity, [](double u) { return 0.5 * u * u; }};
    EXPECT_NEAR(legendre_transform(g, 1.0).value, 0.5, 1e-12);
    EXPECT_NEAR(legendre_transform(g, -3.0).value, 4.5, 1e-10);
}

TEST(Legendre, RejectsSparseGrid) {
    LegendreOptions o;
    o.samples = 50;
    EXPECT_THROW(legendre_transform(limiting_cgf(P1, Marginal::X), 0.1, o), Error);
}

TEST(Steepness, LimitingCgfsAreNotSteep) {
    for (const Marginal m : {Marginal::X, Marginal::V}) {
        const SteepnessReport r = steepness_report(P1, m, std::vector<double>{0.1, 0.01, 0.001});
        EXPECT_FALSE(r.essentially_smooth);
        if (m == Marginal::X) {
            EXPECT_EQ(r.boundary_slopes.first, 0.0);
        }
        EXPECT_EQ(r.boundary_slopes.second, 0.0);
        ASSERT_EQ(r.pointwise_limit.size(), 3u);
        EXPECT_LT(r.pointwise_limit[2].max_abs_cgf, r.pointwise_limit[0].max_abs_cgf);
        EXPECT_LT(r.pointwise_limit[2].max_abs_cgf, 0.01);
    }
}

TEST(Steepness, GaussianIsSteep) {
    const CgfCurve g{-kInfinity, kInfinity, [](double u) { return 0.5 * u * u; }};
    const SteepnessReport r = steepness_of(g);
    EXPECT_TRUE(r.essentially_smooth);
    EXPECT_TRUE(std::isinf(r.boundary_slopes.first));
    EXPECT_TRUE(std::isinf(r.boundary_slopes.second));
}

TEST(Steepness, FiniteCgfAtFiniteTimeIsSteepAtTheEnds) {
    const double t = 0.05;
    const DomainBounds d = domain_bounds(P1, Marginal::X, t);
    const CgfCurve c{d.lower, d.upper, [&](double u) { return cgf_eval(P1, Marginal::X, u, t).lambda; }};
    const SteepnessReport r = steepness_of(c);
    EXPECT_TRUE(r.essentially_smooth);
}
