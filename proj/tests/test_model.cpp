#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "sharpld/cgf.hpp"
#include "sharpld/errors.hpp"
#include "sharpld/model.hpp"

using namespace sharpld;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::NonConvergence;
}

// Plain bisection on the first sign change of f0 moving away from 0.
double first_zero(const ModelParams& p, double direction) {
    auto f0 = [&](double u) { return expansion_coeffs(p, Marginal::X, u).f0; };
    double lo = 0.0, hi = 0.0;
    const double h = 0.01 * direction;
    while (f0(hi) > 0.0) {
        lo = hi;
        hi += h;
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f0(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST(ValidateParams, ReferenceSetDerivedConstants) {
    const ModelParams p = validate_params(0.12, -1.0, 0.4, -0.5);
    EXPECT_DOUBLE_EQ(p.mu(), 1.5);
    EXPECT_NEAR(p.rho_bar(), std::sqrt(0.75), 1e-15);
    EXPECT_NEAR(p.rho_bar() * p.rho_bar() + p.rho() * p.rho(), 1.0, 1e-15);
}

TEST(ValidateParams, RejectsEachConstraint) {
    EXPECT_EQ(code_of([] { validate_params(0.12, -1.0, 0.4, 1.0); }), ErrorCode::ParameterOutOfRange);
    EXPECT_EQ(code_of([] { validate_params(-0.1, -1.0, 0.4, 0.0); }), ErrorCode::ParameterOutOfRange);
    EXPECT_EQ(code_of([] { validate_params(0.12, 0.5, 0.4, 0.0); }), ErrorCode::ParameterOutOfRange);
    EXPECT_EQ(code_of([] { validate_params(0.12, -1.0, 0.0, 0.0); }), ErrorCode::ParameterOutOfRange);
    EXPECT_EQ(code_of([] { validate_params(NAN, -1.0, 0.4, 0.0); }), ErrorCode::ParameterOutOfRange);
    EXPECT_EQ(code_of([] { validate_params(0.05, -1.0, 0.4, 0.0); }), ErrorCode::FellerIndexTooSmall);
}

TEST(ValidateParams, MessageNamesConstraint) {
    try {
        validate_params(0.12, -1.0, 0.4, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("rho"), std::string::npos);
    }
}

TEST(LimitingEndpoints, ReferenceValues) {
    const auto [lo, hi] = limiting_u_pm(reference_params());
    // published to five decimals
    EXPECT_NEAR(lo, -6.04600, 1e-5);
    EXPECT_NEAR(hi, 12.09199, 1e-5);
}

TEST(LimitingEndpoints, ZeroCorrelationUnitXi) {
    const ModelParams p = validate_params(0.6, -1.0, 1.0, 0.0);
    const auto [lo, hi] = limiting_u_pm(p);
    EXPECT_NEAR(lo, -std::numbers::pi, 1e-14);
    EXPECT_NEAR(hi, std::numbers::pi, 1e-14);
}

TEST(LimitingEndpoints, TangentIdentity) {
    const ModelParams p = reference_params();
    const auto [lo, hi] = limiting_u_pm(p);
    for (const double u : {lo, hi})
        EXPECT_NEAR(std::tan(p.rho_bar() * p.xi() * u / 2.0), p.rho_bar() / p.rho(), 1e-10);
}

TEST(LimitingEndpoints, AreZerosOfLeadingF) {
    for (const double rho : {-0.7, -0.3, 0.0, 0.4, 0.8}) {
        const ModelParams p = validate_params(0.3, -0.8, 0.6, rho);
        const auto [lo, hi] = limiting_u_pm(p);
        EXPECT_NEAR(lo, first_zero(p, -1.0), 1e-10) << rho;
        EXPECT_NEAR(hi, first_zero(p, 1.0), 1e-10) << rho;
        EXPECT_NEAR(expansion_coeffs(p, Marginal::X, lo).f0, 0.0, 1e-12);
        EXPECT_NEAR(expansion_coeffs(p, Marginal::X, hi).f0, 0.0, 1e-12);
    }
}

TEST(LimitingEndpoints, RangeOverCorrelationGrid) {
    for (int k = -9; k <= 9; ++k) {
        const double rho = 0.1 * k;
        const ModelParams p = validate_params(0.12, -1.0, 0.4, rho);
        const auto [lo, hi] = limiting_u_pm(p);
        EXPECT_LT(lo, -2.0 / p.xi()) << rho;
        EXPECT_GT(hi, 2.0 / p.xi()) << rho;
    }
}

TEST(DomainBounds, VarianceClosedForm) {
    const DomainBounds d = domain_bounds(reference_params(), Marginal::V, 0.1);
    EXPECT_TRUE(std::isinf(d.lower) && d.lower < 0);
    EXPECT_NEAR(d.upper, 0.2 / (0.16 * (1.0 - std::exp(-0.1))), 1e-12);
    EXPECT_NEAR(d.upper, 13.1354, 5e-5);
}

TEST(DomainBounds, VarianceUpperDecreasesToLimit) {
    const ModelParams p = reference_params();
    double prev = kInfinity;
    for (const double t : {1.0, 0.1, 0.01, 0.001, 1e-5}) {
        const double up = domain_bounds(p, Marginal::V, t).upper;
        EXPECT_GT(up, 2.0 / 0.16);
        EXPECT_LT(up, prev);
        prev = up;
    }
    EXPECT_NEAR(prev, 12.5, 1e-3);
    EXPECT_DOUBLE_EQ(domain_bounds(p, Marginal::V, 0.0).upper, 12.5);
}

TEST(DomainBounds, PriceDomainNestsAndConverges) {
    const ModelParams p = reference_params();
    const auto [lo, hi] = limiting_u_pm(p);
    double prev_gap = kInfinity;
    for (const double t : {1.0, 0.5, 0.1, 0.01, 0.001}) {
        const DomainBounds d = domain_bounds(p, Marginal::X, t);
        EXPECT_LE(d.lower, lo);
        EXPECT_GE(d.upper, hi);
        const double gap = std::max(lo - d.lower, d.upper - hi);
        EXPECT_LT(gap, prev_gap);
        prev_gap = gap;
    }
    EXPECT_LT(prev_gap, 1e-2);
    const DomainBounds d0 = domain_bounds(p, Marginal::X, 0.0);
    EXPECT_EQ(d0.lower, lo);
    EXPECT_EQ(d0.upper, hi);
}

TEST(DomainBounds, BoundaryRootIdentity) {
    for (const double rho : {-0.5, 0.0, 0.5}) {
        const ModelParams p = validate_params(0.12, -1.0, 0.4, rho);
        for (const double t : {1.0, 0.3, 0.05, 0.01}) {
            const DomainBounds d = domain_bounds(p, Marginal::X, t);
            EXPECT_LT(d.lower, 0.0);
            EXPECT_GT(d.upper, 0.0);
            EXPECT_LT(std::abs(f_t(p, Marginal::X, d.lower, t)), 1e-10);
            EXPECT_LT(std::abs(f_t(p, Marginal::X, d.upper, t)), 1e-10);
        }
    }
}

TEST(Marginal, ParseAndPrint) {
    EXPECT_EQ(parse_marginal("X"), Marginal::X);
    EXPECT_EQ(parse_marginal("V"), Marginal::V);
    EXPECT_EQ(to_string(Marginal::V), "V");
    EXPECT_THROW(parse_marginal("Y"), Error);
}

TEST(ParamsJson, RoundTripWithoutDerivedFields) {
    nlohmann::json j = reference_params();
    EXPECT_EQ(j.size(), 4u);
    EXPECT_FALSE(j.contains("mu"));
    const ModelParams q = params_from_json(j);
    EXPECT_EQ(q.a(), 0.12);
    EXPECT_EQ(q.rho(), -0.5);
}

TEST(ParamsJson, MissingKeyIsValidationError) {
    const nlohmann::json j = {{"a", 0.12}, {"b", -1.0}, {"xi", 0.4}};
    EXPECT_EQ(code_of([&] { params_from_json(j); }), ErrorCode::ParameterOutOfRange);
}
