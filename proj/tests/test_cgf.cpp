#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sharpld/cgf.hpp"
#include "sharpld/errors.hpp"
#include "sharpld/model.hpp"

using namespace sharpld;

namespace {

const ModelParams P1 = reference_params();

double slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += std::log(xs[i]);
        my += std::log(ys[i]);
    }
    mx /= xs.size();
    my /= ys.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (std::log(xs[i]) - mx) * (std::log(ys[i]) - my);
        sxx += (std::log(xs[i]) - mx) * (std::log(xs[i]) - mx);
    }
    return sxy / sxx;
}

std::vector<double> compact_grid(Marginal m) {
    const DomainBounds d = domain_bounds(P1, m, 0.0);
    const double lo = m == Marginal::X ? d.lower + 0.1 * (d.upper - d.lower) : -d.upper;
    const double hi = m == Marginal::X ? d.upper - 0.1 * (d.upper - d.lower) : 0.9 * d.upper;
    std::vector<double> grid;
    for (int i = 0; i < 50; ++i) grid.push_back(lo + (hi - lo) * (i + 0.5) / 50.0);
    return grid;
}

} // namespace

TEST(DFunction, SimpleValues) {
    EXPECT_NEAR(std::abs(d_fn(P1, 0.0) - cplx(1.0, 0.0)), 0.0, 1e-15);
    const ModelParams p0 = validate_params(0.12, -1.0, 0.4, 0.0);
    EXPECT_NEAR(std::abs(d_fn(p0, 1.0) - cplx(1.0, 0.0)), 0.0, 1e-15);
}

TEST(DFunction, LargeArgumentExpansion) {
    const double d0 = P1.rho_bar() * P1.xi();
    for (const double u : {5.0, -5.0}) {
        const double sgn = u > 0 ? 1.0 : -1.0;
        const cplx d1(0.0, -sgn * (2.0 * P1.b() * P1.rho() + P1.xi()) / (2.0 * P1.rho_bar()));
        std::vector<double> ts{0.02, 0.01, 0.005, 0.0025}, errs;
        for (const double t : ts) {
            const cplx approx = cplx(0.0, u * sgn * d0 / t) + d1;
            errs.push_back(std::abs(d_fn(P1, u / t) - approx));
        }
        EXPECT_LT(errs[1], 0.05) << u;
        EXPECT_NEAR(slope(ts, errs), 1.0, 0.1) << u;
    }
}

TEST(CgfEval, ZeroAtOrigin) {
    for (const Marginal m : {Marginal::X, Marginal::V})
        for (const double t : {1.0, 0.1, 0.001}) EXPECT_NEAR(cgf_eval(P1, m, 0.0, t).lambda, 0.0, 1e-16);
}

TEST(CgfEval, VarianceMatchesGammaMgf) {
    for (const double t : {0.5, 0.1, 0.01}) {
        const double rate = -2.0 * P1.b() / (P1.xi() * P1.xi() * (1.0 - std::exp(P1.b() * t)));
        for (const double u : {-30.0, -2.0, 0.7, 5.0, 12.0}) {
            const double expected = -P1.mu() * t * std::log(1.0 - u / (t * rate));
            const CgfValue v = cgf_eval(P1, Marginal::V, u, t);
            ASSERT_TRUE(v.finite);
            EXPECT_NEAR(v.lambda, expected, 1e-12 * std::abs(expected)) << t << " " << u;
            EXPECT_EQ(v.g, 0.0);
            EXPECT_EQ(v.f.imag(), 0.0);
        }
    }
}

TEST(CgfEval, OutsideDomainIsInfinite) {
    const CgfValue v = cgf_eval(P1, Marginal::V, 14.0, 0.1);
    EXPECT_FALSE(v.finite);
    EXPECT_TRUE(std::isinf(v.lambda));
    const DomainBounds d = domain_bounds(P1, Marginal::X, 0.05);
    EXPECT_FALSE(cgf_eval(P1, Marginal::X, d.upper + 0.1, 0.05).finite);
    EXPECT_FALSE(cgf_eval(P1, Marginal::X, d.lower - 0.1, 0.05).finite);
    EXPECT_TRUE(cgf_eval(P1, Marginal::X, d.upper - 1e-3, 0.05).finite);
}

TEST(CgfEval, LinearDecayInsideLimitingDomain) {
    for (const Marginal m : {Marginal::X, Marginal::V}) {
        for (const double u : {-4.0, 3.0, 10.0}) {
            const ExpansionCoeffs c = expansion_coeffs(P1, m, u);
            const double limit = -0.5 * P1.mu() * (c.g0 + 2.0 * std::log(c.f0));
            double prev_err = kInfinity;
            for (const double t : {0.1, 0.05, 0.01}) {
                const CgfValue v = cgf_eval(P1, m, u, t);
                ASSERT_TRUE(v.finite);
                const double err = std::abs(v.lambda / t - limit);
                EXPECT_LT(err, prev_err);
                prev_err = err;
            }
        }
    }
}

TEST(CgfEval, MomentsAtOrigin) {
    const double a = P1.a(), b = P1.b();
    for (const double t : {0.2, 0.05}) {
        const double mean_v = a * (std::exp(b * t) - 1.0) / b;
        EXPECT_NEAR(cgf_derivative(P1, Marginal::V, 0.0, t, 1), mean_v, 1e-13);
        const double mean_x = -0.5 * (a / b) * ((std::exp(b * t) - 1.0) / b - t);
        EXPECT_NEAR(cgf_derivative(P1, Marginal::X, 0.0, t, 1), mean_x, 1e-12);
    }
}

TEST(CgfDerivative, VarianceAnalytic) {
    for (const double t : {0.3, 0.02}) {
        const double k = P1.xi() * P1.xi() * std::expm1(P1.b() * t) / (2.0 * P1.b() * t);
        for (const double u : {-10.0, 1.0, 11.0}) {
            const double d1 = P1.mu() * t * k / (1.0 - u * k);
            const double d2 = P1.mu() * t * k * k / ((1.0 - u * k) * (1.0 - u * k));
            EXPECT_NEAR(cgf_derivative(P1, Marginal::V, u, t, 1), d1, 1e-13 * std::abs(d1));
            EXPECT_NEAR(cgf_derivative(P1, Marginal::V, u, t, 2), d2, 1e-6 * d2);
        }
    }
}

TEST(CgfDerivative, ConvexInterior) {
    for (const Marginal m : {Marginal::X, Marginal::V}) {
        for (const double t : {0.1, 0.01}) {
            const DomainBounds d = domain_bounds(P1, m, t);
            const double lo = std::isfinite(d.lower) ? d.lower : -50.0;
            for (int i = 1; i < 40; ++i) {
                const double u = lo + (d.upper - lo) * i / 40.0;
                EXPECT_GT(cgf_derivative(P1, m, u, t, 2), 0.0) << u;
            }
        }
    }
}

TEST(CgfDerivative, BoundaryRefused) {
    const DomainBounds d = domain_bounds(P1, Marginal::V, 0.1);
    try {
        cgf_derivative(P1, Marginal::V, d.upper * (1.0 - 1e-12), 0.1, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TooCloseToBoundary);
    }
    EXPECT_THROW(cgf_derivative(P1, Marginal::X, 100.0, 0.1, 2), Error);
}

TEST(ExpansionCoeffs, ReferenceValues) {
    const ExpansionCoeffs at0 = expansion_coeffs(P1, Marginal::X, 0.0);
    EXPECT_EQ(at0.f0, 1.0);
    EXPECT_EQ(at0.f1, -P1.b() / 2.0);
    EXPECT_EQ(at0.g0, 0.0);
    const double theta = P1.rho_bar() * P1.xi() * 3.0 / 2.0;
    EXPECT_NEAR(expansion_coeffs(P1, Marginal::X, 3.0).f0,
                std::cos(theta) - P1.rho() / P1.rho_bar() * std::sin(theta), 1e-15);
    EXPECT_NEAR(expansion_coeffs(P1, Marginal::X, 3.0).f0, 1.15469, 1e-5);
    EXPECT_NEAR(expansion_coeffs(P1, Marginal::V, 2.0 / (P1.xi() * P1.xi())).f0, 0.0, 1e-15);
    // f1 is continuous through u = 0
    EXPECT_NEAR(expansion_coeffs(P1, Marginal::X, 1e-7).f1, -P1.b() / 2.0, 1e-6);
}

TEST(ExpansionCoeffs, LeadingDerivativeMatchesDifference) {
    for (const Marginal m : {Marginal::X, Marginal::V})
        for (const double u : {-3.0, 0.5, 8.0}) {
            const double h = 1e-5;
            const double fd =
                (expansion_coeffs(P1, m, u + h).f0 - expansion_coeffs(P1, m, u - h).f0) / (2.0 * h);
            EXPECT_NEAR(f0_derivative(P1, m, u), fd, 1e-8);
        }
}

TEST(ExpansionCoeffs, UniformOrderOnCompacts) {
    const std::vector<double> ts{0.1, 0.05, 0.02, 0.01};
    for (const Marginal m : {Marginal::X, Marginal::V}) {
        std::vector<double> f_err, g_err;
        for (const double t : ts) {
            double fe = 0, ge = 0;
            for (const double u : compact_grid(m)) {
                const ExpansionCoeffs c = expansion_coeffs(P1, m, u);
                fe = std::max(fe, std::abs(f_t(P1, m, u, t).real() - c.f0 - c.f1 * t));
                ge = std::max(ge, std::abs(g_t(P1, m, u, t).real() - c.g0));
            }
            f_err.push_back(fe);
            g_err.push_back(ge);
        }
        const double fs = slope(ts, f_err);
        EXPECT_GE(fs, 1.8) << to_string(m);
        EXPECT_LE(fs, 2.2) << to_string(m);
        if (m == Marginal::X) {
            const double gs = slope(ts, g_err);
            EXPECT_GE(gs, 0.8);
            EXPECT_LE(gs, 1.2);
        } else {
            for (const double e : g_err) EXPECT_EQ(e, 0.0);
        }
    }
}
