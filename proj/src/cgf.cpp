#include "sharpld/cgf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sharpld/errors.hpp"

namespace sharpld {

namespace {

// sinh(z)/z without the 0/0 at the origin.
cplx sinhc(cplx z) {
    if (std::abs(z) < 1e-4) {
        const cplx z2 = z * z;
        return 1.0 + z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sinh(z) / z;
}

double sinc(double z) {
    if (std::abs(z) < 1e-4) {
        const double z2 = z * z;
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sin(z) / z;
}

// xi^2 (1 - e^{bt}) / (2 b t), the slope of f_t^V in u.
double v_slope(const ModelParams& p, double t) {
    const double bt = p.b() * t;
    return -p.xi() * p.xi() * std::expm1(bt) / (2.0 * bt);
}

bool strictly_inside(const DomainBounds& bounds, double u) {
    const double lo_guard = std::isfinite(bounds.lower) ? kBoundaryGuard * std::max(1.0, std::abs(bounds.lower)) : 0.0;
    const double hi_guard = std::isfinite(bounds.upper) ? kBoundaryGuard * std::max(1.0, std::abs(bounds.upper)) : 0.0;
    return u > bounds.lower + lo_guard && u < bounds.upper - hi_guard;
}

void require_positive_time(double t) {
    if (!(t > 0.0) || !std::isfinite(t))
        throw Error(ErrorCode::ParameterOutOfRange, "t must be > 0, got " + std::to_string(t));
}

} // namespace

cplx d_fn(const ModelParams& p, cplx u) {
    const cplx drift = p.b() + p.rho() * p.xi() * u;
    return std::sqrt(drift * drift + u * (1.0 - u) * p.xi() * p.xi());
}

cplx g_t(const ModelParams& p, Marginal m, cplx u, double t) {
    if (m == Marginal::V) return 0.0;
    return p.b() * t + p.rho() * p.xi() * u;
}

cplx f_t(const ModelParams& p, Marginal m, cplx u, double t) {
    if (m == Marginal::V) return 1.0 + u * v_slope(p, t);
    // g / (t d) sinh(d t / 2) == (g / 2) sinh(z) / z with z = d t / 2.
    const cplx z = d_fn(p, u / t) * (0.5 * t);
    return std::cosh(z) - 0.5 * g_t(p, m, u, t) * sinhc(z);
}

cplx cgf_complex(const ModelParams& p, Marginal m, cplx u, double t) {
    const double mu = p.mu();
    const cplx log_f = std::log(f_t(p, m, u, t));
    if (m == Marginal::V) return -mu * t * log_f;
    return -0.5 * mu * t * (g_t(p, m, u, t) + 2.0 * log_f);
}

CgfValue cgf_eval(const ModelParams& p, Marginal m, double u, double t) {
    require_positive_time(t);
    return cgf_eval(p, m, u, t, domain_bounds(p, m, t));
}

CgfValue cgf_eval(const ModelParams& p, Marginal m, double u, double t, const DomainBounds& bounds) {
    require_positive_time(t);
    const cplx f = f_t(p, m, u, t);
    const double g = g_t(p, m, u, t).real();
    if (!strictly_inside(bounds, u)) return {kInfinity, f, g, false};

    const cplx lambda = cgf_complex(p, m, u, t);
    if (std::abs(lambda.imag()) > kRealnessTolerance)
        throw Error(ErrorCode::NonRealResult, "Im Lambda = " + std::to_string(lambda.imag()) +
                                                  " at u = " + std::to_string(u));
    return {lambda.real(), m == Marginal::V ? cplx(f.real(), 0.0) : f, g, true};
}

ExpansionCoeffs expansion_coeffs(const ModelParams& p, Marginal m, double u) {
    const double xi = p.xi(), b = p.b();
    if (m == Marginal::V) return {1.0 - 0.5 * u * xi * xi, -0.25 * b * u * xi * xi, 0.0};

    const double rho = p.rho(), rb = p.rho_bar();
    const double theta = 0.5 * rb * xi * u;
    const double c = std::cos(theta), s = std::sin(theta);
    const double f0 = c - rho / rb * s;
    double f1;
    if (u == 0.0) {
        f1 = -0.5 * b;
    } else {
        // sin(theta)/u == (rb xi / 2) sinc(theta), finite through the origin.
        const double sin_over_u = 0.5 * rb * xi * sinc(theta);
        f1 = rho * (xi + 2.0 * b * rho) / (4.0 * rb * rb) * c + (xi + 2.0 * b * rho) / (4.0 * rb) * s -
             (xi * rho + 2.0 * b) / (2.0 * xi * rb * rb * rb) * sin_over_u;
    }
    return {f0, f1, rho * xi * u};
}

double f0_derivative(const ModelParams& p, Marginal m, double u) {
    const double xi = p.xi();
    if (m == Marginal::V) return -0.5 * xi * xi;
    const double theta = 0.5 * p.rho_bar() * xi * u;
    return -0.5 * p.rho_bar() * xi * std::sin(theta) - 0.5 * p.rho() * xi * std::cos(theta);
}

double cgf_derivative(const ModelParams& p, Marginal m, double u, double t, int order) {
    require_positive_time(t);
    return cgf_derivative(p, m, u, t, order, domain_bounds(p, m, t));
}

double cgf_derivative(const ModelParams& p, Marginal m, double u, double t, int order,
                      const DomainBounds& bounds) {
    require_positive_time(t);
    if (order != 1 && order != 2)
        throw Error(ErrorCode::ParameterOutOfRange, "derivative order must be 1 or 2");
    if (!strictly_inside(bounds, u))
        throw Error(ErrorCode::TooCloseToBoundary, "u = " + std::to_string(u) + " is not interior");

    auto first = [&](double v) {
        const double h = 1e-20 * std::max(1.0, std::abs(v));
        return cgf_complex(p, m, cplx(v, h), t).imag() / h;
    };
    if (order == 1) return first(u);

    double h = std::max(1e-6, 1e-6 * std::abs(u));
    const double room = std::min(u - bounds.lower, bounds.upper - u);
    if (h >= 0.5 * room) h = 0.25 * room;
    if (!strictly_inside(bounds, u - h) || !strictly_inside(bounds, u + h) || h < 1e-12 * std::max(1.0, std::abs(u)))
        throw Error(ErrorCode::TooCloseToBoundary,
                    "second-difference stencil does not fit at u = " + std::to_string(u));
    return (first(u + h) - first(u - h)) / (2.0 * h);
}

} // namespace sharpld
