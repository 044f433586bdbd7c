#include "sharpld/saddlepoint.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "roots.hpp"
#include "sharpld/cgf.hpp"
#include "sharpld/errors.hpp"

namespace sharpld {

namespace {

// Complex-step derivative without the boundary guard of cgf_derivative: the
// solver legitimately probes closer to the domain ends than the guard allows.
double raw_derivative(const ModelParams& p, Marginal m, double u, double t) {
    const double h = 1e-20 * std::max(1.0, std::abs(u));
    return cgf_complex(p, m, cplx(u, h), t).imag() / h;
}

SaddlepointResult solve(const ModelParams& p, Marginal m, double x, double t, std::optional<double> seed) {
    if (!(t > 0.0)) throw Error(ErrorCode::ParameterOutOfRange, "t must be > 0");
    const DomainBounds bounds = domain_bounds(p, m, t);
    auto F = [&](double u) { return raw_derivative(p, m, u, t) - x; };

    const double scale = std::isfinite(bounds.lower) ? bounds.width() : std::max(1.0, std::abs(bounds.upper));
    const double tol = 0.01 * kSaddleResidualTolerance * std::max(1.0, std::abs(x));

    for (const double shrink : std::array{1.0, 0.1, 0.01}) {
        const double eps = 1e-8 * scale * shrink;
        double hi = bounds.upper - eps;
        double lo;
        if (std::isfinite(bounds.lower)) {
            lo = bounds.lower + eps;
        } else {
            // d/du Lambda_V decreases to 0 as u -> -inf; walk out until below x.
            lo = std::min(-1.0, hi - 1.0);
            while (F(lo) > 0.0 && std::isfinite(lo)) lo *= 2.0;
            if (!std::isfinite(lo)) break;
        }
        if (!(F(lo) < 0.0 && F(hi) > 0.0)) continue;

        const Interval bracket{lo, hi};
        if (seed && *seed > lo && *seed < hi) {
            const double fs = F(*seed);
            if (fs < 0.0) lo = *seed; else hi = *seed;
        }
        const auto root = detail::brent(F, lo, hi, tol);
        const double residual = std::abs(F(root.root));
        if (residual > kSaddleResidualTolerance * std::max(1.0, std::abs(x)))
            throw Error(ErrorCode::NonConvergence, "saddlepoint residual " + std::to_string(residual) +
                                                       " above tolerance at x = " + std::to_string(x));
        return {root.root, residual, bracket, t, x};
    }
    throw Error(ErrorCode::RootNotBracketed,
                "no sign change of dLambda/du - x in the domain at x = " + std::to_string(x) +
                    ", t = " + std::to_string(t));
}

} // namespace

SaddlepointResult saddle_v(const ModelParams& p, double x, double t) {
    if (!(x > 0.0)) throw Error(ErrorCode::OutsideSupport, "V saddlepoint needs x > 0, got " + std::to_string(x));
    if (!(t > 0.0)) throw Error(ErrorCode::ParameterOutOfRange, "t must be > 0");
    const double xi2 = p.xi() * p.xi();
    const double bt = p.b() * t;
    const double u = (2.0 * t / xi2) * (p.b() / std::expm1(bt) - p.a() / x);
    const DomainBounds bounds = domain_bounds(p, Marginal::V, t);
    const double residual = std::abs(cgf_derivative(p, Marginal::V, u, t, 1, bounds) - x);
    return {u, residual, {bounds.lower, bounds.upper}, t, x};
}

SaddlepointResult saddle_x(const ModelParams& p, double x, double t, std::optional<double> seed) {
    if (x == 0.0 || !std::isfinite(x))
        throw Error(ErrorCode::OutsideSupport, "X saddlepoint needs x != 0; use saddle_x0 for x = 0");
    return solve(p, Marginal::X, x, t, seed);
}

SaddlepointResult saddle_x0(const ModelParams& p, double t) {
    SaddlepointResult r = solve(p, Marginal::X, 0.0, t, std::nullopt);
    if (!(r.u_star > 0.0))
        throw Error(ErrorCode::NonPositiveSaddle, "u*(0, t) = " + std::to_string(r.u_star) + " is not positive");
    return r;
}

SaddlepointResult saddle_numeric(const ModelParams& p, Marginal m, double x, double t,
                                 std::optional<double> seed) {
    return solve(p, m, x, t, seed);
}

SaddlepointResult saddle(const ModelParams& p, Marginal m, double x, double t) {
    return m == Marginal::V ? saddle_v(p, x, t) : saddle_x(p, x, t);
}

} // namespace sharpld
