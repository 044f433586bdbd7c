#pragma once

#include <array>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "sharpld/model.hpp"

namespace sharpld {

struct RateValue {
    ExtendedReal value; // >= 0, possibly +inf
    double x;
};

/// Piecewise linear: u_- x for x < 0, u_+ x for x >= 0.
RateValue rate_x(const ModelParams& p, double x);
/// 2x/xi^2 for x >= 0, +inf below.
RateValue rate_v(const ModelParams& p, double x);
/// Marginal rate function of the small-noise square-root diffusion started at
/// v0: (2/xi^2)(sqrt(x) - sqrt(v0))^2 for x >= 0, +inf below.
RateValue fw_rate(double xi, double v0, double x);
RateValue fw_rate(const ModelParams& p, double v0, double x);
RateValue rate(const ModelParams& p, Marginal m, double x);

struct AlphaCoeffs {
    double alpha0;
    double alpha1;
};

/// Leading saddlepoint limit alpha0(x) = lim u*(x, t).
double alpha0(const ModelParams& p, Marginal m, double x);

/// alpha0 and the first-order coefficient of u*(x, t) = alpha0 + alpha1 t + O(t^2).
/// V: alpha1 = -b/xi^2 - mu/x. X: polynomial extrapolation to t = 0 of
/// (u*(x, t) - alpha0)/t over kAlphaExtrapolationTimes.
/// Error(OutsideSupport) for x = 0 (X) or x <= 0 (V).
AlphaCoeffs alpha_coeffs(const ModelParams& p, Marginal m, double x);

inline constexpr std::array<double, 3> kAlphaExtrapolationTimes = {0.02, 0.01, 0.005};

/// Neville evaluation at t = 0 of the polynomial through (ts[i], values[i]).
double extrapolate_to_zero(std::span<const double> ts, std::span<const double> values);

/// A one-dimensional convex function on an interval, as seen by the Legendre
/// transform. The *_limit fields give the limit of the function at a finite
/// endpoint from inside (+inf when it blows up there).
struct CgfCurve {
    ExtendedReal lower;
    ExtendedReal upper;
    std::function<double(double)> eval;
    ExtendedReal lower_limit = kInfinity;
    ExtendedReal upper_limit = kInfinity;
};

enum class DivergencePolicy { ReturnInfinity, Throw };

struct LegendreOptions {
    std::size_t samples = 200;   // interior grid, at least 100
    DivergencePolicy on_divergence = DivergencePolicy::ReturnInfinity;
};

/// sup_u {u x - Lambda(u)}: grid maximum refined by golden section, compared
/// with the endpoint limits. Unbounded sides are probed on a geometric grid
/// out to the end of the double range; an objective still increasing at its
/// last three points there means the supremum is +inf (or, with
/// DivergencePolicy::Throw, Error(UnboundedAbove)).
RateValue legendre_transform(const CgfCurve& curve, double x, const LegendreOptions& opts = {});

/// The small-time limit of Lambda_M(., t): zero on the limiting domain.
CgfCurve limiting_cgf(const ModelParams& p, Marginal m);

struct PointwiseLimitRow {
    double t;
    double max_abs_cgf; // max |Lambda_M(u, t)| over a compact inside the limiting domain
};

struct SteepnessReport {
    DomainBounds domain;
    std::pair<ExtendedReal, ExtendedReal> boundary_slopes; // lim |Lambda'| toward each end
    bool essentially_smooth;
    std::vector<PointwiseLimitRow> pointwise_limit;
};

/// Boundary-slope diagnostic on an arbitrary curve. |Lambda'| is probed at
/// distances 10^{-k} (finite end) or scales 10^k (infinite end), k = 1..9; a
/// slope is reported as +inf when it grows strictly over the last four probes
/// and either ends above 1e6 or has grown a hundredfold over them.
SteepnessReport steepness_of(const CgfCurve& curve);

/// Steepness of the limiting cgf of marginal m, together with the pointwise
/// decay of Lambda_M(., t) over t_grid that identifies that limit.
SteepnessReport steepness_report(const ModelParams& p, Marginal m, std::span<const double> t_grid);

} // namespace sharpld
