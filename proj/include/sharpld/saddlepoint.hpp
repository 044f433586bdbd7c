#pragma once

#include <optional>

#include "sharpld/model.hpp"

namespace sharpld {

struct Interval {
    double lo;
    double hi;
};

/// Solution of d/du Lambda_M(u, t) = x.
struct SaddlepointResult {
    double u_star;
    double residual; // |d/du Lambda_M(u_star, t) - x|
    Interval bracket;
    double t;
    double x;
};

inline constexpr double kSaddleResidualTolerance = 1e-10;

/// Closed form (2t/xi^2) (b / (e^{bt} - 1) - a / x); Error(OutsideSupport) for x <= 0.
SaddlepointResult saddle_v(const ModelParams& p, double x, double t);

/// Bracketed Brent solve on (u_-(t) + eps, u_+(t) - eps), eps = 1e-8 (u_+(t) - u_-(t)),
/// retried with eps/10 and eps/100 before giving up with Error(RootNotBracketed).
/// A seed strictly inside the bracket is used to tighten it before iterating.
SaddlepointResult saddle_x(const ModelParams& p, double x, double t,
                           std::optional<double> seed = std::nullopt);

/// The x = 0 root, i.e. the minimiser of Lambda_X(., t); strictly positive.
SaddlepointResult saddle_x0(const ModelParams& p, double t);

/// Generic numeric solve for either marginal (any x in the range of the
/// derivative). saddle_v and saddle_x are preferred; this exists so the two
/// routes can be compared.
SaddlepointResult saddle_numeric(const ModelParams& p, Marginal m, double x, double t,
                                 std::optional<double> seed = std::nullopt);

/// saddle_v for V, saddle_x for X.
SaddlepointResult saddle(const ModelParams& p, Marginal m, double x, double t);

} // namespace sharpld
