#pragma once

#include <functional>

namespace sharpld {

struct QuadratureOptions {
    double abs_tol = 0.0;
    double rel_tol = 1e-12;
    int max_intervals = 20000;
};

struct QuadratureResult {
    double value;
    double error;      // sum of |K21 - G10| over the final partition
    int evaluations;
    bool converged;
};

/// Globally adaptive 21-point Gauss-Kronrod: the interval with the largest
/// error estimate is bisected until error <= max(abs_tol, rel_tol |value|).
QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           const QuadratureOptions& opts = {});

/// Integral over [lo, +inf) through u = lo + (1 - s)/s, s in (0, 1].
QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double lo,
                                       const QuadratureOptions& opts = {});

} // namespace sharpld
