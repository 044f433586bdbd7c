#pragma once

#include <functional>

namespace sharpld::detail {

/// Bisection on a bracket with f(lo) and f(hi) of opposite sign (zero counts
/// as either). Stops when the bracket is narrower than rel_tol * max(|lo|, |hi|).
double bisect(const std::function<double(double)>& f, double lo, double hi, double rel_tol);

struct BrentResult {
    double root;
    double f_root;
    int iterations;
};

/// Brent's method (inverse quadratic / secant steps safeguarded by bisection).
/// Requires a sign change on [lo, hi]. Stops once |f| <= f_tol or the bracket
/// has collapsed to adjacent doubles.
BrentResult brent(const std::function<double(double)>& f, double lo, double hi, double f_tol,
                  int max_iter = 300);

} // namespace sharpld::detail
