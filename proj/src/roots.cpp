#include "roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace sharpld::detail {

double bisect(const std::function<double(double)>& f, double lo, double hi, double rel_tol) {
    const bool lo_positive = f(lo) > 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (std::abs(hi - lo) <= rel_tol * std::max(std::abs(lo), std::abs(hi)) || mid == lo || mid == hi)
            return mid;
        if ((f(mid) > 0.0) == lo_positive)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

BrentResult brent(const std::function<double(double)>& f, double lo, double hi, double f_tol,
                  int max_iter) {
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return {a, fa, 0};
    if (fb == 0.0) return {b, fb, 0};
    if (std::abs(fa) < std::abs(fb)) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    double c = a, fc = fa, d = b - a;
    bool bisected = true;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    int it = 0;
    for (; it < max_iter; ++it) {
        if (std::abs(fb) <= f_tol) break;
        if (std::abs(b - a) <= 4.0 * eps * std::abs(b)) break;

        double s;
        if (fa != fc && fb != fc) {
            s = a * fb * fc / ((fa - fb) * (fa - fc)) + b * fa * fc / ((fb - fa) * (fb - fc)) +
                c * fa * fb / ((fc - fa) * (fc - fb));
        } else {
            s = b - fb * (b - a) / (fb - fa);
        }
        const double q = (3.0 * a + b) / 4.0;
        const bool outside = !((s > std::min(q, b) && s < std::max(q, b)));
        const bool slow_bis = bisected && std::abs(s - b) >= std::abs(b - c) / 2.0;
        const bool slow_int = !bisected && std::abs(s - b) >= std::abs(c - d) / 2.0;
        if (outside || slow_bis || slow_int) {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }
        const double fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if ((fa < 0.0) != (fs < 0.0)) {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if (std::abs(fa) < std::abs(fb)) {
            std::swap(a, b);
            std::swap(fa, fb);
        }
    }
    return {b, fb, it};
}

} // namespace sharpld::detail
