#include "sharpld/special.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sharpld/errors.hpp"

namespace sharpld {

namespace {

constexpr int kMaxIter = 10000;

void check_args(double a, double z) {
    if (!(a > 0.0) || !(z >= 0.0))
        throw Error(ErrorCode::ParameterOutOfRange,
                    "incomplete gamma needs a > 0, z >= 0 (a = " + std::to_string(a) +
                        ", z = " + std::to_string(z) + ")");
}

// log of z^a e^{-z} / Gamma(a)
double log_prefix(double a, double z) { return a * std::log(z) - z - std::lgamma(a); }

// P(a, z) by the series sum_k z^k / (a (a+1) ... (a+k)).
double lower_series(double a, double z) {
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < kMaxIter; ++k) {
        term *= z / (a + k);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kIncompleteGammaTolerance) break;
    }
    return std::exp(log_prefix(a, z)) * sum;
}

// log Q(a, z) via the modified Lentz evaluation of
// Q = prefix * 1/(z+1-a- 1(1-a)/(z+3-a- 2(2-a)/(z+5-a- ...))).
double log_upper_cf(double a, double z) {
    constexpr double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    double bn = z + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / bn;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        bn += 2.0;
        d = an * d + bn;
        if (std::abs(d) < tiny) d = tiny;
        c = bn + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kIncompleteGammaTolerance) break;
    }
    return log_prefix(a, z) + std::log(h);
}

} // namespace

double gamma_p(double a, double z) {
    check_args(a, z);
    if (z == 0.0) return 0.0;
    if (z <= a + 1.0) return lower_series(a, z);
    return -std::expm1(log_upper_cf(a, z));
}

double gamma_q(double a, double z) { return std::exp(log_gamma_q(a, z)); }

double log_gamma_q(double a, double z) {
    check_args(a, z);
    if (z == 0.0) return 0.0;
    if (z <= a + 1.0) return std::log1p(-lower_series(a, z));
    return log_upper_cf(a, z);
}

} // namespace sharpld
