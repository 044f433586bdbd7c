#pragma once

namespace sharpld {

// Regularized incomplete gamma functions P(a, z) + Q(a, z) = 1 for a > 0, z >= 0.
// Series for P when z <= a + 1, Lentz continued fraction for Q otherwise.

inline constexpr double kIncompleteGammaTolerance = 1e-15;

double gamma_p(double a, double z);
double gamma_q(double a, double z);
/// log Q(a, z), accurate far into the tail where Q itself underflows.
double log_gamma_q(double a, double z);

} // namespace sharpld
