#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "sharpld/model.hpp"

namespace sharpld {

struct McConfig {
    std::uint64_t n_paths = 100000;
    std::uint32_t n_steps = 200;
    std::uint64_t seed = 1;
    std::uint32_t stream_count = 8;
};

struct McEstimate {
    double p_hat;
    double std_err; // sqrt(p_hat (1 - p_hat) / n_paths)
    std::uint64_t n_paths;
    std::uint64_t hits;
};

struct XVSample {
    double x;
    double v;
    double integrated_variance; // trapezoid value of int_0^t V ds
};

/// Minimum expected number of hits tail_mc accepts.
inline constexpr double kMinExpectedHits = 10.0;

/// Gamma(shape, 1) by Marsaglia and Tsang: for shape >= 1 accept
/// d v with d = shape - 1/3, v = (1 + c z)^3, c = 1/sqrt(9d), when
/// log U < z^2/2 + d - d v + d log v. Shapes below 1 use
/// Gamma(shape + 1) U^{1/shape}.
double sample_gamma(std::mt19937_64& rng, double shape);

/// Generator for stream k of a run seeded with seed.
std::mt19937_64 stream_engine(std::uint64_t seed, std::uint32_t stream);

/// Exact draws of V_t ~ Gamma(mu, lambda_t).
std::vector<double> sample_v_exact(const ModelParams& p, double t, const McConfig& cfg);

/// Paths of (X_t, V_t): V by exact square-root transitions on n_steps equal
/// steps, X through
///   X_t = -I/2 + (rho/xi)(V_t - a t - b I) + rho_bar sqrt(I) N(0, 1),  I = int_0^t V ds,
/// with I by the trapezoid rule.
std::vector<XVSample> simulate_xv(const ModelParams& p, double t, const McConfig& cfg);

/// Indicator-mean estimate of P(M_t >= x). V uses exact draws. Throws
/// Error(ProbabilityTooSmallForN) when fewer than kMinExpectedHits hits are expected
/// (or observed).
McEstimate tail_mc(const ModelParams& p, Marginal m, double x, double t, const McConfig& cfg);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

/// "x,v" header, one row per path.
void write_samples_csv(std::ostream& out, const std::vector<XVSample>& samples);

} // namespace sharpld
