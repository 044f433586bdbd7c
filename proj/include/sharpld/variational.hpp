#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "sharpld/model.hpp"

namespace sharpld {

/// Path values at the uniform knots i/n, i = 0..n, of [0, 1].
struct PathGrid {
    std::vector<double> values;
    double v0;
    double x;

    [[nodiscard]] std::size_t n() const noexcept { return values.empty() ? 0 : values.size() - 1; }
};

/// Checks values[0] = v0, values[n] = x, n >= 1 and non-negative entries.
PathGrid make_path(std::vector<double> values);

/// Midpoint rule sum_i (dphi_i)^2 / (2 xi^2 phibar_i dt), phibar_i = (phi_i + phi_{i+1})/2.
/// A cell with phibar_i = 0 contributes 0 when dphi_i = 0 and +inf otherwise.
ExtendedReal action(double xi, const PathGrid& path);
ExtendedReal action(const ModelParams& p, const PathGrid& path);

/// (2/xi^2) sum_i (dpsi_i)^2 / dt with psi = sqrt(phi).
double psi_action(double xi, const PathGrid& path);

/// (sqrt(v0) + s (sqrt(x) - sqrt(v0)))^2 at the knots.
PathGrid squared_psi_line(double v0, double x, std::size_t n);

/// phi linear in s from v0 to x.
PathGrid straight_line(double v0, double x, std::size_t n);

struct ActionResult {
    ExtendedReal value;
    PathGrid minimizer;
    std::size_t n;
};

struct ActionMinimization {
    ActionResult closed_form_path; // action of squared_psi_line
    ActionResult optimized;        // numerical minimum over the interior knots
    std::size_t iterations;
    double gradient_norm;
};

inline constexpr double kActionGradientTolerance = 1e-8;
inline constexpr std::size_t kActionIterationCap = 100000;

/// Minimizes the discrete action over the interior knots with phi >= 0, starting
/// from straight_line. Damped Newton steps on the tridiagonal Hessian, kept
/// feasible by a fraction-to-boundary rule. Non-negative x only; x < 0 yields
/// +inf for both results. Error(NonConvergence) (with the best value in the
/// message) when the gradient norm is still above kActionGradientTolerance after
/// kActionIterationCap iterations.
ActionMinimization minimize_action(double xi, double v0, double x, std::size_t n);
ActionMinimization minimize_action(const ModelParams& p, double v0, double x, std::size_t n);

struct ContractionRow {
    double x;
    ExtendedReal action;  // optimized discrete action
    ExtendedReal fw_rate; // (2/xi^2)(sqrt(x) - sqrt(v0))^2
    ExtendedReal gap;
};

std::vector<ContractionRow> contraction_curve(double xi, double v0, std::span<const double> x_grid, std::size_t n);
std::vector<ContractionRow> contraction_curve(const ModelParams& p, double v0, std::span<const double> x_grid,
                                              std::size_t n);

/// "s,phi" header, one row per knot.
void write_path_csv(std::ostream& out, const PathGrid& path);

} // namespace sharpld
