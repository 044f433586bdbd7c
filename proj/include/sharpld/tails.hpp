#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sharpld/model.hpp"

namespace sharpld {

struct McConfig;

enum class TailMethod { Sharp, GammaExact, Fourier, MonteCarlo };

std::string_view to_string(TailMethod m) noexcept;
TailMethod parse_tail_method(std::string_view s);

/// Estimate of P(M_t >= x). log_p is the primary field; p = exp(log_p) may
/// underflow to zero (and exceeds 1 for the asymptotic formula at large t).
struct TailEstimate {
    double p;
    double log_p;
    TailMethod method;
    double error; // relative error bound, or the Monte Carlo standard error of p
    std::string note;
};

/// Rate of the Gamma law of V_t: -2b / (xi^2 (1 - e^{bt})).
double gamma_rate(const ModelParams& p, double t);

/// Exact P(V_t >= x) = Q(mu, lambda_t x).
TailEstimate gamma_tail_v(const ModelParams& p, double x, double t);

/// Prefactor of the V tail: e^{bx/xi^2} (2x/xi^2)^{mu-1} / Gamma(mu).
double sharp_prefactor_v(const ModelParams& p, double x);

/// C t^{1-mu} exp(-rate(x)/t) for x > 0 and 1 - (same) for x < 0 (X only).
/// V uses sharp_prefactor_v unless a prefactor is supplied; X needs one
/// (Error(MissingPrefactor) otherwise). For V and x < 0 the exact value 1 is
/// returned.
TailEstimate sharp_tail(const ModelParams& p, Marginal m, double x, double t,
                        std::optional<double> prefactor = std::nullopt);

/// (-mu f0'(alpha0)/x)^{-mu} exp(-x alpha1 - (mu/2) g0(alpha0)).
double saddle_prefactor(const ModelParams& p, Marginal m, double x);

/// Characteristic function of Z = M_t - x under the measure tilted by the
/// saddlepoint u*(x, t):
///   Phi(u) = exp(-iux + [Lambda_M(u* + iut, t) - Lambda_M(u*, t)]/t).
/// The logarithm of f_t along u* + iut is continued from u = 0 by an adaptive
/// phase-unwrapping grid, so Phi stays on the correct branch for any |u|.
/// Holds mutable scratch; not for sharing between threads.
class TiltedIntegrand {
public:
    TiltedIntegrand(const ModelParams& p, Marginal m, double x, double t);

    [[nodiscard]] double u_star() const noexcept { return u_star_; }
    /// u*/t, the shift in the Fourier kernel (u*/t + iu)^{-1}.
    [[nodiscard]] double denominator_shift() const noexcept { return u_star_ / t_; }
    /// Lambda_M(u*, t).
    [[nodiscard]] double cgf_at_saddle() const noexcept { return lambda_star_; }
    [[nodiscard]] double x() const noexcept { return x_; }
    [[nodiscard]] double t() const noexcept { return t_; }

    std::complex<double> phi(double u);
    /// Phi(u) / (u*/t + iu).
    std::complex<double> kernel(double u);
    /// Unwrapped phase change of f_t along [0, u], for oscillation counting.
    double phase_span(double u);

private:
    double principal_arg(double u) const;
    void extend_to(double u);
    double unwrapped_arg(double u);

    ModelParams params_;
    Marginal marginal_;
    double x_, t_;
    double u_star_;
    double lambda_star_;
    double log_f_star_;
    std::vector<double> nodes_;
    std::vector<double> phases_;
    double next_step_;
};

/// P(M_t >= x) = exp((Lambda(u*, t) - x u*)/t) (1/2pi) int Phi(u) / (u*/t + iu) du.
/// The integral runs over [-U, U] (by conjugate symmetry, twice the real part
/// on [0, U]) with U = 50/(t xi) doubled until two successive shells add less
/// than 1e-10 of the running total. Error(NonPositiveSaddle) when u* <= 0,
/// Error(IntegrandNotDecaying) when the shells do not settle.
TailEstimate tilted_fourier_tail(const ModelParams& p, Marginal m, double x, double t);

/// int_R |Phi(u) / (u*/t + iu)| du.
double tilted_l1_norm(const ModelParams& p, Marginal m, double x, double t);

struct PrefactorFit {
    double c_hat;          // fit of log C with exponent 1 - mu and the rate held fixed
    double exponent_free;  // fitted t exponent when it is left free
    double c_free;         // prefactor of that free fit
    std::vector<double> t;
    std::vector<double> log_p;
    std::vector<double> residual; // log p - log(c_hat t^{1-mu} e^{-rate/t})
    double residual_slope;        // least-squares slope of residual against t
};

/// Least-squares fit of log p(t) = log C + (1 - mu) log t - rate(x)/t to Fourier
/// tail values. t_grid must be strictly decreasing with at least 4 points.
PrefactorFit extract_prefactor(const ModelParams& p, Marginal m, double x, std::span<const double> t_grid);

struct ConvergenceRow {
    double t;
    double neg_t_log_p;
    double rate;
    double gap; // |neg_t_log_p - rate|
};

/// -t log P(M_t >= x) against the rate function along t_grid. gamma_exact is V
/// only; monte_carlo needs a config.
std::vector<ConvergenceRow> ldp_convergence(const ModelParams& p, Marginal m, double x,
                                            std::span<const double> t_grid, TailMethod method,
                                            const McConfig* mc = nullptr);

/// Tail probability by the named method (sharp needs a prefactor for X).
TailEstimate tail(const ModelParams& p, Marginal m, double x, double t, TailMethod method,
                  const McConfig* mc = nullptr, std::optional<double> prefactor = std::nullopt);

} // namespace sharpld
