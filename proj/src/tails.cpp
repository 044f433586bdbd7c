#include "sharpld/tails.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "sharpld/cgf.hpp"
#include "sharpld/errors.hpp"
#include "sharpld/montecarlo.hpp"
#include "sharpld/quadrature.hpp"
#include "sharpld/rate_functions.hpp"
#include "sharpld/saddlepoint.hpp"
#include "sharpld/special.hpp"

namespace sharpld {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kShellTolerance = 1e-10;
constexpr int kMaxShells = 60;

double wrap(double angle) { return std::remainder(angle, 2.0 * kPi); }

void require_time(double t) {
    if (!(t > 0.0) || !std::isfinite(t))
        throw Error(ErrorCode::ParameterOutOfRange, "t must be > 0, got " + std::to_string(t));
}

struct LogModArg {
    double log_mod;
    double arg; // principal
};

// log f_t at a complex argument, split into log-modulus and principal
// argument. For X with a large real part of z = d t / 2 the cosh/sinh form
// overflows, so it is rewritten as f = (e^z / 2) [(1 + e^{-2z}) - (g / 2z)(1 - e^{-2z})].
LogModArg log_f(const ModelParams& p, Marginal m, cplx w, double t) {
    if (m == Marginal::X) {
        const cplx z = d_fn(p, w / t) * (0.5 * t);
        if (z.real() > 20.0) {
            const cplx e = std::exp(-2.0 * z);
            const cplx bracket = (1.0 + e) - g_t(p, m, w, t) / (2.0 * z) * (1.0 - e);
            return {z.real() - std::numbers::ln2 + std::log(std::abs(bracket)), wrap(z.imag() + std::arg(bracket))};
        }
    }
    const cplx f = f_t(p, m, w, t);
    return {std::log(std::abs(f)), std::arg(f)};
}

} // namespace

std::string_view to_string(TailMethod m) noexcept {
    switch (m) {
    case TailMethod::Sharp: return "sharp";
    case TailMethod::GammaExact: return "gamma-exact";
    case TailMethod::Fourier: return "fourier";
    case TailMethod::MonteCarlo: return "monte-carlo";
    }
    return "unknown";
}

TailMethod parse_tail_method(std::string_view s) {
    if (s == "sharp") return TailMethod::Sharp;
    if (s == "gamma-exact" || s == "gamma_exact") return TailMethod::GammaExact;
    if (s == "fourier") return TailMethod::Fourier;
    if (s == "monte-carlo" || s == "monte_carlo" || s == "mc") return TailMethod::MonteCarlo;
    throw Error(ErrorCode::UnsupportedMethod, "unknown tail method '" + std::string(s) + "'");
}

double gamma_rate(const ModelParams& p, double t) {
    require_time(t);
    // -2b / (xi^2 (1 - e^{bt})) == 2b / (xi^2 expm1(bt))
    return 2.0 * p.b() / (p.xi() * p.xi() * std::expm1(p.b() * t));
}

TailEstimate gamma_tail_v(const ModelParams& p, double x, double t) {
    if (!(x > 0.0)) throw Error(ErrorCode::OutsideSupport, "gamma tail needs x > 0");
    const double z = gamma_rate(p, t) * x;
    const double log_p = log_gamma_q(p.mu(), z);
    return {std::exp(log_p), log_p, TailMethod::GammaExact, 1e-12, ""};
}

double sharp_prefactor_v(const ModelParams& p, double x) {
    if (!(x > 0.0)) throw Error(ErrorCode::OutsideSupport, "V prefactor needs x > 0");
    const double xi2 = p.xi() * p.xi();
    const double mu = p.mu();
    return std::exp(p.b() * x / xi2 + (mu - 1.0) * std::log(2.0 * x / xi2) - std::lgamma(mu));
}

TailEstimate sharp_tail(const ModelParams& p, Marginal m, double x, double t, std::optional<double> prefactor) {
    require_time(t);
    if (m == Marginal::V && x < 0.0)
        return {1.0, 0.0, TailMethod::Sharp, 0.0, "V >= 0 almost surely; exact value"};
    if (x == 0.0 || !std::isfinite(x)) throw Error(ErrorCode::OutsideSupport, "sharp tail needs x != 0");
    double c;
    if (prefactor) {
        c = *prefactor;
    } else if (m == Marginal::V) {
        c = sharp_prefactor_v(p, x);
    } else {
        throw Error(ErrorCode::MissingPrefactor, "X tail needs a prefactor (see extract_prefactor)");
    }
    if (!(c > 0.0)) throw Error(ErrorCode::ParameterOutOfRange, "prefactor must be > 0");

    const double log_main = std::log(c) + (1.0 - p.mu()) * std::log(t) - rate(p, m, x).value / t;
    if (x > 0.0) return {std::exp(log_main), log_main, TailMethod::Sharp, t, ""};
    const double pr = -std::expm1(log_main);
    return {pr, pr > 0.0 ? std::log1p(-std::exp(log_main)) : -kInfinity, TailMethod::Sharp, t,
            "complement of the lower tail"};
}

double saddle_prefactor(const ModelParams& p, Marginal m, double x) {
    const AlphaCoeffs alpha = alpha_coeffs(p, m, x);
    const double mu = p.mu();
    const double base = -mu * f0_derivative(p, m, alpha.alpha0) / x;
    const double g0 = expansion_coeffs(p, m, alpha.alpha0).g0;
    return std::pow(base, -mu) * std::exp(-x * alpha.alpha1 - 0.5 * mu * g0);
}

// ---------------------------------------------------------------------------
// Tilted characteristic function
// ---------------------------------------------------------------------------

TiltedIntegrand::TiltedIntegrand(const ModelParams& p, Marginal m, double x, double t)
    : params_(p), marginal_(m), x_(x), t_(t), next_step_(0.1) {
    require_time(t);
    if (x == 0.0 || !std::isfinite(x) || (m == Marginal::V && x < 0.0))
        throw Error(ErrorCode::OutsideSupport, "tilted inversion needs x in the support interior");
    u_star_ = saddle(p, m, x, t).u_star;
    if ((x > 0.0 && !(u_star_ > 0.0)) || (x < 0.0 && !(u_star_ < 0.0)))
        throw Error(ErrorCode::NonPositiveSaddle,
                    "saddlepoint u* = " + std::to_string(u_star_) + " has the wrong sign for x = " + std::to_string(x));
    lambda_star_ = cgf_complex(p, m, u_star_, t).real();
    log_f_star_ = std::log(f_t(p, m, u_star_, t).real());
    nodes_.push_back(0.0);
    phases_.push_back(0.0);
}

double TiltedIntegrand::principal_arg(double u) const {
    return log_f(params_, marginal_, cplx(u_star_, u * t_), t_).arg;
}

void TiltedIntegrand::extend_to(double u) {
    while (nodes_.back() < u) {
        const double u0 = nodes_.back();
        const double a0 = principal_arg(u0);
        double h = next_step_;
        for (;;) {
            const double u1 = u0 + h;
            const double full = wrap(principal_arg(u1) - a0);
            const double am = principal_arg(u0 + 0.5 * h);
            const double halves = wrap(am - a0) + wrap(principal_arg(u1) - am);
            const bool tiny = h < 1e-12 * std::max(1.0, u0);
            if (tiny || (std::abs(full) <= 0.5 && std::abs(halves - full) < 1e-9)) {
                nodes_.push_back(u1);
                phases_.push_back(phases_.back() + halves);
                next_step_ = std::abs(full) < 0.1 ? 2.0 * h : h;
                break;
            }
            h *= 0.5;
        }
    }
}

double TiltedIntegrand::unwrapped_arg(double u) {
    extend_to(u);
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), u);
    const std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - nodes_.begin()), nodes_.size() - 1);
    const std::size_t lo = hi == 0 ? 0 : hi - 1;
    double guess = phases_[lo];
    if (hi != lo) {
        const double w = (u - nodes_[lo]) / (nodes_[hi] - nodes_[lo]);
        guess = phases_[lo] + w * (phases_[hi] - phases_[lo]);
    }
    const double principal = principal_arg(u);
    return principal + 2.0 * kPi * std::round((guess - principal) / (2.0 * kPi));
}

std::complex<double> TiltedIntegrand::phi(double u) {
    if (u < 0.0) return std::conj(phi(-u));
    const double mu = params_.mu();
    const cplx w(u_star_, u * t_);
    const LogModArg lf = log_f(params_, marginal_, w, t_);
    const cplx log_fw(lf.log_mod, unwrapped_arg(u));
    const cplx dg = g_t(params_, marginal_, w, t_) - g_t(params_, marginal_, u_star_, t_);
    const cplx log_phi = cplx(0.0, -u * x_) - 0.5 * mu * dg - mu * (log_fw - log_f_star_);
    return std::exp(log_phi);
}

std::complex<double> TiltedIntegrand::kernel(double u) { return phi(u) / cplx(denominator_shift(), u); }

double TiltedIntegrand::phase_span(double u) { return std::abs(unwrapped_arg(std::abs(u))); }

namespace {

// |Phi(u)| needs only |f_t|, so it is available without phase tracking.
double kernel_modulus(const ModelParams& p, Marginal m, const TiltedIntegrand& ti, double u) {
    const LogModArg lf = log_f(p, m, cplx(ti.u_star(), u * ti.t()), ti.t());
    const double log_f_star = std::log(f_t(p, m, ti.u_star(), ti.t()).real());
    return std::exp(-p.mu() * (lf.log_mod - log_f_star)) / std::hypot(ti.denominator_shift(), u);
}

} // namespace

TailEstimate tilted_fourier_tail(const ModelParams& p, Marginal m, double x, double t) {
    require_time(t);
    if (m == Marginal::V && x < 0.0)
        return {1.0, 0.0, TailMethod::Fourier, 0.0, "V >= 0 almost surely; exact value"};
    TiltedIntegrand ti(p, m, x, t);
    const double mu = p.mu();
    const double g_rate = m == Marginal::X ? 0.5 * mu * p.rho() * p.xi() * t : 0.0;

    auto re_kernel = [&](double u) { return ti.kernel(u).real(); };
    // Split a shell into pieces of a couple of oscillations of Phi.
    double total_error = 0.0;
    auto shell = [&](double lo, double hi, double abs_tol) {
        const double turns = (std::abs(x + g_rate) * (hi - lo) + mu * std::abs(ti.phase_span(hi) - ti.phase_span(lo))) /
                             (2.0 * kPi);
        const int pieces = std::clamp(static_cast<int>(std::ceil(turns / 2.0)), 1, 1 << 20);
        double sum = 0.0;
        for (int k = 0; k < pieces; ++k) {
            const double a = lo + (hi - lo) * k / pieces;
            const double b = lo + (hi - lo) * (k + 1) / pieces;
            const auto r = integrate(re_kernel, a, b, {abs_tol / pieces, 1e-12, 4000});
            sum += r.value;
            total_error += r.error;
        }
        return sum;
    };

    double upper = 50.0 / (t * p.xi());
    double acc = shell(0.0, upper, 0.0);
    int quiet = 0;
    int growing = 0;
    double last_increment = 0.0;
    double envelope = kernel_modulus(p, m, ti, upper);
    bool settled = false;
    for (int k = 0; k < kMaxShells; ++k) {
        last_increment = shell(upper, 2.0 * upper, 1e-13 * std::abs(acc));
        acc += last_increment;
        upper *= 2.0;
        const double next_envelope = kernel_modulus(p, m, ti, upper);
        growing = next_envelope >= envelope ? growing + 1 : 0;
        envelope = next_envelope;
        if (growing >= 3)
            throw Error(ErrorCode::IntegrandNotDecaying, "|Phi(u)/(u*/t + iu)| is not decaying at t = " + std::to_string(t));
        quiet = std::abs(last_increment) < kShellTolerance * std::abs(acc) ? quiet + 1 : 0;
        if (quiet >= 2) {
            settled = true;
            break;
        }
    }
    if (!settled)
        throw Error(ErrorCode::IntegrandNotDecaying, "Fourier shells did not settle at t = " + std::to_string(t));

    // (1/2pi) int_R = (1/pi) int_0^inf Re; the lower tail carries the opposite kernel sign.
    const double tilted = (x > 0.0 ? 1.0 : -1.0) * acc / kPi;
    if (!(tilted > 0.0))
        throw Error(ErrorCode::IntegrandNotDecaying, "tilted expectation is not positive at t = " + std::to_string(t));
    const double log_tail = (ti.cgf_at_saddle() - x * ti.u_star()) / t + std::log(tilted);
    const double rel_error = (total_error + std::abs(last_increment)) / std::abs(acc);
    if (x > 0.0) return {std::exp(log_tail), log_tail, TailMethod::Fourier, rel_error, ""};
    const double pr = -std::expm1(log_tail);
    return {pr, std::log1p(-std::exp(log_tail)), TailMethod::Fourier, rel_error,
            "x < 0: complement of the tilted lower tail"};
}

double tilted_l1_norm(const ModelParams& p, Marginal m, double x, double t) {
    TiltedIntegrand ti(p, m, x, t);
    auto modulus = [&](double u) { return kernel_modulus(p, m, ti, u); };
    const double split = 50.0 / (t * p.xi());
    const auto head = integrate(modulus, 0.0, split, {0.0, 1e-12, 20000});
    const auto tail = integrate_to_infinity(modulus, split, {0.0, 1e-12, 20000});
    return 2.0 * (head.value + tail.value);
}

PrefactorFit extract_prefactor(const ModelParams& p, Marginal m, double x, std::span<const double> t_grid) {
    if (t_grid.size() < 4) throw Error(ErrorCode::ParameterOutOfRange, "prefactor fit needs at least 4 times");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] < t_grid[i - 1]))
            throw Error(ErrorCode::ParameterOutOfRange, "prefactor t_grid must be strictly decreasing");
    if (!(x > 0.0)) throw Error(ErrorCode::OutsideSupport, "prefactor fit needs x > 0");

    const double mu = p.mu();
    const double lstar = rate(p, m, x).value;
    PrefactorFit fit{};
    std::vector<double> y, lt;
    for (const double t : t_grid) {
        const TailEstimate est = tilted_fourier_tail(p, m, x, t);
        fit.t.push_back(t);
        fit.log_p.push_back(est.log_p);
        y.push_back(est.log_p + lstar / t);
        lt.push_back(std::log(t));
    }
    const double n = static_cast<double>(y.size());

    double log_c = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) log_c += y[i] - (1.0 - mu) * lt[i];
    log_c /= n;
    fit.c_hat = std::exp(log_c);

    const double mean_lt = std::accumulate(lt.begin(), lt.end(), 0.0) / n;
    const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sxy += (lt[i] - mean_lt) * (y[i] - mean_y);
        sxx += (lt[i] - mean_lt) * (lt[i] - mean_lt);
    }
    fit.exponent_free = sxy / sxx;
    fit.c_free = std::exp(mean_y - fit.exponent_free * mean_lt);

    for (std::size_t i = 0; i < y.size(); ++i) fit.residual.push_back(y[i] - log_c - (1.0 - mu) * lt[i]);
    const double mean_t = std::accumulate(fit.t.begin(), fit.t.end(), 0.0) / n;
    const double mean_r = std::accumulate(fit.residual.begin(), fit.residual.end(), 0.0) / n;
    double srt = 0.0, stt = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        srt += (fit.t[i] - mean_t) * (fit.residual[i] - mean_r);
        stt += (fit.t[i] - mean_t) * (fit.t[i] - mean_t);
    }
    fit.residual_slope = srt / stt;
    return fit;
}

TailEstimate tail(const ModelParams& p, Marginal m, double x, double t, TailMethod method, const McConfig* mc,
                  std::optional<double> prefactor) {
    switch (method) {
    case TailMethod::Sharp: return sharp_tail(p, m, x, t, prefactor);
    case TailMethod::GammaExact:
        if (m != Marginal::V) throw Error(ErrorCode::UnsupportedMethod, "gamma-exact is available for V only");
        return gamma_tail_v(p, x, t);
    case TailMethod::Fourier: return tilted_fourier_tail(p, m, x, t);
    case TailMethod::MonteCarlo: {
        if (mc == nullptr) throw Error(ErrorCode::ParameterOutOfRange, "monte-carlo needs a configuration");
        const McEstimate est = tail_mc(p, m, x, t, *mc);
        return {est.p_hat, std::log(est.p_hat), TailMethod::MonteCarlo, est.std_err, ""};
    }
    }
    throw Error(ErrorCode::UnsupportedMethod, "unknown method");
}

std::vector<ConvergenceRow> ldp_convergence(const ModelParams& p, Marginal m, double x, std::span<const double> t_grid,
                                            TailMethod method, const McConfig* mc) {
    if (method == TailMethod::Sharp)
        throw Error(ErrorCode::UnsupportedMethod, "convergence diagnostics use gamma-exact, fourier or monte-carlo");
    const double lstar = rate(p, m, x).value;
    std::vector<ConvergenceRow> rows;
    for (const double t : t_grid) {
        const TailEstimate est = tail(p, m, x, t, method, mc);
        const double v = -t * est.log_p;
        rows.push_back({t, v, lstar, std::abs(v - lstar)});
    }
    return rows;
}

} // namespace sharpld
