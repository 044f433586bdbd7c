#pragma once

#include <limits>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

namespace sharpld {

// IEEE doubles already carry +-infinity; this alias marks the places where an
// infinite value is a legitimate result rather than an overflow.
using ExtendedReal = double;
inline constexpr ExtendedReal kInfinity = std::numeric_limits<double>::infinity();

/// Parameters of the correlated square-root system started at the origin:
///   dX = -V/2 dt + sqrt(V) dW,   dV = (a + bV) dt + xi sqrt(V) dZ,   d<W,Z> = rho dt.
/// Only obtainable through validate_params, so mu > 1 and |rho| < 1 always hold.
class ModelParams {
public:
    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double b() const noexcept { return b_; }
    [[nodiscard]] double xi() const noexcept { return xi_; }
    [[nodiscard]] double rho() const noexcept { return rho_; }
    /// Feller index 2a/xi^2.
    [[nodiscard]] double mu() const noexcept { return mu_; }
    /// sqrt(1 - rho^2).
    [[nodiscard]] double rho_bar() const noexcept { return rho_bar_; }

    friend ModelParams validate_params(double a, double b, double xi, double rho);

private:
    ModelParams(double a, double b, double xi, double rho);

    double a_, b_, xi_, rho_, mu_, rho_bar_;
};

/// Throws Error(ParameterOutOfRange) naming the violated constraint, or
/// Error(FellerIndexTooSmall) when 2a/xi^2 <= 1.
ModelParams validate_params(double a, double b, double xi, double rho);

/// The reference parameter set used throughout the docs and tests.
ModelParams reference_params();

enum class Marginal { X, V };

std::string_view to_string(Marginal m) noexcept;
Marginal parse_marginal(std::string_view s);

/// Effective domain (lower, upper) of u -> Lambda_M(u, t). t == 0 denotes the
/// small-time limiting domain.
struct DomainBounds {
    ExtendedReal lower;
    ExtendedReal upper;
    double t;

    [[nodiscard]] bool contains(double u) const noexcept { return lower < u && u < upper; }
    [[nodiscard]] double width() const noexcept { return upper - lower; }
};

struct LimitingEndpoints {
    double u_minus;
    double u_plus;
};

/// Closed-form endpoints of the limiting domain of the X-marginal cgf.
LimitingEndpoints limiting_u_pm(const ModelParams& p);

/// For V the upper end is 2bt / (xi^2 (e^{bt} - 1)); for X the endpoints are the
/// zeros of f_t^X closest to the origin. Throws Error(RootNotBracketed) when no
/// sign change of f_t^X appears within kDomainSearchSteps scan steps.
DomainBounds domain_bounds(const ModelParams& p, Marginal m, double t);

inline constexpr int kDomainSearchSteps = 4000;

// JSON object {"a","b","xi","rho"}; derived quantities are recomputed on load.
void to_json(nlohmann::json& j, const ModelParams& p);
ModelParams params_from_json(const nlohmann::json& j);

} // namespace sharpld
