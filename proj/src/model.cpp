#include "sharpld/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <nlohmann/json.hpp>

#include "roots.hpp"
#include "sharpld/cgf.hpp"
#include "sharpld/errors.hpp"

namespace sharpld {

ModelParams::ModelParams(double a, double b, double xi, double rho)
    : a_(a), b_(b), xi_(xi), rho_(rho), mu_(2.0 * a / (xi * xi)),
      rho_bar_(std::sqrt((1.0 - rho) * (1.0 + rho))) {}

ModelParams validate_params(double a, double b, double xi, double rho) {
    auto reject = [](const std::string& msg) {
        throw Error(ErrorCode::ParameterOutOfRange, msg);
    };
    if (!std::isfinite(a) || !(a > 0.0)) reject("a must be finite and > 0, got " + std::to_string(a));
    if (!std::isfinite(b) || !(b < 0.0)) reject("b must be finite and < 0, got " + std::to_string(b));
    if (!std::isfinite(xi) || !(xi > 0.0)) reject("xi must be finite and > 0, got " + std::to_string(xi));
    if (!std::isfinite(rho) || !(std::abs(rho) < 1.0))
        reject("rho must satisfy |rho| < 1, got " + std::to_string(rho));
    ModelParams p(a, b, xi, rho);
    if (!(p.mu() > 1.0))
        throw Error(ErrorCode::FellerIndexTooSmall,
                    "mu = 2a/xi^2 = " + std::to_string(p.mu()) + " must exceed 1");
    return p;
}

ModelParams reference_params() { return validate_params(0.12, -1.0, 0.4, -0.5); }

std::string_view to_string(Marginal m) noexcept { return m == Marginal::X ? "X" : "V"; }

Marginal parse_marginal(std::string_view s) {
    if (s == "X" || s == "x") return Marginal::X;
    if (s == "V" || s == "v") return Marginal::V;
    throw Error(ErrorCode::ParameterOutOfRange, "marginal must be X or V, got '" + std::string(s) + "'");
}

LimitingEndpoints limiting_u_pm(const ModelParams& p) {
    const double xi = p.xi(), rho = p.rho(), rb = p.rho_bar();
    constexpr double pi = std::numbers::pi;
    if (rho == 0.0) return {-pi / xi, pi / xi};
    const double scale = 2.0 / (xi * rb);
    const double base = std::atan(rb / rho);
    if (rho < 0.0) return {scale * base, scale * (base + pi)};
    return {scale * (base - pi), scale * base};
}

namespace {

// Scan outward from the origin for the first sign change of f_t^X, then
// bisect it down.
double x_boundary(const ModelParams& p, double t, double direction) {
    const double step = 0.1 * (2.0 / p.xi()) * direction;
    auto f = [&](double u) { return f_t(p, Marginal::X, u, t).real(); };
    double prev = 0.0;
    for (int k = 1; k <= kDomainSearchSteps; ++k) {
        const double u = k * step;
        if (f(u) <= 0.0) {
            return detail::bisect(f, prev, u, 1e-12);
        }
        prev = u;
    }
    throw Error(ErrorCode::RootNotBracketed,
                "no zero of f_t^X within |u| <= " + std::to_string(kDomainSearchSteps * std::abs(step)) +
                    " at t = " + std::to_string(t));
}

} // namespace

DomainBounds domain_bounds(const ModelParams& p, Marginal m, double t) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw Error(ErrorCode::ParameterOutOfRange, "t must be >= 0, got " + std::to_string(t));
    if (m == Marginal::V) {
        const double xi2 = p.xi() * p.xi();
        if (t == 0.0) return {-kInfinity, 2.0 / xi2, 0.0};
        const double bt = p.b() * t;
        return {-kInfinity, 2.0 * bt / (xi2 * std::expm1(bt)), t};
    }
    if (t == 0.0) {
        const auto [lo, hi] = limiting_u_pm(p);
        return {lo, hi, 0.0};
    }
    return {x_boundary(p, t, -1.0), x_boundary(p, t, +1.0), t};
}

void to_json(nlohmann::json& j, const ModelParams& p) {
    j = nlohmann::json{{"a", p.a()}, {"b", p.b()}, {"xi", p.xi()}, {"rho", p.rho()}};
}

ModelParams params_from_json(const nlohmann::json& j) {
    auto field = [&](const char* key) {
        if (!j.is_object() || !j.contains(key) || !j.at(key).is_number())
            throw Error(ErrorCode::ParameterOutOfRange, std::string("missing numeric field '") + key + "'");
        return j.at(key).get<double>();
    };
    return validate_params(field("a"), field("b"), field("xi"), field("rho"));
}

} // namespace sharpld
