#include "sharpld/rate_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sharpld/cgf.hpp"
#include "sharpld/errors.hpp"
#include "sharpld/saddlepoint.hpp"

namespace sharpld {

RateValue rate_x(const ModelParams& p, double x) {
    const auto [u_minus, u_plus] = limiting_u_pm(p);
    return {(x < 0.0 ? u_minus : u_plus) * x, x};
}

RateValue rate_v(const ModelParams& p, double x) {
    if (x < 0.0) return {kInfinity, x};
    return {(2.0 / (p.xi() * p.xi())) * x, x};
}

RateValue fw_rate(double xi, double v0, double x) {
    if (!(v0 >= 0.0)) throw Error(ErrorCode::ParameterOutOfRange, "v0 must be >= 0");
    if (x < 0.0) return {kInfinity, x};
    const double gap = std::sqrt(x) - std::sqrt(v0);
    return {2.0 / (xi * xi) * gap * gap, x};
}

RateValue fw_rate(const ModelParams& p, double v0, double x) { return fw_rate(p.xi(), v0, x); }

RateValue rate(const ModelParams& p, Marginal m, double x) {
    return m == Marginal::X ? rate_x(p, x) : rate_v(p, x);
}

double alpha0(const ModelParams& p, Marginal m, double x) {
    if (m == Marginal::V) {
        if (!(x > 0.0)) throw Error(ErrorCode::OutsideSupport, "V needs x > 0, got " + std::to_string(x));
        return 2.0 / (p.xi() * p.xi());
    }
    if (x == 0.0 || !std::isfinite(x)) throw Error(ErrorCode::OutsideSupport, "X needs x != 0");
    const auto [u_minus, u_plus] = limiting_u_pm(p);
    return x < 0.0 ? u_minus : u_plus;
}

AlphaCoeffs alpha_coeffs(const ModelParams& p, Marginal m, double x) {
    const double a0 = alpha0(p, m, x);
    if (m == Marginal::V) return {a0, -p.b() / (p.xi() * p.xi()) - p.mu() / x};

    std::array<double, kAlphaExtrapolationTimes.size()> slopes{};
    for (std::size_t i = 0; i < slopes.size(); ++i) {
        const double t = kAlphaExtrapolationTimes[i];
        slopes[i] = (saddle_x(p, x, t).u_star - a0) / t;
    }
    return {a0, extrapolate_to_zero(kAlphaExtrapolationTimes, slopes)};
}

double extrapolate_to_zero(std::span<const double> ts, std::span<const double> values) {
    if (ts.size() != values.size() || ts.empty())
        throw Error(ErrorCode::ParameterOutOfRange, "extrapolation needs matching, non-empty inputs");
    std::vector<double> p(values.begin(), values.end());
    const std::size_t n = p.size();
    for (std::size_t level = 1; level < n; ++level) {
        for (std::size_t i = 0; i + level < n; ++i) {
            const double ti = ts[i], tj = ts[i + level];
            p[i] = (tj * p[i] - ti * p[i + 1]) / (tj - ti);
        }
    }
    return p[0];
}

namespace {

double golden_max(const std::function<double(double)>& f, double lo, double hi) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 300 && (hi - lo) > 1e-15 * std::max(1.0, std::abs(lo) + std::abs(hi)); ++it) {
        if (fc > fd) {
            hi = d; d = c; fd = fc;
            c = hi - inv_phi * (hi - lo); fc = f(c);
        } else {
            lo = c; c = d; fc = fd;
            d = lo + inv_phi * (hi - lo); fd = f(d);
        }
    }
    return std::max(fc, fd);
}

struct Core {
    double lo, hi, scale;
};

// A finite window containing the finite part of the domain; unbounded sides
// extend from it geometrically.
Core core_window(const CgfCurve& c) {
    const bool lo_fin = std::isfinite(c.lower), hi_fin = std::isfinite(c.upper);
    double s = 1.0;
    if (lo_fin) s = std::max(s, std::abs(c.lower));
    if (hi_fin) s = std::max(s, std::abs(c.upper));
    if (lo_fin && hi_fin) return {c.lower, c.upper, s};
    if (hi_fin) return {std::min(c.upper, 0.0) - s, c.upper, s};
    if (lo_fin) return {c.lower, std::max(c.lower, 0.0) + s, s};
    return {-s, s, s};
}

} // namespace

RateValue legendre_transform(const CgfCurve& curve, double x, const LegendreOptions& opts) {
    if (opts.samples < 100) throw Error(ErrorCode::ParameterOutOfRange, "Legendre transform needs >= 100 samples");
    if (!(curve.lower < curve.upper)) throw Error(ErrorCode::ParameterOutOfRange, "empty domain");
    const bool lo_fin = std::isfinite(curve.lower), hi_fin = std::isfinite(curve.upper);

    auto objective = [&](double u) {
        const double v = u * x - curve.eval(u);
        return std::isnan(v) ? -kInfinity : v;
    };

    const Core core = core_window(curve);
    std::vector<double> grid;
    if (!lo_fin) {
        for (int j = 1020; j >= 0; --j) {
            const double u = core.lo - core.scale * std::ldexp(1.0, j);
            if (std::isfinite(u)) grid.push_back(u);
        }
        grid.push_back(core.lo);
    }
    const std::size_t n = opts.samples;
    for (std::size_t k = 1; k <= n; ++k)
        grid.push_back(core.lo + (core.hi - core.lo) * static_cast<double>(k) / static_cast<double>(n + 1));
    if (!hi_fin) {
        grid.push_back(core.hi);
        for (int j = 0; j <= 1020; ++j) {
            const double u = core.hi + core.scale * std::ldexp(1.0, j);
            if (std::isfinite(u)) grid.push_back(u);
        }
    }

    std::vector<double> obj(grid.size());
    std::transform(grid.begin(), grid.end(), obj.begin(), objective);

    const std::size_t last = obj.size() - 1;
    const bool diverges_low = !lo_fin && obj[0] > obj[1] && obj[1] > obj[2];
    const bool diverges_high = !hi_fin && obj[last] > obj[last - 1] && obj[last - 1] > obj[last - 2];
    if (diverges_low || diverges_high) {
        if (opts.on_divergence == DivergencePolicy::Throw)
            throw Error(ErrorCode::UnboundedAbove, "sup of u x - Lambda(u) diverges at x = " + std::to_string(x));
        return {kInfinity, x};
    }

    const std::size_t k = static_cast<std::size_t>(std::max_element(obj.begin(), obj.end()) - obj.begin());
    double best = obj[k];
    if (std::isfinite(best)) {
        const double lo = k > 0 ? grid[k - 1] : (lo_fin ? curve.lower : grid[k]);
        const double hi = k < last ? grid[k + 1] : (hi_fin ? curve.upper : grid[k]);
        // Stay strictly inside the open domain.
        const double a = lo_fin && lo == curve.lower ? grid[k] : lo;
        const double b = hi_fin && hi == curve.upper ? grid[k] : hi;
        if (a < b) best = std::max(best, golden_max(objective, a, b));
    }
    if (lo_fin && std::isfinite(curve.lower_limit)) best = std::max(best, curve.lower * x - curve.lower_limit);
    if (hi_fin && std::isfinite(curve.upper_limit)) best = std::max(best, curve.upper * x - curve.upper_limit);
    return {best, x};
}

CgfCurve limiting_cgf(const ModelParams& p, Marginal m) {
    const DomainBounds d = domain_bounds(p, m, 0.0);
    return {d.lower, d.upper, [](double) { return 0.0; },
            std::isfinite(d.lower) ? 0.0 : kInfinity, std::isfinite(d.upper) ? 0.0 : kInfinity};
}

namespace {

ExtendedReal end_slope(const CgfCurve& c, const Core& core, bool upper_end) {
    const double end = upper_end ? c.upper : c.lower;
    const double inward = upper_end ? -1.0 : 1.0;
    std::vector<double> slopes;
    for (int k = 1; k <= 9; ++k) {
        double u, h;
        if (std::isfinite(end)) {
            const double half = std::isfinite(c.lower) && std::isfinite(c.upper) ? 0.5 * (c.upper - c.lower) : core.scale;
            const double delta = half * std::pow(10.0, -k);
            u = end + inward * delta;
            h = 0.1 * delta;
        } else {
            u = (upper_end ? core.hi : core.lo) - inward * core.scale * std::pow(10.0, k);
            h = 1e-6 * std::abs(u);
        }
        const double slope = std::abs((c.eval(u + h) - c.eval(u - h)) / (2.0 * h));
        if (!std::isfinite(slope)) break; // probes have reached the evaluator's own boundary guard
        slopes.push_back(slope);
    }
    const std::size_t n = slopes.size();
    if (n < 4) return n == 0 ? kInfinity : slopes.back();
    const bool growing = slopes[n - 1] > slopes[n - 2] && slopes[n - 2] > slopes[n - 3] && slopes[n - 3] > slopes[n - 4];
    if (growing && (slopes[n - 1] > 1e6 || slopes[n - 1] > 100.0 * slopes[n - 4])) return kInfinity;
    return slopes[n - 1];
}

} // namespace

SteepnessReport steepness_of(const CgfCurve& curve) {
    if (!(curve.lower < curve.upper)) return {{curve.lower, curve.upper, 0.0}, {0.0, 0.0}, false, {}};
    const Core core = core_window(curve);
    const ExtendedReal lo = end_slope(curve, core, false);
    const ExtendedReal hi = end_slope(curve, core, true);
    return {{curve.lower, curve.upper, 0.0}, {lo, hi}, std::isinf(lo) && std::isinf(hi), {}};
}

SteepnessReport steepness_report(const ModelParams& p, Marginal m, std::span<const double> t_grid) {
    if (t_grid.empty()) throw Error(ErrorCode::ParameterOutOfRange, "t_grid must be non-empty");
    const CgfCurve curve = limiting_cgf(p, m);
    SteepnessReport report = steepness_of(curve);
    report.domain = domain_bounds(p, m, 0.0);

    const DomainBounds& d = report.domain;
    const double lo = std::isfinite(d.lower) ? d.lower + 0.1 * d.width() : -d.upper;
    const double hi = std::isfinite(d.lower) ? d.upper - 0.1 * d.width() : 0.9 * d.upper;
    constexpr int kPoints = 50;
    for (const double t : t_grid) {
        const DomainBounds bt = domain_bounds(p, m, t);
        double worst = 0.0;
        for (int i = 0; i < kPoints; ++i) {
            const double u = lo + (hi - lo) * i / (kPoints - 1);
            worst = std::max(worst, std::abs(cgf_eval(p, m, u, t, bt).lambda));
        }
        report.pointwise_limit.push_back({t, worst});
    }
    return report;
}

} // namespace sharpld
