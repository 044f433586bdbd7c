#include "sharpld/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <thread>

#include "sharpld/cgf.hpp"
#include "sharpld/csv.hpp"
#include "sharpld/errors.hpp"
#include "sharpld/saddlepoint.hpp"
#include "sharpld/tails.hpp"

namespace sharpld {

namespace {

void check_config(const McConfig& cfg, double t) {
    if (cfg.n_paths < 1) throw Error(ErrorCode::ParameterOutOfRange, "n_paths must be >= 1");
    if (cfg.n_steps < 1) throw Error(ErrorCode::ParameterOutOfRange, "n_steps must be >= 1");
    if (cfg.stream_count < 1) throw Error(ErrorCode::ParameterOutOfRange, "stream_count must be >= 1");
    if (!(t > 0.0) || !std::isfinite(t))
        throw Error(ErrorCode::ParameterOutOfRange, "t must be > 0, got " + std::to_string(t));
}

// Runs body(rng, first, last) for every stream; stream k owns paths
// [k n / S, (k + 1) n / S) and its own generator, so the output depends only on the config.
void for_each_stream(const McConfig& cfg,
                     const std::function<void(std::mt19937_64&, std::uint64_t, std::uint64_t)>& body) {
    const std::uint32_t streams = cfg.stream_count;
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = std::min<unsigned>(hw, streams);
    std::atomic<std::uint32_t> next{0};
    auto work = [&] {
        for (std::uint32_t k = next++; k < streams; k = next++) {
            const std::uint64_t first = cfg.n_paths * k / streams;
            const std::uint64_t last = cfg.n_paths * (k + 1) / streams;
            std::mt19937_64 rng = stream_engine(cfg.seed, k);
            body(rng, first, last);
        }
    };
    if (workers <= 1) {
        work();
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
}

double uniform_open(std::mt19937_64& rng) {
    // (0, 1): 53 random bits offset by half an ulp
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& rng) {
    // Marsaglia polar method; the second variate is discarded to keep draws stateless.
    for (;;) {
        const double u = 2.0 * uniform_open(rng) - 1.0;
        const double v = 2.0 * uniform_open(rng) - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

// One square-root transition over dt: with c = 2b/(xi^2 expm1(b dt)),
// N ~ Poisson(c e^{b dt} v) and v' = Gamma(mu + N) / c.
struct Transition {
    double c;
    double decay;
    double mu;

    double operator()(std::mt19937_64& rng, double v) const {
        double shape = mu;
        const double mean = c * decay * v;
        if (mean > 0.0) {
            std::poisson_distribution<long long> poisson(mean);
            shape += static_cast<double>(poisson(rng));
        }
        return sample_gamma(rng, shape) / c;
    }
};

Transition make_transition(const ModelParams& p, double dt) {
    return {gamma_rate(p, dt), std::exp(p.b() * dt), p.mu()};
}

XVSample simulate_path(const ModelParams& p, const Transition& step, std::uint32_t n_steps, double t,
                       std::mt19937_64& rng) {
    const double dt = t / n_steps;
    double v = 0.0;
    double integral = 0.0;
    for (std::uint32_t i = 0; i < n_steps; ++i) {
        const double next = step(rng, v);
        integral += 0.5 * dt * (v + next);
        v = next;
    }
    const double x = -0.5 * integral + p.rho() / p.xi() * (v - p.a() * t - p.b() * integral) +
                     p.rho_bar() * std::sqrt(integral) * standard_normal(rng);
    return {x, v, integral};
}

} // namespace

double sample_gamma(std::mt19937_64& rng, double shape) {
    if (!(shape > 0.0)) throw Error(ErrorCode::ParameterOutOfRange, "gamma shape must be > 0");
    if (shape < 1.0) return sample_gamma(rng, shape + 1.0) * std::pow(uniform_open(rng), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z, v;
        do {
            z = standard_normal(rng);
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_open(rng);
        if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
        if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::mt19937_64 stream_engine(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32), stream};
    return std::mt19937_64(seq);
}

std::vector<double> sample_v_exact(const ModelParams& p, double t, const McConfig& cfg) {
    check_config(cfg, t);
    const double rate = gamma_rate(p, t);
    std::vector<double> out(cfg.n_paths);
    for_each_stream(cfg, [&](std::mt19937_64& rng, std::uint64_t first, std::uint64_t last) {
        for (std::uint64_t i = first; i < last; ++i) out[i] = sample_gamma(rng, p.mu()) / rate;
    });
    return out;
}

std::vector<XVSample> simulate_xv(const ModelParams& p, double t, const McConfig& cfg) {
    check_config(cfg, t);
    const Transition step = make_transition(p, t / cfg.n_steps);
    std::vector<XVSample> out(cfg.n_paths);
    for_each_stream(cfg, [&](std::mt19937_64& rng, std::uint64_t first, std::uint64_t last) {
        for (std::uint64_t i = first; i < last; ++i) out[i] = simulate_path(p, step, cfg.n_steps, t, rng);
    });
    return out;
}

McEstimate tail_mc(const ModelParams& p, Marginal m, double x, double t, const McConfig& cfg) {
    check_config(cfg, t);
    const double n = static_cast<double>(cfg.n_paths);
    auto too_small = [&](double expected) {
        return Error(ErrorCode::ProbabilityTooSmallForN,
                     "expected about " + std::to_string(expected) + " hits out of " + std::to_string(cfg.n_paths) +
                         " paths; use a larger t, an x closer to 0, or more paths");
    };

    // Pre-check against the exact V tail or the Chernoff bound for X.
    if (m == Marginal::V && x > 0.0) {
        const double expected = n * gamma_tail_v(p, x, t).p;
        if (expected < kMinExpectedHits) throw too_small(expected);
    } else if (m == Marginal::X && x > 0.0) {
        try {
            const double u = saddle_x(p, x, t).u_star;
            const double bound = std::exp((cgf_complex(p, m, u, t).real() - x * u) / t);
            if (n * bound < kMinExpectedHits) throw too_small(n * bound);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ProbabilityTooSmallForN) throw;
        }
    }

    std::vector<std::uint64_t> hits(cfg.stream_count, 0);
    const std::uint32_t streams = cfg.stream_count;
    if (m == Marginal::V) {
        const double rate = gamma_rate(p, t);
        for_each_stream(cfg, [&](std::mt19937_64& rng, std::uint64_t first, std::uint64_t last) {
            std::uint64_t h = 0;
            for (std::uint64_t i = first; i < last; ++i) h += sample_gamma(rng, p.mu()) / rate >= x;
            hits[static_cast<std::size_t>(first * streams / cfg.n_paths)] = h;
        });
    } else {
        const Transition step = make_transition(p, t / cfg.n_steps);
        for_each_stream(cfg, [&](std::mt19937_64& rng, std::uint64_t first, std::uint64_t last) {
            std::uint64_t h = 0;
            for (std::uint64_t i = first; i < last; ++i) h += simulate_path(p, step, cfg.n_steps, t, rng).x >= x;
            hits[static_cast<std::size_t>(first * streams / cfg.n_paths)] = h;
        });
    }
    std::uint64_t total = 0;
    for (const auto h : hits) total += h;

    const double p_hat = static_cast<double>(total) / n;
    const bool rare_side = x > 0.0 || m == Marginal::X;
    if (rare_side && static_cast<double>(std::min(total, cfg.n_paths - total)) < kMinExpectedHits)
        throw too_small(static_cast<double>(total));
    return {p_hat, std::sqrt(p_hat * (1.0 - p_hat) / n), cfg.n_paths, total};
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw Error(ErrorCode::ParameterOutOfRange, "KS statistic needs two non-empty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

void write_samples_csv(std::ostream& out, const std::vector<XVSample>& samples) {
    write_row(out, {"x", "v"});
    for (const auto& s : samples) write_row(out, {fmt(s.x), fmt(s.v)});
}

} // namespace sharpld
