#include "sharpld/variational.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "sharpld/csv.hpp"
#include "sharpld/errors.hpp"
#include "sharpld/rate_functions.hpp"

namespace sharpld {

namespace {

void check_xi(double xi) {
    if (!(xi > 0.0) || !std::isfinite(xi)) throw Error(ErrorCode::ParameterOutOfRange, "xi must be > 0");
}

void check_grid(std::size_t n) {
    if (n < 2) throw Error(ErrorCode::ParameterOutOfRange, "grid size n must be >= 2, got " + std::to_string(n));
}

// (b - a)^2 / (a + b) and its derivatives; the cell term of the action up to n/xi^2.
struct Cell {
    double value, da, db, haa, hab, hbb;
};

Cell cell(double a, double b) {
    const double s = a + b;
    const double d = b - a;
    if (s == 0.0) return {d == 0.0 ? 0.0 : kInfinity, 0.0, 0.0, 0.0, 0.0, 0.0};
    const double s2 = s * s;
    const double k = 8.0 / (s2 * s);
    return {d * d / s, -d * (a + 3.0 * b) / s2, d * (3.0 * a + b) / s2, k * b * b, -k * a * b, k * a * a};
}

double discrete_action(double scale, const std::vector<double>& phi) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < phi.size(); ++i) sum += cell(phi[i], phi[i + 1]).value;
    return scale * sum;
}

// Thomas algorithm for a symmetric tridiagonal system; false on a non-positive pivot.
bool solve_tridiagonal(const std::vector<double>& diag, const std::vector<double>& off, std::vector<double> rhs,
                       std::vector<double>& out) {
    const std::size_t m = diag.size();
    std::vector<double> c(m, 0.0);
    double pivot = diag[0];
    if (!(pivot > 0.0)) return false;
    c[0] = m > 1 ? off[0] / pivot : 0.0;
    rhs[0] /= pivot;
    for (std::size_t i = 1; i < m; ++i) {
        pivot = diag[i] - off[i - 1] * c[i - 1];
        if (!(pivot > 0.0) || !std::isfinite(pivot)) return false;
        if (i + 1 < m) c[i] = off[i] / pivot;
        rhs[i] = (rhs[i] - off[i - 1] * rhs[i - 1]) / pivot;
    }
    for (std::size_t i = m - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
    out = std::move(rhs);
    return true;
}

} // namespace

PathGrid make_path(std::vector<double> values) {
    if (values.size() < 2) throw Error(ErrorCode::ParameterOutOfRange, "a path needs at least two knots");
    for (const double v : values)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw Error(ErrorCode::ParameterOutOfRange, "path values must be finite and >= 0");
    const double v0 = values.front();
    const double x = values.back();
    return {std::move(values), v0, x};
}

ExtendedReal action(double xi, const PathGrid& path) {
    check_xi(xi);
    const double n = static_cast<double>(path.n());
    return discrete_action(n / (xi * xi), path.values);
}

ExtendedReal action(const ModelParams& p, const PathGrid& path) { return action(p.xi(), path); }

double psi_action(double xi, const PathGrid& path) {
    check_xi(xi);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < path.values.size(); ++i) {
        const double d = std::sqrt(path.values[i + 1]) - std::sqrt(path.values[i]);
        sum += d * d;
    }
    return 2.0 / (xi * xi) * static_cast<double>(path.n()) * sum;
}

PathGrid squared_psi_line(double v0, double x, std::size_t n) {
    check_grid(n);
    std::vector<double> values(n + 1);
    const double r0 = std::sqrt(v0), r1 = std::sqrt(x);
    for (std::size_t i = 0; i <= n; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(n);
        const double psi = r0 + s * (r1 - r0);
        values[i] = psi * psi;
    }
    values[0] = v0;
    values[n] = x;
    return make_path(std::move(values));
}

PathGrid straight_line(double v0, double x, std::size_t n) {
    check_grid(n);
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = v0 + (x - v0) * static_cast<double>(i) / static_cast<double>(n);
    values[0] = v0;
    values[n] = x;
    return make_path(std::move(values));
}

ActionMinimization minimize_action(double xi, double v0, double x, std::size_t n) {
    check_xi(xi);
    check_grid(n);
    if (!(v0 >= 0.0) || !std::isfinite(v0)) throw Error(ErrorCode::ParameterOutOfRange, "v0 must be >= 0");
    if (x < 0.0) {
        const ActionResult none{kInfinity, PathGrid{{}, v0, x}, n};
        return {none, none, 0, 0.0};
    }

    const double scale = static_cast<double>(n) / (xi * xi);
    const PathGrid closed = squared_psi_line(v0, x, n);
    ActionMinimization out{{action(xi, closed), closed, n}, {}, 0, 0.0};

    std::vector<double> phi = straight_line(v0, x, n).values;
    const std::size_t m = n - 1;
    std::vector<double> grad(m), diag(m), off(m > 0 ? m - 1 : 0), step(m), trial(phi.size());
    double value = discrete_action(scale, phi);
    double gnorm = 0.0;
    std::size_t it = 0;

    auto assemble = [&] {
        std::fill(grad.begin(), grad.end(), 0.0);
        std::fill(diag.begin(), diag.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const Cell c = cell(phi[i], phi[i + 1]);
            if (i >= 1) { // phi_i is unknown i - 1
                grad[i - 1] += scale * c.da;
                diag[i - 1] += scale * c.haa;
            }
            if (i + 1 <= m) { // phi_{i+1} is unknown i
                grad[i] += scale * c.db;
                diag[i] += scale * c.hbb;
            }
            if (i >= 1 && i + 1 <= m) off[i - 1] = scale * c.hab;
        }
        double s = 0.0;
        for (const double g : grad) s += g * g;
        return std::sqrt(s);
    };

    for (;;) {
        gnorm = assemble();
        if (!(gnorm >= kActionGradientTolerance)) break; // also ends on an all-zero problem
        if (it >= kActionIterationCap)
            throw Error(ErrorCode::NonConvergence, "action minimization stopped at " + std::to_string(it) +
                                                       " iterations; best value " + fmt(value) + ", gradient norm " +
                                                       fmt(gnorm));
        ++it;

        std::vector<double> neg(grad.size());
        std::transform(grad.begin(), grad.end(), neg.begin(), [](double g) { return -g; });
        if (!solve_tridiagonal(diag, off, neg, step)) {
            // Levenberg shift when rounding has cost the Hessian its definiteness.
            const double top = *std::max_element(diag.begin(), diag.end());
            bool solved = false;
            for (double shift = 1e-12 * top; !solved && shift < 1e3 * top; shift *= 10.0) {
                std::vector<double> shifted = diag;
                for (double& d : shifted) d += shift;
                solved = solve_tridiagonal(shifted, off, neg, step);
            }
            if (!solved) step = neg;
        }
        double slope = 0.0;
        for (std::size_t j = 0; j < m; ++j) slope += grad[j] * step[j];
        if (!(slope < 0.0)) {
            step = neg;
            slope = -gnorm * gnorm;
        }

        double alpha = 1.0;
        for (std::size_t j = 0; j < m; ++j)
            if (step[j] < 0.0) alpha = std::min(alpha, 0.99 * phi[j + 1] / -step[j]);

        bool moved = false;
        if (-slope <= 1e-13 * std::max(1.0, std::abs(value))) {
            // The predicted decrease is below the rounding of the action, so an
            // Armijo test would only compare noise. Take the Newton step.
            for (std::size_t j = 0; j < m; ++j) phi[j + 1] = std::max(0.0, phi[j + 1] + alpha * step[j]);
            value = discrete_action(scale, phi);
            moved = true;
        }
        for (; !moved && alpha > 1e-20; alpha *= 0.5) {
            trial = phi;
            for (std::size_t j = 0; j < m; ++j) trial[j + 1] = std::max(0.0, phi[j + 1] + alpha * step[j]);
            const double tv = discrete_action(scale, trial);
            if (tv <= value + 1e-4 * alpha * slope) {
                phi.swap(trial);
                value = tv;
                moved = true;
                break;
            }
        }
        if (!moved) {
            // No representable decrease left; accept the Newton point if it is no worse.
            trial = phi;
            for (std::size_t j = 0; j < m; ++j) trial[j + 1] = std::max(0.0, phi[j + 1] + step[j]);
            const double tv = discrete_action(scale, trial);
            if (!(tv <= value)) {
                gnorm = assemble();
                if (gnorm < kActionGradientTolerance) break;
                throw Error(ErrorCode::NonConvergence, "action line search stalled; best value " + fmt(value) +
                                                           ", gradient norm " + fmt(gnorm));
            }
            phi.swap(trial);
            value = tv;
        }
    }

    out.optimized = {value, make_path(std::move(phi)), n};
    out.iterations = it;
    out.gradient_norm = gnorm;
    return out;
}

ActionMinimization minimize_action(const ModelParams& p, double v0, double x, std::size_t n) {
    return minimize_action(p.xi(), v0, x, n);
}

std::vector<ContractionRow> contraction_curve(double xi, double v0, std::span<const double> x_grid, std::size_t n) {
    std::vector<ContractionRow> rows;
    for (const double x : x_grid) {
        const double a = minimize_action(xi, v0, x, n).optimized.value;
        const double r = fw_rate(xi, v0, x).value;
        rows.push_back({x, a, r, std::isinf(a) && std::isinf(r) ? 0.0 : std::abs(a - r)});
    }
    return rows;
}

std::vector<ContractionRow> contraction_curve(const ModelParams& p, double v0, std::span<const double> x_grid,
                                              std::size_t n) {
    return contraction_curve(p.xi(), v0, x_grid, n);
}

void write_path_csv(std::ostream& out, const PathGrid& path) {
    write_row(out, {"s", "phi"});
    const double n = static_cast<double>(path.n());
    for (std::size_t i = 0; i < path.values.size(); ++i)
        write_row(out, {fmt(static_cast<double>(i) / n), fmt(path.values[i])});
}

} // namespace sharpld
