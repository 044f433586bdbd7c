#include "sharpld/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sharpld/csv.hpp"
#include "sharpld/errors.hpp"
#include "sharpld/model.hpp"
#include "sharpld/montecarlo.hpp"
#include "sharpld/rate_functions.hpp"
#include "sharpld/saddlepoint.hpp"
#include "sharpld/tails.hpp"
#include "sharpld/variational.hpp"

namespace sharpld::cli {

namespace {

struct Options {
    std::string params_file;
    std::string marginal = "X";
    std::vector<double> x;
    std::vector<double> t;
    std::vector<double> v0;
    std::vector<std::size_t> n;
    std::vector<std::string> methods;
    std::optional<double> prefactor;
    std::uint64_t seed = 1;
    std::uint64_t paths = 100000;
    std::uint32_t steps = 200;
    std::uint32_t streams = 8;
    std::string out_file;
    std::string path_out;
    std::string dump;
};

struct Output {
    std::ostringstream csv;
    std::string summary;
};

std::string short_num(double v) {
    if (!std::isfinite(v)) return fmt(v);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.7g", v);
    return buf;
}

ModelParams load_params(const std::string& file) {
    if (file.empty()) return reference_params();
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::ParameterOutOfRange, "cannot open params file '" + file + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParameterOutOfRange, "params file '" + file + "' is not valid JSON: " + e.what());
    }
    return params_from_json(j);
}

template <class T>
const std::vector<T>& need(const std::vector<T>& v, const char* flag) {
    if (v.empty()) throw CLI::RequiredError(flag);
    return v;
}

McConfig mc_config(const Options& o) { return {o.paths, o.steps, o.seed, o.streams}; }

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::ParameterOutOfRange, "cannot write '" + path + "'");
    body(f);
}

void cmd_rate(const ModelParams& p, const Options& o, Output& r) {
    const Marginal m = parse_marginal(o.marginal);
    write_row(r.csv, {"marginal", "x", "rate"});
    for (const double x : need(o.x, "--x")) {
        const double v = rate(p, m, x).value;
        write_row(r.csv, {std::string(to_string(m)), fmt(x), fmt(v)});
        r.summary = fmt(v);
    }
}

void cmd_domain(const ModelParams& p, const Options& o, Output& r) {
    const Marginal m = parse_marginal(o.marginal);
    write_row(r.csv, {"marginal", "t", "lower", "upper"});
    for (const double t : need(o.t, "--t")) {
        const DomainBounds d = domain_bounds(p, m, t);
        write_row(r.csv, {std::string(to_string(m)), fmt(t), fmt(d.lower), fmt(d.upper)});
        r.summary = "(" + short_num(d.lower) + ", " + short_num(d.upper) + ")";
    }
}

void cmd_saddle(const ModelParams& p, const Options& o, Output& r) {
    const Marginal m = parse_marginal(o.marginal);
    write_row(r.csv, {"marginal", "x", "t", "u_star", "residual", "alpha0"});
    for (const double x : need(o.x, "--x")) {
        const double a0 = alpha0(p, m, x);
        for (const double t : need(o.t, "--t")) {
            const SaddlepointResult s = saddle(p, m, x, t);
            write_row(r.csv, {std::string(to_string(m)), fmt(x), fmt(t), fmt(s.u_star), fmt(s.residual), fmt(a0)});
            r.summary = "u* = " + short_num(s.u_star);
        }
    }
}

std::vector<TailMethod> methods(const Options& o, TailMethod fallback) {
    std::vector<TailMethod> out;
    for (const auto& s : o.methods) out.push_back(parse_tail_method(s));
    if (out.empty()) out.push_back(fallback);
    return out;
}

void cmd_tail(const ModelParams& p, const Options& o, Output& r) {
    const Marginal m = parse_marginal(o.marginal);
    const McConfig mc = mc_config(o);
    write_row(r.csv, {"t", "x", "method", "p", "log_p", "error"});
    for (const TailMethod method : methods(o, TailMethod::Fourier))
        for (const double x : need(o.x, "--x"))
            for (const double t : need(o.t, "--t")) {
                const TailEstimate e = tail(p, m, x, t, method, &mc, o.prefactor);
                write_row(r.csv, {fmt(t), fmt(x), std::string(to_string(method)), fmt(e.p), fmt(e.log_p), fmt(e.error)});
                r.summary = "P = " + short_num(e.p) + " (log " + short_num(e.log_p) + ")";
            }
}

void cmd_converge(const ModelParams& p, const Options& o, Output& r) {
    const Marginal m = parse_marginal(o.marginal);
    const McConfig mc = mc_config(o);
    write_row(r.csv, {"t", "x", "method", "neg_t_log_p", "rate", "gap"});
    for (const TailMethod method : methods(o, TailMethod::Fourier))
        for (const double x : need(o.x, "--x")) {
            const auto rows = ldp_convergence(p, m, x, need(o.t, "--t"), method, &mc);
            for (const auto& row : rows)
                write_row(r.csv, {fmt(row.t), fmt(x), std::string(to_string(method)), fmt(row.neg_t_log_p),
                                  fmt(row.rate), fmt(row.gap)});
            r.summary = "gap at t = " + short_num(rows.back().t) + ": " + short_num(rows.back().gap);
        }
}

void cmd_prefactor(const ModelParams& p, const Options& o, Output& r) {
    const Marginal m = parse_marginal(o.marginal);
    const std::vector<double> t_grid = o.t.empty() ? std::vector<double>{0.05, 0.02, 0.01, 0.005} : o.t;
    write_row(r.csv, {"marginal", "x", "c_hat", "exponent_free", "c_free", "c_closed", "c_saddle", "saddle_ratio"});
    for (const double x : need(o.x, "--x")) {
        const PrefactorFit fit = extract_prefactor(p, m, x, t_grid);
        const double closed = m == Marginal::V ? sharp_prefactor_v(p, x) : std::nan("");
        const double saddle_c = saddle_prefactor(p, m, x);
        write_row(r.csv, {std::string(to_string(m)), fmt(x), fmt(fit.c_hat), fmt(fit.exponent_free), fmt(fit.c_free),
                          fmt(closed), fmt(saddle_c), fmt(saddle_c / closed)});
        r.summary = "C = " + short_num(fit.c_hat) + ", free exponent " + short_num(fit.exponent_free);
    }
}

void cmd_variational(const ModelParams& p, const Options& o, Output& r) {
    const std::vector<std::size_t> ns = o.n.empty() ? std::vector<std::size_t>{1000} : o.n;
    write_row(r.csv, {"x", "v0", "n", "action_optimized", "action_closed_path", "fw_rate", "gap"});
    for (const double v0 : need(o.v0, "--v0"))
        for (const double x : need(o.x, "--x"))
            for (const std::size_t n : ns) {
                const ActionMinimization res = minimize_action(p, v0, x, n);
                const double fw = fw_rate(p, v0, x).value;
                const double opt = res.optimized.value;
                const double gap = std::isinf(opt) && std::isinf(fw) ? 0.0 : std::abs(opt - fw);
                write_row(r.csv, {fmt(x), fmt(v0), std::to_string(n), fmt(opt), fmt(res.closed_form_path.value),
                                  fmt(fw), fmt(gap)});
                if (!o.path_out.empty())
                    write_file(o.path_out, [&](std::ostream& f) { write_path_csv(f, res.optimized.minimizer); });
                r.summary = "action = " + short_num(opt) + ", closed form " + short_num(fw);
            }
}

void cmd_mc(const ModelParams& p, const Options& o, Output& r) {
    const Marginal m = parse_marginal(o.marginal);
    const McConfig mc = mc_config(o);
    write_row(r.csv, {"marginal", "x", "t", "p_hat", "std_err", "n_paths"});
    for (const double x : need(o.x, "--x"))
        for (const double t : need(o.t, "--t")) {
            const McEstimate e = tail_mc(p, m, x, t, mc);
            write_row(r.csv, {std::string(to_string(m)), fmt(x), fmt(t), fmt(e.p_hat), fmt(e.std_err),
                              std::to_string(e.n_paths)});
            r.summary = "p_hat = " + short_num(e.p_hat) + " +/- " + short_num(e.std_err);
        }
    if (!o.dump.empty()) {
        const auto samples = simulate_xv(p, need(o.t, "--t").front(), mc);
        write_file(o.dump, [&](std::ostream& f) { write_samples_csv(f, samples); });
    }
}

void cmd_steepness(const ModelParams& p, const Options& o, Output& r) {
    const Marginal m = parse_marginal(o.marginal);
    const std::vector<double> t_grid = o.t.empty() ? std::vector<double>{0.1, 0.01, 0.001} : o.t;
    const SteepnessReport rep = steepness_report(p, m, t_grid);
    write_row(r.csv, {"marginal", "side", "boundary", "slope", "essentially_smooth"});
    const std::string smooth = rep.essentially_smooth ? "true" : "false";
    write_row(r.csv, {std::string(to_string(m)), "lower", fmt(rep.domain.lower), fmt(rep.boundary_slopes.first), smooth});
    write_row(r.csv, {std::string(to_string(m)), "upper", fmt(rep.domain.upper), fmt(rep.boundary_slopes.second), smooth});
    r.summary = "essentially smooth: " + smooth;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Small-time tail asymptotics of a square-root stochastic volatility model", "sharpld"};
    app.require_subcommand(1);
    Options o;

    using Handler = void (*)(const ModelParams&, const Options&, Output&);
    std::vector<std::pair<CLI::App*, Handler>> commands;
    auto add = [&](const char* name, const char* help, Handler h) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--params", o.params_file, "JSON file {\"a\", \"b\", \"xi\", \"rho\"} (default a=0.12 b=-1 xi=0.4 rho=-0.5)");
        sub->add_option("--marginal", o.marginal, "X or V")->check(CLI::IsMember({"X", "V", "x", "v"}));
        sub->add_option("--x,--x-grid", o.x, "level(s), comma separated")->delimiter(',');
        sub->add_option("--t,--t-grid", o.t, "time(s), comma separated")->delimiter(',');
        sub->add_option("--out", o.out_file, "CSV output file");
        commands.emplace_back(sub, h);
        return sub;
    };
    auto add_mc = [&](CLI::App* sub) {
        sub->add_option("--seed", o.seed, "Monte Carlo seed");
        sub->add_option("--paths", o.paths, "Monte Carlo paths")->check(CLI::PositiveNumber);
        sub->add_option("--steps", o.steps, "time steps per path")->check(CLI::PositiveNumber);
        sub->add_option("--streams", o.streams, "independent generator streams")->check(CLI::PositiveNumber);
    };
    auto add_method = [&](CLI::App* sub) {
        sub->add_option("--method", o.methods, "sharp, gamma-exact, fourier or monte-carlo (comma separated)")
            ->delimiter(',');
    };

    add("rate", "rate function", cmd_rate);
    add("domain", "effective domain of the rescaled cgf (t = 0 gives the limit)", cmd_domain);
    add("saddle", "saddlepoint u*(x, t)", cmd_saddle);
    CLI::App* tail_cmd = add("tail", "tail probability P(M_t >= x)", cmd_tail);
    add_method(tail_cmd);
    add_mc(tail_cmd);
    tail_cmd->add_option("--prefactor", o.prefactor, "prefactor C for the sharp method");
    CLI::App* conv = add("converge", "-t log P against the rate function", cmd_converge);
    add_method(conv);
    add_mc(conv);
    add("prefactor", "fit of the tail prefactor", cmd_prefactor);
    CLI::App* var = add("variational", "discrete action minimization", cmd_variational);
    var->add_option("--v0", o.v0, "start value(s)")->delimiter(',');
    var->add_option("--n", o.n, "grid size(s)")->delimiter(',');
    var->add_option("--path-out", o.path_out, "CSV file for the minimizing path");
    CLI::App* mc = add("mc", "Monte Carlo tail estimate", cmd_mc);
    add_mc(mc);
    mc->add_option("--dump", o.dump, "CSV file for raw (X, V) samples");
    add("steepness", "boundary slopes of the limiting cgf", cmd_steepness);

    std::vector<const char*> argv{"sharpld"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    Output result;
    try {
        const ModelParams p = load_params(o.params_file);
        for (const auto& [sub, handler] : commands) {
            if (!sub->parsed()) continue;
            handler(p, o, result);
        }
    } catch (const CLI::RequiredError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return is_validation_error(e.code()) ? kExitValidation : kExitNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumeric;
    }

    if (!o.out_file.empty()) {
        try {
            write_file(o.out_file, [&](std::ostream& f) { f << result.csv.str(); });
        } catch (const Error& e) {
            err << "error: " << e.what() << '\n';
            return kExitValidation;
        }
        out << result.summary << '\n';
    } else {
        out << result.csv.str();
        err << result.summary << '\n';
    }
    return kExitOk;
}

} // namespace sharpld::cli
