// Command-line driver: one subcommand per experiment, artifacts under --out.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "ablab/acceptance.hpp"
#include "ablab/analysis.hpp"
#include "ablab/config.hpp"
#include "ablab/io.hpp"
#include "ablab/limit.hpp"
#include "ablab/model.hpp"
#include "ablab/pde.hpp"

namespace fs = std::filesystem;
using namespace ablab;

namespace {

constexpr int kOk = 0;
constexpr int kAssertionFailed = 1;
constexpr int kConfigError = 2;
constexpr int kDiverged = 3;

struct Overrides {
    std::optional<std::string> config_file;
    std::vector<std::pair<std::string, std::string>> values;
    bool fresh_seed = false;
};

/// Registers the shared experiment flags on a subcommand; values are stored as
/// strings and applied through the same path as config-file keys.
void add_common_flags(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config_file, "key = value config file (unknown keys are errors)");
    const auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
        sub->add_option_function<std::string>(
            name, [&o, key](const std::string& v) { o.values.emplace_back(key, v); }, help);
    };
    flag("--epsilon", "epsilon", "time-scale separation eps > 0");
    flag("--alpha", "alpha", "band exponent, delta = eps^alpha");
    flag("--x0", "x0", "initial x");
    flag("--y0", "y0", "initial y");
    flag("--horizon", "horizon", "final time T");
    flag("--step", "step", "time step h");
    flag("--step-over-epsilon", "step_over_epsilon", "use h = eps * value instead of --step");
    flag("--scheme", "scheme", "exact-splitting | frozen-ou | euler-maruyama");
    flag("--replicas", "replicas", "Monte Carlo replicas");
    flag("--seed", "seed", "master seed");
    flag("--variant", "variant", "dissipative | no-dissipation");
    flag("--epsilons", "epsilons", "comma-separated eps ladder");
    flag("--alphas", "alphas", "comma-separated alpha list");
    flag("--level", "level", "excursion level a");
    flag("--time", "time", "evaluation time");
    flag("--function", "function", "gaussian | lorentzian | square | cos_square");
    flag("--n-points", "n_points", "PDE grid points");
    flag("--out", "out", "output directory");
    flag("--format", "format", "csv | json");
    sub->add_flag("--fresh-seed", o.fresh_seed, "draw the master seed from the system entropy source");
}

ExperimentConfig resolve(const std::string& command, const Overrides& o) {
    ExperimentConfig cfg;
    cfg.command = command;
    if (o.config_file) apply_config_file(*o.config_file, cfg);
    for (const auto& [key, value] : o.values) set_config_value(cfg, key, value);
    if (o.fresh_seed) {
        std::random_device rd;
        cfg.mc.seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
    }
    cfg.model.validate();
    if (cfg.mc.replicas < 2) throw ConfigError("config: replicas must be >= 2");
    return cfg;
}

/// Shortest round-trip form with a trailing ".0" for integral values.
std::string repr(double x) {
    char buf[32];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    std::string s = buf;
    if (std::isfinite(x) && s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

fs::path artifact(const ExperimentConfig& cfg, const std::string& stem, const std::string& ext) {
    return fs::path(cfg.out_dir) / (cfg.command + "_" + stem + "." + ext);
}

void print_stat(const std::string& label, const StatReport& r) {
    std::printf("%-28s %+.6e  +- %.2e  (n=%zu)\n", label.c_str(), r.estimate, r.std_error, r.n_replicas);
}

std::vector<double> ladder_or(const ExperimentConfig& cfg, std::vector<double> fallback) {
    return cfg.epsilons.empty() ? fallback : cfg.epsilons;
}

MonteCarloOptions options_for(const ExperimentConfig& cfg, double eps) {
    MonteCarloOptions o = cfg.mc;
    // The rescaled system needs h below eps unless a ratio was configured.
    if (o.step_over_epsilon <= 0.0) o.step = std::min(o.step, eps / 10.0);
    return o;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const ExperimentConfig& cfg, const std::string& kind, std::size_t paths, bool polar) {
    const TimeGrid grid(cfg.model.horizon, cfg.mc.step_for(cfg.model.epsilon));
    const auto pairs = echo_pairs(cfg);
    bool diverged = false;
    json summary = json::array();
    for (std::size_t r = 0; r < paths; ++r) {
        const auto streams = replica_streams(cfg.mc.seed, r);
        const auto make = [&]() -> PathSample {
            if (kind == "rescaled") return simulate_rescaled(cfg.model, grid, streams, cfg.mc.scheme);
            if (kind == "slowtime") return simulate_slowtime(cfg.model, grid, streams);
            const LimitParams lp{cfg.model.y0,
                                 cfg.model.variant == Variant::dissipative ? LimitVariant::damped
                                                                           : LimitVariant::no_dissipation,
                                 cfg.model.horizon};
            if (kind == "limit-em") return simulate_limit_em(lp, grid, streams[0]);
            if (kind == "limit-exact") return simulate_limit_exact(lp, grid, streams);
            throw ConfigError("simulate: unknown --kind '" + kind + "'");
        };
        const PathSample path = make();
        diverged = diverged || path.diverged;
        const bool as_polar = polar && path.dim() == 2;
        const PathSample out = as_polar ? to_polar(path) : path;
        const auto file = artifact(cfg, kind + "_" + std::to_string(r), "csv");
        write_path_csv(file, out, pairs, as_polar);
        summary.push_back({{"replica", r},
                           {"file", file.string()},
                           {"diverged", path.diverged},
                           {"final_y", path.diverged ? json(nullptr) : json(path.y(path.size() - 1))}});
        std::printf("wrote %s%s\n", file.string().c_str(), path.diverged ? " (diverged)" : "");
    }
    write_json(artifact(cfg, kind, "json"), {{"operation", "simulate"}, {"kind", kind}, {"paths", summary}}, pairs);
    if (diverged) {
        std::fprintf(stderr, "simulate: at least one path diverged; reduce --step or use --scheme exact-splitting\n");
        return kDiverged;
    }
    return kOk;
}

int cmd_project(double x, double y) {
    std::printf("%s\n", repr(project_pi({x, y})).c_str());
    return kOk;
}

int cmd_lemma1(const ExperimentConfig& cfg) {
    const auto eps = ladder_or(cfg, {1e-2, std::pow(10.0, -2.5), 1e-3, std::pow(10.0, -3.5)});
    const std::vector<double> alphas = cfg.alphas.empty() ? std::vector<double>{cfg.model.alpha} : cfg.alphas;
    MonteCarloOptions o = cfg.mc;
    if (o.step_over_epsilon <= 0.0) o.step_over_epsilon = 0.05;
    const double t = cfg.time > 0.0 ? cfg.time : 0.2;
    const auto pairs = echo_pairs(cfg);
    bool pass = true;
    json fits = json::array();
    for (double alpha : alphas) {
        ModelParams p = cfg.model;
        p.alpha = alpha;
        std::vector<double> estimates;
        json runs = json::array();
        for (double e : eps) {
            p.epsilon = e;
            const Lemma1Report r = lemma1_xsquare(p, t, o);
            estimates.push_back(r.x_square.estimate);
            print_stat("eps=" + repr(e) + " E[X_t^2]", r.x_square);
            if (r.warning) std::printf("  warning: exclusion rate %.3f above 10%%\n", r.exclusion_rate);
            runs.push_back({{"epsilon", e}, {"x_square", to_json(r.x_square)}, {"exclusion_rate", r.exclusion_rate}});
        }
        const ScalingFit fit = fit_scaling(eps, estimates);
        const double lo = 0.9 * (1.0 - alpha) - 0.15, hi = (1.0 - alpha) + 0.15;
        const bool ok = fit.slope >= lo && fit.slope <= hi;
        pass = pass && ok;
        std::printf("alpha=%s slope %.4f (95%% CI %.4f..%.4f) window [%.3f, %.3f] %s\n", repr(alpha).c_str(), fit.slope,
                    fit.slope_ci_low, fit.slope_ci_high, lo, hi, ok ? "PASS" : "FAIL");
        if (cfg.format == "csv") write_scaling_csv(artifact(cfg, "alpha" + repr(alpha), "csv"), fit, pairs);
        fits.push_back({{"alpha", alpha}, {"t", t}, {"fit", to_json(fit)}, {"runs", runs}, {"pass", ok},
                        {"threshold", {lo, hi}}});
    }
    write_json(artifact(cfg, "report", "json"), {{"operation", "lemma1_scaling"}, {"fits", fits}, {"pass", pass}},
               pairs);
    return pass ? kOk : kAssertionFailed;
}

int cmd_crossings(const ExperimentConfig& cfg) {
    const CrossingReport c = crossing_stats(cfg.model, options_for(cfg, cfg.model.epsilon));
    print_stat("up-crossings N", c.upcrossings);
    print_stat("sigma - tau", c.band_exit);
    print_stat("tau - sigma", c.band_return);
    std::printf("delta %.6g  bounds: N <= %.4g, sigma-tau <= %.4g, tau-sigma >= %.4g  no-crossing %.4f\n", c.delta,
                c.bound_upcrossings, c.bound_band_exit, c.bound_band_return, c.fraction_no_crossing);
    const bool pass = c.upper_bounds_hold();
    write_json(artifact(cfg, "report", "json"), {{"operation", "crossing_stats"}, {"report", to_json(c)}, {"pass", pass}},
               echo_pairs(cfg));
    std::printf("%s\n", pass ? "PASS" : "FAIL");
    return pass ? kOk : kAssertionFailed;
}

/// Shared ladder driver: runs `estimate` per eps, asserts a strict decrease of
/// |estimate| along the ladder and smallness at the finest eps.
template <class Estimate>
int ladder_command(const ExperimentConfig& cfg, const std::string& operation, Estimate&& estimate) {
    const auto eps = ladder_or(cfg, {cfg.model.epsilon});
    std::vector<double> values;
    json entries = json::array();
    StatReport last;
    for (double e : eps) {
        ModelParams p = cfg.model;
        p.epsilon = e;
        last = estimate(p, options_for(cfg, e));
        values.push_back(std::abs(last.estimate));
        print_stat(operation + " eps=" + repr(e), last);
        const double threshold = 3.0 * last.std_error + 0.02;
        entries.push_back(check_entry(operation, last, std::abs(last.estimate) <= threshold, threshold));
    }
    bool pass = std::abs(last.estimate) <= 3.0 * last.std_error + 0.02;
    if (eps.size() >= 2) {
        const bool trend = strictly_decreasing(values);
        std::printf("strictly decreasing along the ladder: %s\n", trend ? "yes" : "no");
        pass = pass && trend;
    }
    if (cfg.format == "csv") {
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < eps.size(); ++i)
            rows.push_back({eps[i], entries[i]["estimate"].get<double>(), entries[i]["std_error"].get<double>()});
        write_table_csv(artifact(cfg, "ladder", "csv"), {"epsilon", "estimate", "std_error"}, rows, echo_pairs(cfg));
    }
    write_json(artifact(cfg, "report", "json"), {{"operation", operation}, {"entries", entries}, {"pass", pass}},
               echo_pairs(cfg));
    std::printf("%s\n", pass ? "PASS" : "FAIL");
    return pass ? kOk : kAssertionFailed;
}

int cmd_martingale(const ExperimentConfig& cfg) {
    const TestFunction f = function_by_name(cfg.function);
    return ladder_command(cfg, "martingale_residual",
                          [&](const ModelParams& p, const MonteCarloOptions& o) { return martingale_residual(p, f, o); });
}

int cmd_weak_gap(const ExperimentConfig& cfg) {
    const TestFunction f = function_by_name(cfg.function);
    return ladder_command(cfg, "weak_gap_b", [&](const ModelParams& p, const MonteCarloOptions& o) {
        const WeakGapReport r = weak_gap_b(p, f, o);
        std::printf("  limit y0 %.6g, coupled %+.3e +- %.1e, KS %.4f (1%% critical %.4f)\n", r.limit_y0,
                    r.coupled.estimate, r.coupled.std_error, r.ks_statistic, r.ks_critical);
        return r.independent;
    });
}

int cmd_excursions(const ExperimentConfig& cfg) {
    const auto eps = ladder_or(cfg, {cfg.model.epsilon});
    const double t = cfg.time > 0.0 ? cfg.time : cfg.model.horizon;
    std::vector<double> probs;
    json entries = json::array();
    for (double e : eps) {
        ModelParams p = cfg.model;
        p.epsilon = e;
        const StatReport r = excursion_probability(p, cfg.level, t, options_for(cfg, e));
        probs.push_back(r.estimate);
        print_stat("p(a,t;eps=" + repr(e) + ")", r);
        entries.push_back(check_entry("excursion_probability", r, true, 0.0));
    }
    const ExcursionSurvey s = excursion_survey(cfg.model, cfg.level, t, options_for(cfg, cfg.model.epsilon));
    std::printf("eps=%s: %zu excursion records in %zu replicas, median max|X| %.4g, median jump-back %.4g\n",
                repr(cfg.model.epsilon).c_str(), s.records.size(), s.replicas_with_excursion, s.median_max_abs_x,
                s.median_jump_back);
    const bool pass = eps.size() < 2 || strictly_decreasing(probs);
    json records = json::array();
    for (const auto& rec : s.records) records.push_back(to_json(rec));
    if (cfg.format == "csv") {
        std::vector<std::vector<double>> rows;
        for (const auto& rec : s.records)
            rows.push_back({rec.departure_time, rec.entry_time, rec.return_time, rec.max_abs_x});
        write_table_csv(artifact(cfg, "records", "csv"), {"departure_time", "entry_time", "return_time", "max_abs_x"},
                        rows, echo_pairs(cfg));
    }
    write_json(artifact(cfg, "report", "json"),
               {{"operation", "excursions"}, {"probabilities", entries}, {"records", records}, {"pass", pass}},
               echo_pairs(cfg));
    std::printf("%s\n", pass ? "PASS" : "FAIL");
    return pass ? kOk : kAssertionFailed;
}

int cmd_pde(const ExperimentConfig& cfg) {
    const TestFunction f = function_by_name(cfg.function);
    const double t = cfg.time > 0.0 ? cfg.time : cfg.model.horizon;
    const Grid1D grid = Grid1D::make(cfg.n_points, t);
    const PDESolution sol = solve_limit_pde(f, grid, {0.5 * t, t});
    const auto pairs = echo_pairs(cfg);
    write_pde_csv(artifact(cfg, "solution", "csv"), sol, pairs);
    MonteCarloOptions o = cfg.mc;
    json probes = json::array();
    bool pass = sol.singular_node_ok;
    std::size_t failed = 0;
    for (double ts : {0.5 * t, t})
        for (double y : {0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
            const StatReport mc = feynman_kac_mc(y, ts, f, o);
            const double u = sol.value(ts, y);
            const double tol = 3.0 * mc.std_error + 1e-3;
            const bool ok = std::abs(mc.estimate - u) <= tol;
            failed += !ok;
            pass = pass && ok;
            probes.push_back({{"t", ts}, {"y", y}, {"pde", u}, {"mc", to_json(mc)}, {"tolerance", tol}, {"pass", ok}});
        }
    std::printf("grid dy=%.4g dt=%.3g; singular node %s (2(u1-u0)/dy^2 = %.6g)\n", grid.dy, grid.dt,
                sol.singular_node_ok ? "stable" : "UNSTABLE, refine dy", sol.singular_ratio);
    std::printf("%zu/20 probe points agree with Feynman-Kac Monte Carlo\n", 20 - failed);
    write_json(artifact(cfg, "probes", "json"),
               {{"operation", "solve_limit_pde"}, {"function", f.name}, {"probes", probes}, {"pass", pass}}, pairs);
    std::printf("%s\n", pass ? "PASS" : "FAIL");
    return pass ? kOk : kAssertionFailed;
}

int cmd_euler_arnold(const ExperimentConfig& cfg) {
    const CriterionResult r = run_criterion(10, {cfg.mc.seed, false, false});
    std::size_t violations = 0;
    for (const auto& c : r.checks)
        if (c.contains("violations")) violations += c["violations"].get<std::size_t>();
        else if (!c["pass"].get<bool>()) ++violations;
    write_json(artifact(cfg, "report", "json"),
               {{"operation", "euler_arnold"}, {"checks", r.checks}, {"violations", violations}, {"pass", r.pass}},
               echo_pairs(cfg));
    std::printf("%s: %zu identity violations\n", r.pass ? "PASS" : "FAIL", violations);
    return r.pass ? kOk : kAssertionFailed;
}

int cmd_acceptance(const ExperimentConfig& cfg, bool quick, bool rerun) {
    const AcceptanceOptions options{cfg.mc.seed, quick, rerun};
    const AcceptanceReport report = run_acceptance(options, [](const CriterionResult& r) {
        std::printf("%s\n", format_result_line(r).c_str());
        std::fflush(stdout);
    });
    ConfigPairs pairs{{"command", "acceptance"}, {"seed", std::to_string(cfg.mc.seed)}, {"quick", quick ? "true" : "false"}};
    write_json(fs::path(cfg.out_dir) / "acceptance.json", report.to_json(options), pairs);
    std::printf("acceptance %s\n", report.pass() ? "PASS" : "FAIL");
    return report.pass() ? kOk : kAssertionFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fast-slow AB-model experiments: simulation, estimators, limit PDE, acceptance suite"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version_string());

    Overrides o;
    std::string kind = "rescaled";
    std::size_t paths = 1;
    bool polar = false;
    double px = 0.0, py = 0.0;
    bool quick = false, no_rerun = false;

    auto* simulate = app.add_subcommand("simulate", "write sample paths as CSV");
    add_common_flags(simulate, o);
    simulate->add_option("--kind", kind, "rescaled | slowtime | limit-em | limit-exact");
    simulate->add_option("--paths", paths, "number of paths to write");
    simulate->add_flag("--polar", polar, "write (t, r, theta) for 2-D paths");

    auto* project = app.add_subcommand("project", "print the limit point y^pi(x, y)");
    project->add_option("--x", px, "x coordinate")->required();
    project->add_option("--y", py, "y coordinate")->required();

    struct Entry {
        const char* name;
        const char* help;
    };
    const Entry entries[] = {{"lemma1", "E[X_t^2] scaling fit over an eps ladder"},
                             {"crossings", "band up-crossing statistics against exit-time oracles"},
                             {"martingale", "martingale residual along an eps ladder"},
                             {"weak-gap", "weak gap to the limit law along an eps ladder"},
                             {"excursions", "excursion probabilities and anatomy"},
                             {"pde", "finite-difference limit PDE with Feynman-Kac probes"},
                             {"euler-arnold", "exact Lie-algebra identities and Euler-Arnold equivalence"}};
    std::vector<CLI::App*> subs;
    for (const auto& e : entries) {
        auto* sub = app.add_subcommand(e.name, e.help);
        add_common_flags(sub, o);
        subs.push_back(sub);
    }
    auto* acceptance = app.add_subcommand("acceptance", "run the full acceptance suite");
    add_common_flags(acceptance, o);
    acceptance->add_flag("--quick", quick, "replica counts divided by ten (smoke run)");
    acceptance->add_flag("--no-rerun", no_rerun, "skip the in-process determinism rerun");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (project->parsed()) return cmd_project(px, py);
        CLI::App* active = app.get_subcommands().front();
        const ExperimentConfig cfg = resolve(active->get_name(), o);
        const std::string name = active->get_name();
        if (name == "simulate") return cmd_simulate(cfg, kind, paths, polar);
        if (name == "lemma1") return cmd_lemma1(cfg);
        if (name == "crossings") return cmd_crossings(cfg);
        if (name == "martingale") return cmd_martingale(cfg);
        if (name == "weak-gap") return cmd_weak_gap(cfg);
        if (name == "excursions") return cmd_excursions(cfg);
        if (name == "pde") return cmd_pde(cfg);
        if (name == "euler-arnold") return cmd_euler_arnold(cfg);
        if (name == "acceptance") return cmd_acceptance(cfg, quick, !no_rerun);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfigError;
    } catch (const DivergenceError& e) {
        std::fprintf(stderr, "diverged: %s\n", e.what());
        return kDiverged;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kAssertionFailed;
    }
    return kConfigError;
}
