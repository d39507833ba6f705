#include "ablab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "ablab/analysis.hpp"
#include "ablab/euler_arnold.hpp"
#include "ablab/limit.hpp"
#include "ablab/model.hpp"
#include "ablab/parallel.hpp"
#include "ablab/pde.hpp"

namespace ablab {

namespace {

constexpr std::uint64_t kSalt = 0x9E3779B97F4A7C15ULL;

/// Accumulates named checks for one criterion.
class Checks {
public:
    void add(const std::string& name, bool pass, json detail = json::object()) {
        detail["check"] = name;
        detail["pass"] = pass;
        all_pass_ = all_pass_ && pass;
        ++count_;
        if (!pass) ++failed_;
        list_.push_back(std::move(detail));
    }
    [[nodiscard]] bool pass() const { return all_pass_ && count_ > 0; }
    [[nodiscard]] json take() { return std::move(list_); }
    [[nodiscard]] std::size_t count() const { return count_; }
    [[nodiscard]] std::size_t failed() const { return failed_; }

private:
    json list_ = json::array();
    bool all_pass_ = true;
    std::size_t count_ = 0;
    std::size_t failed_ = 0;
};

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string fmt(const char* format, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, a);
    return buf;
}

struct Context {
    std::uint64_t seed;
    bool quick;
    [[nodiscard]] std::size_t n(std::size_t full) const { return quick ? std::max<std::size_t>(full / 10, 500) : full; }
    [[nodiscard]] std::uint64_t seed_for(int id, int sub = 0) const {
        return seed + 1000ULL * static_cast<std::uint64_t>(id) + static_cast<std::uint64_t>(sub);
    }
};

json stat(const StatReport& r) { return to_json(r); }

bool strictly_decreasing_abs(const std::vector<double>& v) {
    std::vector<double> a;
    for (double x : v) a.push_back(std::abs(x));
    return strictly_decreasing(a);
}

// ---------------------------------------------------------------------------

CriterionResult projection_oracle(const Context& ctx) {
    CriterionResult res{1, "projection oracle"};
    Checks checks;
    const double p34 = project_pi({3.0, 4.0});
    checks.add("project_pi(3,4) == 5", p34 == 5.0, {{"value", p34}});
    checks.add("project_pi(0,-2) == 2", project_pi({0.0, -2.0}) == 2.0);
    checks.add("project_pi(0,0) == 0", project_pi({0.0, 0.0}) == 0.0);

    const State2 end34 = flow_unperturbed({3.0, 4.0}, 50.0);
    checks.add("flow (3,4) t=50 near (0,5)", (end34 - State2{0.0, 5.0}).norm() < 1e-4,
               {{"x", end34.x()}, {"y", end34.y()}});
    const State2 end_b = flow_unperturbed({1e-3, -1.0}, 50.0);
    checks.add("flow (1e-3,-1) t=50 near (0,1)", (end_b - State2{0.0, 1.0}).norm() < 1e-3,
               {{"x", end_b.x()}, {"y", end_b.y()}});

    // Random starts with 0.1 <= E <= 100 and x0 != 0.
    const RngStream u{ctx.seed_for(1), 0};
    double worst_projection = 0.0;
    double worst_energy = 0.0;
    constexpr int kStarts = 100;
    for (int i = 0; i < kStarts; ++i) {
        const double radius = std::sqrt(0.1 + 99.9 * u.uniform(3 * i));
        const double angle = (u.uniform(3 * i + 1) - 0.5) * (std::numbers::pi - 0.1);
        const double sign = u.uniform(3 * i + 2) < 0.5 ? -1.0 : 1.0;
        const State2 s{sign * radius * std::cos(angle), radius * std::sin(angle)};
        worst_projection = std::max(worst_projection, std::abs(project_pi(s) - project_pi_by_flow(s)));
        const double e0 = energy(s);
        double drift = 0.0;
        integrate_dopri5<State2>([](const State2& z) { return unperturbed_rhs(z); }, s, 100.0, 1e-12,
                                 [&](double, const State2& z) {
                                     drift = std::max(drift, std::abs(energy(z) - e0) / std::max(e0, 1.0));
                                 });
        worst_energy = std::max(worst_energy, drift);
    }
    checks.add("ODE cross-check on random starts < 1e-4", worst_projection < 1e-4,
               {{"starts", kStarts}, {"max_abs_difference", worst_projection}});
    checks.add("relative energy drift over t<=100 < 1e-8", worst_energy < 1e-8, {{"max_relative_drift", worst_energy}});
    res.pass = checks.pass();
    res.summary = "pi(3,4)=" + fmt("%.17g", p34) + ", max |pi - flow| " + fmt("%.2e", worst_projection) +
                  ", max energy drift " + fmt("%.2e", worst_energy);
    res.checks = checks.take();
    return res;
}

CriterionResult radial_identity(const Context& ctx) {
    CriterionResult res{2, "exact radial identity"};
    Checks checks;
    const std::size_t n = ctx.n(10000);
    std::string summary;
    for (double eps : {0.1, 0.01}) {
        const ModelParams p{eps, 0.1, Variant::dissipative, 3.0, 4.0, 1.0};
        const TimeGrid grid(p.horizon, 1e-3);
        std::vector<double> radius(n), limit(n);
        const std::uint64_t seed = ctx.seed_for(2);
        parallel_for(n, [&](std::size_t r) {
            State2 last{0.0, 0.0};
            simulate_rescaled(p, grid, replica_streams(seed, r), [&](std::size_t, const State2& s, double) { last = s; });
            radius[r] = last.norm();
            limit[r] = sample_limit_terminal(5.0, p.horizon, replica_streams(seed ^ kSalt, r));
        });
        const double ks = ks_two_sample(radius, limit);
        const double crit = ks_critical_two_sample(n, n);
        checks.add("KS terminal radius vs damped BES(2), eps=" + fmt("%g", eps), ks < crit,
                   {{"epsilon", eps}, {"ks", ks}, {"critical", crit}, {"n", n}});
        summary += "eps=" + fmt("%g", eps) + " KS " + fmt("%.4f", ks) + "/" + fmt("%.4f", crit) + "; ";
    }
    res.pass = checks.pass();
    res.summary = summary;
    res.checks = checks.take();
    return res;
}

CriterionResult stationary_law(const Context& ctx) {
    CriterionResult res{3, "stationary law"};
    Checks checks;
    const std::size_t n = ctx.n(10000);
    const double horizon = 10.0;
    std::vector<double> y(n), s(n), s_em(n);
    const std::uint64_t seed = ctx.seed_for(3);
    parallel_for(n, [&](std::size_t r) {
        y[r] = sample_limit_terminal(2.0, horizon, replica_streams(seed, r));
        s[r] = y[r] * y[r];
    });
    const auto exp_cdf = [](double v) { return v <= 0.0 ? 0.0 : -std::expm1(-v); };
    const double ks = ks_one_sample(s, exp_cdf);
    const double crit = ks_critical_one_sample(n);
    checks.add("exact sampler: Y^2 ~ Exp(1)", ks < crit, {{"ks", ks}, {"critical", crit}, {"n", n}});

    const TimeGrid grid(horizon, 1e-3);
    parallel_for(n, [&](std::size_t r) {
        double last = 0.0;
        simulate_limit_em({2.0, LimitVariant::damped, horizon}, grid, RngStream{seed + 1, r},
                          [&](std::size_t, double v) { last = v; });
        s_em[r] = last * last;
    });
    const double ks_em = ks_one_sample(s_em, exp_cdf);
    checks.add("squared-radius scheme (h=1e-3): Y^2 ~ Exp(1)", ks_em < crit, {{"ks", ks_em}, {"critical", crit}});

    const StatReport mean = summarize(y, {0.0, 0.0, horizon, horizon, seed});
    const double target = 0.5 * std::sqrt(std::numbers::pi);
    checks.add("mean Y within 3 SE of sqrt(pi)/2", std::abs(mean.estimate - target) <= 3.0 * mean.std_error,
               {{"mean", stat(mean)}, {"target", target}});
    res.pass = checks.pass();
    res.summary = "KS " + fmt("%.4f", ks) + " (scheme " + fmt("%.4f", ks_em) + ") / " + fmt("%.4f", crit) +
                  ", mean " + fmt("%.4f", mean.estimate) + " vs " + fmt("%.4f", target);
    res.checks = checks.take();
    return res;
}

CriterionResult moment_closed_form(const Context& ctx) {
    CriterionResult res{4, "moment closed form"};
    Checks checks;
    const std::size_t n = ctx.n(100000);
    const std::uint64_t seed = ctx.seed_for(4);
    std::string summary;
    const std::vector<double> times{0.5, 1.0, 2.0};
    for (double t : times) {
        std::vector<double> s(n);
        parallel_for(n, [&](std::size_t r) {
            const double y = sample_limit_terminal(2.0, t, replica_streams(seed, r));
            s[r] = y * y;
        });
        const StatReport m = summarize(s, {0.0, 0.0, t, t, seed});
        const double exact = 1.0 + 3.0 * std::exp(-2.0 * t);
        const double z = (m.estimate - exact) / m.std_error;
        checks.add("E[Y_t^2] within 3 SE, t=" + fmt("%g", t), std::abs(z) <= 3.0,
                   {{"t", t}, {"mc", stat(m)}, {"exact", exact}});
        summary += "t=" + fmt("%g", t) + " z=" + fmt("%+.2f", z) + "; ";
    }
    const Grid1D grid = Grid1D::make(601, 2.0);
    const PDESolution sol = solve_limit_pde(catalog::square(), grid, times);
    double worst = 0.0;
    for (double t : times)
        for (std::size_t j = 0; j < grid.n_points && grid.y(j) <= 3.0 + 1e-12; ++j) {
            const double y = grid.y(j);
            worst = std::max(worst, std::abs(sol.value(t, y) - (1.0 + (y * y - 1.0) * std::exp(-2.0 * t))));
        }
    checks.add("PDE surface error (y <= 3) < 1e-3", worst < 1e-3, {{"max_error", worst}, {"dy", grid.dy}, {"dt", grid.dt}});
    res.pass = checks.pass();
    res.summary = summary + "PDE max error " + fmt("%.2e", worst);
    res.checks = checks.take();
    return res;
}

CriterionResult lemma1_scaling_check(const Context& ctx) {
    CriterionResult res{5, "X-moment scaling"};
    Checks checks;
    const double alpha = 0.1;
    const double t = 0.2;
    const std::vector<double> eps{1e-2, std::pow(10.0, -2.5), 1e-3, std::pow(10.0, -3.5)};
    MonteCarloOptions o;
    o.replicas = ctx.n(10000);
    o.seed = ctx.seed_for(5);
    o.step_over_epsilon = 0.05;
    const ModelParams base{1e-2, alpha, Variant::dissipative, 0.0, 2.0, t};
    std::vector<double> estimates;
    json per_eps = json::array();
    for (double e : eps) {
        ModelParams p = base;
        p.epsilon = e;
        const Lemma1Report r = lemma1_xsquare(p, t, o);
        estimates.push_back(r.x_square.estimate);
        per_eps.push_back({{"epsilon", e}, {"x_square", stat(r.x_square)}, {"exclusion_rate", r.exclusion_rate},
                           {"warning", r.warning}});
    }
    const ScalingFit fit = fit_scaling(eps, estimates);
    const double lo = 0.9 * (1.0 - alpha) - 0.15;
    const double hi = (1.0 - alpha) + 0.15;
    checks.add("log-log slope in window", fit.slope >= lo && fit.slope <= hi,
               {{"fit", to_json(fit)}, {"window", {lo, hi}}, {"per_epsilon", per_eps}});
    res.pass = checks.pass();
    res.summary = "slope " + fmt("%.4f", fit.slope) + " in [" + fmt("%.3f", lo) + ", " + fmt("%.3f", hi) + "]";
    res.checks = checks.take();
    return res;
}

CriterionResult exit_time_oracles(const Context& ctx) {
    CriterionResult res{6, "OU exit oracles and crossing bounds"};
    Checks checks;
    std::string summary;
    for (double delta : {0.01, 0.1}) {
        MonteCarloOptions o;
        o.seed = ctx.seed_for(6, delta < 0.05 ? 0 : 1);
        o.step = delta * delta / 100.0;
        o.replicas = ctx.n(100000);
        const double q2 = ou_exit_two_sided(delta);
        const StatReport m2 = ou_exit_two_sided_mc(delta, o);
        checks.add("two-sided exit, delta=" + fmt("%g", delta), std::abs(m2.estimate - q2) <= 3.0 * m2.std_error,
                   {{"quadrature", q2}, {"mc", stat(m2)}});
        // Heavy right tail: fewer replicas underestimate both mean and SE, so no quick scaling.
        o.replicas = 10000;
        const double q1 = ou_exit_one_sided(delta);
        const StatReport m1 = ou_exit_one_sided_mc(delta, o);
        checks.add("one-sided hitting, delta=" + fmt("%g", delta), std::abs(m1.estimate - q1) <= 3.0 * m1.std_error,
                   {{"quadrature", q1}, {"mc", stat(m1)}});
        summary += "d=" + fmt("%g", delta) + " z2=" + fmt("%+.2f", (m2.estimate - q2) / m2.std_error) +
                   " z1=" + fmt("%+.2f", (m1.estimate - q1) / m1.std_error) + "; ";
    }
    const double small = 1e-3;
    const double rel2 = ou_exit_two_sided(small) / (3.0 * small * small) - 1.0;
    const double rel1 = ou_exit_one_sided(small) / (std::sqrt(std::numbers::pi) * small) - 1.0;
    checks.add("two-sided ~ 3 delta^2 within 1% at 1e-3", std::abs(rel2) < 0.01, {{"relative_error", rel2}});
    checks.add("one-sided ~ sqrt(pi) delta within 1% at 1e-3", std::abs(rel1) < 0.01, {{"relative_error", rel1}});

    MonteCarloOptions o;
    o.seed = ctx.seed_for(6, 2);
    o.step = 1e-3;
    o.replicas = ctx.n(10000);
    const CrossingReport c = crossing_stats({1e-2, 0.1, Variant::dissipative, 0.0, 2.0, 5.0}, o);
    checks.add("mean N <= (4/3) T / E tau * 2", c.upcrossings.estimate <= c.bound_upcrossings,
               {{"estimate", c.upcrossings.estimate}, {"bound", c.bound_upcrossings}});
    checks.add("mean sigma - tau <= (4/3) E sigma * 2 + h", c.band_exit.estimate <= c.bound_band_exit,
               {{"estimate", c.band_exit.estimate}, {"bound", c.bound_band_exit}, {"n", c.band_exit.n_replicas}});
    checks.add("mean tau - sigma >= E tau / 2 - h", c.band_return.estimate >= c.bound_band_return,
               {{"estimate", c.band_return.estimate}, {"bound", c.bound_band_return}, {"n", c.band_return.n_replicas}});
    const CrossingReport far = crossing_stats({1e-2, 0.1, Variant::dissipative, 0.0, 5.0, 1.0}, o);
    checks.add("start (0,5), T=1: no crossing in >= 99% of replicas", far.fraction_no_crossing >= 0.99,
               {{"fraction", far.fraction_no_crossing}});
    res.pass = checks.pass();
    res.summary = summary + "N " + fmt("%.3f", c.upcrossings.estimate) + " <= " + fmt("%.2f", c.bound_upcrossings);
    res.checks = checks.take();
    return res;
}

CriterionResult averaging_limit(const Context& ctx) {
    CriterionResult res{7, "martingale residual and weak gaps"};
    Checks checks;
    const std::vector<double> ladder{0.1, 0.01, 0.001};
    MonteCarloOptions o;
    o.replicas = ctx.n(10000);
    o.seed = ctx.seed_for(7);
    const auto params = [](double eps) { return ModelParams{eps, 0.1, Variant::dissipative, 0.0, 2.0, 1.0}; };
    const auto options_for = [&](double eps) {
        MonteCarloOptions out = o;
        out.step = std::min(1e-3, eps / 10.0);
        return out;
    };
    std::size_t trend_ok = 0, trend_total = 0;

    for (const auto& f : {catalog::gaussian(), catalog::lorentzian()}) {
        std::vector<double> est;
        json runs = json::array();
        StatReport finest;
        for (double eps : ladder) {
            finest = martingale_residual(params(eps), f, options_for(eps));
            est.push_back(finest.estimate);
            runs.push_back(stat(finest));
        }
        const bool trend = strictly_decreasing_abs(est);
        trend_ok += trend;
        ++trend_total;
        checks.add("residual strictly decreasing, " + f.name, trend, {{"runs", runs}});
        checks.add("residual at eps=1e-3 <= 3 SE + 0.02, " + f.name,
                   std::abs(finest.estimate) <= 3.0 * finest.std_error + 0.02, {{"residual", stat(finest)}});
    }

    for (const auto& f : {catalog::gaussian(), catalog::lorentzian(), catalog::cos_square()}) {
        std::vector<double> coupled;
        json runs = json::array();
        WeakGapReport finest;
        for (double eps : ladder) {
            finest = weak_gap_b(params(eps), f, options_for(eps));
            coupled.push_back(finest.coupled.estimate);
            runs.push_back({{"epsilon", eps},
                            {"independent", stat(finest.independent)},
                            {"coupled", stat(finest.coupled)},
                            {"ks", finest.ks_statistic},
                            {"ks_critical", finest.ks_critical}});
        }
        const bool trend = strictly_decreasing_abs(coupled);
        trend_ok += trend;
        ++trend_total;
        checks.add("weak gap (b) strictly decreasing, " + f.name, trend, {{"runs", runs}});
        checks.add("weak gap (b) at eps=1e-3 <= 3 SE + 0.02, " + f.name,
                   std::abs(finest.independent.estimate) <= 3.0 * finest.independent.std_error + 0.02,
                   {{"gap", stat(finest.independent)}});
    }

    {
        const auto F = [](double x, double) { return std::min(std::abs(x), 1.0); };
        std::vector<double> est;
        json runs = json::array();
        StatReport finest;
        for (double eps : ladder) {
            finest = weak_gap_a(params(eps), F, options_for(eps));
            est.push_back(finest.estimate);
            runs.push_back(stat(finest));
        }
        const bool trend = strictly_decreasing_abs(est);
        trend_ok += trend;
        ++trend_total;
        checks.add("weak gap (a) strictly decreasing, F=min(|x|,1)", trend, {{"runs", runs}});
        checks.add("weak gap (a) at eps=1e-3 <= 3 SE + 0.02, F=min(|x|,1)",
                   std::abs(finest.estimate) <= 3.0 * finest.std_error + 0.02, {{"gap", stat(finest)}});
        const StatReport lin = weak_gap_a(params(1e-3), [](double x, double) { return x; }, options_for(1e-3));
        const double bound = 3.0 * lin.std_error + 2.0 * std::sqrt(5.0 * std::pow(1e-3, 0.9));
        checks.add("weak gap (a) at eps=1e-3, F=x", std::abs(lin.estimate) < bound,
                   {{"gap", stat(lin)}, {"bound", bound}});
    }

    MonteCarloOptions lo = o;
    lo.step = 1e-3;
    std::size_t control_ok = 0;
    for (const auto& f : catalog::all()) {
        const StatReport r = martingale_residual_limit(2.0, 1.0, f, lo, true);
        const bool ok = std::abs(r.estimate) <= 3.0 * r.std_error;
        control_ok += ok;
        checks.add("exact limit residual consistent with 0, " + f.name, ok, {{"residual", stat(r)}});
    }
    res.pass = checks.pass();
    res.summary = std::to_string(trend_ok) + "/" + std::to_string(trend_total) + " trends decreasing, " +
                  std::to_string(control_ok) + "/4 limit controls at 0, " + std::to_string(checks.failed()) +
                  " failed checks";
    res.checks = checks.take();
    return res;
}

CriterionResult metastability(const Context& ctx) {
    CriterionResult res{8, "metastable excursions"};
    Checks checks;
    MonteCarloOptions o;
    o.replicas = ctx.n(10000);
    o.seed = ctx.seed_for(8);
    std::vector<double> probs;
    json runs = json::array();
    for (double eps : {0.2, 0.1, 0.05}) {
        o.step = std::min(1e-3, eps / 10.0);
        const StatReport r = excursion_probability({eps, 0.1, Variant::dissipative, 0.0, 1.0, 5.0}, 0.5, 5.0, o);
        probs.push_back(r.estimate);
        runs.push_back(stat(r));
    }
    checks.add("p(0.5, 5; eps) strictly decreasing", strictly_decreasing(probs), {{"runs", runs}});

    MonteCarloOptions so = o;
    so.step = 1e-3;
    so.replicas = ctx.n(1000);
    const ModelParams p{0.2, 0.1, Variant::dissipative, 0.0, 1.0, 20.0};
    const ExcursionSurvey survey = excursion_survey(p, 0.25, 20.0, so);
    bool ordered = true;
    for (const auto& rec : survey.records) {
        ordered = ordered && rec.departure_time <= rec.entry_time;
        if (rec.returned()) ordered = ordered && rec.entry_time < rec.return_time;
    }
    checks.add("anatomy records produced at eps=0.2", !survey.records.empty() && ordered,
               {{"records", survey.records.size()},
                {"replicas_with_excursion", survey.replicas_with_excursion},
                {"median_max_abs_x", num(survey.median_max_abs_x)},
                {"median_jump_back", num(survey.median_jump_back)}});
    res.pass = checks.pass();
    res.summary = "p = " + fmt("%.4f", probs[0]) + " > " + fmt("%.4f", probs[1]) + " > " + fmt("%.4f", probs[2]) +
                  "; " + std::to_string(survey.records.size()) + " excursion records, median max|X| " +
                  fmt("%.3f", survey.median_max_abs_x);
    res.checks = checks.take();
    return res;
}

CriterionResult cauchy_problem(const Context& ctx) {
    CriterionResult res{9, "Cauchy problem"};
    Checks checks;
    const double t = 1.0;
    const PDESolution sol = solve_limit_pde(catalog::gaussian(), Grid1D::make(601, t), {t});
    const auto F = [](double, double y) { return std::exp(-y * y); };
    MonteCarloOptions o;
    o.replicas = ctx.n(10000);
    o.seed = ctx.seed_for(9);
    const ModelParams base{1e-3, 0.1, Variant::dissipative, 0.0, 2.0, t};
    const std::vector<State2> probes{{0.0, 1.0}, {0.0, 2.0}, {3.0, 4.0}, {1.0, 1.0}, {0.5, -1.0}};
    double worst_ratio = 0.0;
    CauchyReport at34;
    for (const State2& s : probes) {
        o.step = 1e-4;
        const CauchyReport r = cauchy_2d_mc(s.x(), s.y(), t, F, base, o, &sol);
        if (s == State2{3.0, 4.0}) at34 = r;
        const double diff = std::abs(r.mc.estimate - *r.pde);
        const double tol = 3.0 * r.mc.std_error + 0.02;
        worst_ratio = std::max(worst_ratio, diff / tol);
        checks.add("probe (" + fmt("%g", s.x()) + "," + fmt("%g", s.y()) + ")", diff <= tol,
                   {{"y_pi", r.y_pi}, {"mc", stat(r.mc)}, {"pde", *r.pde}, {"tolerance", tol}});
    }
    std::vector<double> gaps;
    json runs = json::array();
    for (double eps : {0.1, 0.01}) {
        ModelParams p = base;
        p.epsilon = eps;
        o.step = std::min(1e-3, eps / 10.0);
        const CauchyReport r = cauchy_2d_mc(3.0, 4.0, t, F, p, o);
        gaps.push_back(r.coupled.estimate);
        runs.push_back(stat(r.coupled));
    }
    gaps.push_back(at34.coupled.estimate);
    runs.push_back(stat(at34.coupled));
    checks.add("|u_eps - u| strictly decreasing at (3,4)", strictly_decreasing_abs(gaps), {{"runs", runs}});
    res.pass = checks.pass();
    res.summary = "worst |mc - pde| / tolerance " + fmt("%.3f", worst_ratio) + " over " +
                  std::to_string(probes.size()) + " probes";
    res.checks = checks.take();
    return res;
}

bool ulp_close(double a, double b, double scale, double ulps = 8.0) {
    const double eps = std::numeric_limits<double>::epsilon();
    return std::abs(a - b) <= ulps * eps * std::max({std::abs(a), std::abs(b), scale});
}

CriterionResult euler_arnold(const Context& ctx) {
    using namespace affine;
    CriterionResult res{10, "Euler-Arnold equivalence"};
    Checks checks;
    const RngStream u{ctx.seed_for(10), 0};
    std::uint64_t k = 0;
    const auto draw = [&](double lo, double hi) { return lo + (hi - lo) * u.uniform(k++); };

    std::size_t rhs_violations = 0;
    for (int i = 0; i < 1000; ++i) {
        const MomentumState<double> m{draw(-10, 10), draw(-10, 10)};
        const MomentumState<double> dm = euler_arnold_rhs(m);
        const State2 lhs{dm(1), -dm(0)};
        if (lhs != unperturbed_rhs(to_xy(m))) ++rhs_violations;
    }
    checks.add("euler_arnold_rhs == unperturbed_rhs under (x,y) = (M2,-M1)", rhs_violations == 0,
               {{"points", 1000}, {"violations", rhs_violations}});

    std::size_t violations = 0;
    for (int i = 0; i < 1000; ++i) {
        const GroupElement<double> g{draw(0.1, 5), draw(-5, 5)}, h{draw(0.1, 5), draw(-5, 5)};
        const AlgebraElement<double> xi{draw(-5, 5), draw(-5, 5)}, eta{draw(-5, 5), draw(-5, 5)},
            zeta{draw(-5, 5), draw(-5, 5)};
        const AlgebraElement<double> xi_d{xi.xi1, xi.xi2, true}, zeta_d{zeta.xi1, zeta.xi2, true};
        const double big = 25.0 * 25.0;

        const auto gh = multiply(g, h);
        const auto gh_m = multiply_matrix(g, h);
        if (!ulp_close(gh.a, gh_m.a, big) || !ulp_close(gh.b, gh_m.b, big)) ++violations;
        const auto e = multiply(g, inverse(g));
        if (!ulp_close(e.a, 1.0, 1.0) || !ulp_close(e.b, 0.0, std::abs(g.b) + 1.0)) ++violations;

        const auto ad1 = ad(g, eta), ad2 = ad_matrix(g, eta);
        if (!ulp_close(ad1.xi1, ad2.xi1, big) || !ulp_close(ad1.xi2, ad2.xi2, big)) ++violations;
        const auto comp1 = ad(gh, eta), comp2 = ad(g, ad(h, eta));
        if (!ulp_close(comp1.xi1, comp2.xi1, big * 25) || !ulp_close(comp1.xi2, comp2.xi2, big * 25)) ++violations;

        const double p1 = pairing(coad(g, xi_d), eta), p2 = pairing(xi_d, ad(g, eta));
        if (!ulp_close(p1, p2, big * 5)) ++violations;

        const auto br1 = bracket(xi, eta), br2 = bracket_matrix(xi, eta);
        if (!ulp_close(br1.xi1, br2.xi1, big) || !ulp_close(br1.xi2, br2.xi2, big)) ++violations;
        const auto anti = bracket(eta, xi);
        if (br1.xi2 != -anti.xi2 || br1.xi1 != 0.0) ++violations;
        const auto self = bracket(xi, xi);
        if (self.xi1 != 0.0 || self.xi2 != 0.0) ++violations;
        const auto j1 = bracket(xi, bracket(eta, zeta)), j2 = bracket(eta, bracket(zeta, xi)),
                   j3 = bracket(zeta, bracket(xi, eta));
        if (!ulp_close(j1.xi2 + j2.xi2 + j3.xi2, 0.0, 3 * big * 5)) ++violations;

        const double c1 = pairing(coadjoint_bracket(xi, zeta_d), eta), c2 = pairing(zeta_d, bracket(xi, eta));
        if (!ulp_close(c1, c2, big * 5)) ++violations;
    }
    checks.add("group and algebra identities within 8 ulp", violations == 0,
               {{"triples", 1000}, {"violations", violations}});

    const auto prod = multiply(GroupElement<double>{2, 1}, GroupElement<double>{3, 4});
    checks.add("g(2,1) g(3,4) == g(6,9)", prod == GroupElement<double>{6, 9});
    const auto inv = inverse(GroupElement<double>{2, 1});
    checks.add("inverse g(2,1) == g(1/2,-1/2)", inv == GroupElement<double>{0.5, -0.5});
    const auto cb = coadjoint_bracket(AlgebraElement<double>{1, 2}, AlgebraElement<double>{3, 4, true});
    checks.add("{(1,2),(3,4)} == (-8,4)", cb.xi1 == -8.0 && cb.xi2 == 4.0);
    const auto e12 = bracket(AlgebraElement<double>{1, 0}, AlgebraElement<double>{0, 1});
    checks.add("[e1,e2] == (0,1)", e12.xi1 == 0.0 && e12.xi2 == 1.0);

    res.pass = checks.pass();
    res.summary = std::to_string(rhs_violations + violations) + " identity violations";
    res.checks = checks.take();
    return res;
}

using CriterionFn = CriterionResult (*)(const Context&);

constexpr CriterionFn kCriteria[] = {projection_oracle, radial_identity, stationary_law,     moment_closed_form,
                                     lemma1_scaling_check, exit_time_oracles, averaging_limit, metastability,
                                     cauchy_problem,      euler_arnold};

json criterion_json(const CriterionResult& r) {
    return {{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"summary", r.summary}, {"checks", r.checks}};
}

std::vector<CriterionResult> run_criteria(const Context& ctx,
                                          const std::function<void(const CriterionResult&)>& on_result) {
    std::vector<CriterionResult> out;
    for (CriterionFn fn : kCriteria) {
        const auto start = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = fn(ctx);
        } catch (const std::exception& e) {
            r.id = static_cast<int>(out.size()) + 1;
            r.name = "criterion " + std::to_string(r.id);
            r.pass = false;
            r.summary = std::string("error: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (on_result) on_result(r);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

CriterionResult run_criterion(int id, const AcceptanceOptions& options) {
    if (id < 1 || id > static_cast<int>(std::size(kCriteria)))
        throw std::out_of_range("run_criterion: id must be in 1.." + std::to_string(std::size(kCriteria)));
    const Context ctx{options.seed, options.quick};
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r = kCriteria[id - 1](ctx);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

bool AcceptanceReport::pass() const {
    return !results.empty() && std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
}

json AcceptanceReport::to_json(const AcceptanceOptions& options) const {
    json criteria = json::array();
    for (const auto& r : results) criteria.push_back(criterion_json(r));
    return {{"operation", "acceptance"},
            {"seed", options.seed},
            {"quick", options.quick},
            {"pass", pass()},
            {"criteria", criteria}};
}

AcceptanceReport run_acceptance(const AcceptanceOptions& options,
                                const std::function<void(const CriterionResult&)>& on_result) {
    const Context ctx{options.seed, options.quick};
    AcceptanceReport report;
    report.results = run_criteria(ctx, on_result);
    if (!options.verify_determinism) return report;

    const auto start = std::chrono::steady_clock::now();
    json first = json::array();
    for (const auto& r : report.results) first.push_back(criterion_json(r));
    const unsigned workers = worker_count() == 1 ? 3 : 1;
    std::vector<CriterionResult> again;
    {
        const ScopedWorkers pin(workers);
        again = run_criteria(ctx, {});
    }
    json second = json::array();
    for (const auto& r : again) second.push_back(criterion_json(r));
    const bool same = first.dump() == second.dump();

    CriterionResult det{11, "determinism"};
    det.pass = same;
    det.summary = std::string(same ? "rerun byte-identical" : "rerun differs") + " (" + std::to_string(workers) +
                  " worker" + (workers == 1 ? "" : "s") + " on the rerun)";
    det.checks = json::array({{{"check", "criteria 1-10 JSON identical on rerun"},
                               {"pass", same},
                               {"bytes", first.dump().size()},
                               {"rerun_workers", workers}}});
    det.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_result) on_result(det);
    report.results.push_back(std::move(det));
    return report;
}

std::string format_result_line(const CriterionResult& r) {
    char head[96];
    std::snprintf(head, sizeof head, "criterion %2d %s  %-38s", r.id, r.pass ? "PASS" : "FAIL", r.name.c_str());
    char tail[32];
    std::snprintf(tail, sizeof tail, "  [%.1fs]", r.seconds);
    return std::string(head) + r.summary + tail;
}

}  // namespace ablab
