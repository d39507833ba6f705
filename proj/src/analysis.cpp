#include "ablab/analysis.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ablab/parallel.hpp"

namespace ablab {

namespace {

constexpr std::uint64_t kLimitSalt = 0x9E3779B97F4A7C15ULL;

TimeGrid grid_for(const ModelParams& p, const MonteCarloOptions& o, double horizon) {
    return TimeGrid(horizon, o.step_for(p.epsilon));
}

StatReport summarize_or_throw(const std::vector<double>& samples, const ConfigEcho& config, const char* what) {
    if (samples.size() < 2) throw std::runtime_error(std::string(what) + ": fewer than two usable replicas");
    return summarize(samples, config);
}

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

}  // namespace

ConfigEcho echo(const ModelParams& p, const MonteCarloOptions& o) {
    return {p.epsilon, p.alpha, p.horizon, o.step_for(p.epsilon), o.seed};
}

// ---------------------------------------------------------------------------

StoppingTimeDetector::StoppingTimeDetector(double delta, double horizon) : horizon_(horizon) {
    if (!(delta > 0.0)) throw std::invalid_argument("StoppingTimeDetector: delta must be > 0");
    record_.delta = delta;
}

void StoppingTimeDetector::observe(std::size_t k, double t, double y) {
    if (t > horizon_) return;
    const double level = std::abs(y);
    if (!waiting_for_sigma_) {
        if (level <= record_.delta) {
            record_.taus.push_back(t);
            record_.tau_index.push_back(k);
            waiting_for_sigma_ = true;
        }
    } else if (level >= 2.0 * record_.delta) {
        record_.sigmas.push_back(t);
        record_.sigma_index.push_back(k);
        ++record_.n_upcrossings;
        waiting_for_sigma_ = false;
    }
}

StoppingRecord detect_stopping_times(const PathSample& path, double delta, double horizon) {
    StoppingTimeDetector detector(delta, horizon);
    for (std::size_t k = 0; k < path.size(); ++k) {
        const double y = path.y(k);
        if (!std::isfinite(y)) break;
        detector.observe(k, path.t(k), y);
    }
    return detector.record();
}

// ---------------------------------------------------------------------------

Lemma1Report lemma1_xsquare(const ModelParams& p, double t, const MonteCarloOptions& options) {
    p.validate();
    const double t0 = std::pow(p.epsilon, (1.0 - p.alpha) / 2.0);
    if (t < t0) throw std::invalid_argument("lemma1_xsquare: t must be >= eps^((1-alpha)/2)");
    const double delta = p.delta();
    const TimeGrid grid = grid_for(p, options, t);

    std::vector<double> values(options.replicas, std::nan(""));
    parallel_for(options.replicas, [&](std::size_t r) {
        bool kept = true;
        double x_t = 0.0;
        const bool diverged = simulate_rescaled(
            p, grid, replica_streams(options.seed, r),
            [&](std::size_t k, const State2& s, double) {
                if (s.y() < delta) {
                    kept = false;
                    return false;
                }
                if (k == grid.n_steps()) x_t = s.x();
                return true;
            },
            options.scheme);
        if (kept && !diverged) values[r] = x_t * x_t;
    });

    std::vector<double> kept;
    kept.reserve(values.size());
    for (double v : values)
        if (!std::isnan(v)) kept.push_back(v);
    Lemma1Report report;
    report.t0 = t0;
    report.exclusion_rate = 1.0 - static_cast<double>(kept.size()) / static_cast<double>(options.replicas);
    report.warning = report.exclusion_rate > 0.10;
    ModelParams echoed = p;
    echoed.horizon = t;
    report.x_square = summarize_or_throw(kept, echo(echoed, options), "lemma1_xsquare");
    return report;
}

std::vector<ScalingFit> lemma1_scaling(std::span<const double> alphas, std::span<const double> epsilons,
                                       const ModelParams& base, double t, const MonteCarloOptions& options) {
    std::vector<ScalingFit> fits;
    for (double alpha : alphas) {
        std::vector<double> estimates;
        for (double eps : epsilons) {
            ModelParams p = base;
            p.epsilon = eps;
            p.alpha = alpha;
            estimates.push_back(lemma1_xsquare(p, t, options).x_square.estimate);
        }
        fits.push_back(fit_scaling({epsilons.begin(), epsilons.end()}, std::move(estimates)));
    }
    return fits;
}

// ---------------------------------------------------------------------------

StatReport martingale_residual(const ModelParams& p, const TestFunction& f, const MonteCarloOptions& options,
                               bool control_variate) {
    p.validate();
    const TimeGrid grid = grid_for(p, options, p.horizon);
    const double h = grid.step();
    const double f_start = f(project_pi(p.start()));

    std::vector<double> samples(options.replicas);
    std::vector<char> diverged(options.replicas, 0);
    parallel_for(options.replicas, [&](std::size_t r) {
        double integral = 0.0;
        double martingale = 0.0;
        double previous_af = 0.0;
        double y_final = 0.0;
        diverged[r] = simulate_rescaled(
            p, grid, replica_streams(options.seed, r),
            [&](std::size_t k, const State2& s, double dwy) {
                const double af = generator_apply(f, s.y());
                if (k > 0) integral += 0.5 * h * (previous_af + af);
                previous_af = af;
                if (control_variate) martingale += f.d1(s.y()) * dwy;
                y_final = s.y();
            },
            options.scheme);
        samples[r] = f(y_final) - f_start - integral - martingale;
    });
    if (std::find(diverged.begin(), diverged.end(), 1) != diverged.end())
        throw DivergenceError("martingale_residual: a replica diverged; reduce the step");
    return summarize(samples, echo(p, options));
}

StatReport martingale_residual_limit(double y0, double horizon, const TestFunction& f,
                                     const MonteCarloOptions& options, bool control_variate) {
    const LimitParams lp{y0, LimitVariant::damped, horizon};
    lp.validate();
    const TimeGrid grid(horizon, options.step);
    const double h = grid.step();
    const double decay = std::exp(-h);

    std::vector<double> samples(options.replicas);
    parallel_for(options.replicas, [&](std::size_t r) {
        double integral = 0.0;
        double martingale = 0.0;
        double previous_af = 0.0;
        State2 previous{0.0, y0};
        double radius = y0;
        simulate_limit_exact(lp, grid, replica_streams(options.seed ^ kLimitSalt, r),
                             [&](std::size_t k, const State2& z) {
                                 radius = z.norm();
                                 const double af = generator_apply(f, radius);
                                 if (k > 0) {
                                     integral += 0.5 * h * (previous_af + af);
                                     if (control_variate) {
                                         const State2 dw = z - decay * previous;
                                         const double r_prev = previous.norm();
                                         martingale += f.d1(r_prev) * previous.dot(dw) / r_prev;
                                     }
                                 }
                                 previous_af = af;
                                 previous = z;
                             });
        samples[r] = f(radius) - f(y0) - integral - martingale;
    });
    return summarize(samples, {0.0, 0.0, horizon, h, options.seed});
}

WindowReport window_residual(const ModelParams& p, const TestFunction& f, const MonteCarloOptions& options) {
    p.validate();
    const TimeGrid grid = grid_for(p, options, p.horizon);
    const double h = grid.step();
    const double delta = p.delta();

    std::vector<double> residuals(options.replicas);
    std::vector<double> drifts(options.replicas);
    std::vector<double> windows(options.replicas);
    parallel_for(options.replicas, [&](std::size_t r) {
        StoppingTimeDetector detector(delta, p.horizon);
        bool open = true;
        double y_open = p.y0;
        double integral = 0.0;
        double drift_gap = 0.0;
        double residual = 0.0;
        double drift_total = 0.0;
        std::size_t closed = 0;
        simulate_rescaled(
            p, grid, replica_streams(options.seed, r),
            [&](std::size_t k, const State2& s, double) {
                const std::size_t taus_before = detector.record().taus.size();
                const std::size_t sigmas_before = detector.record().sigmas.size();
                detector.observe(k, grid.time(k), s.y());
                if (open && detector.record().taus.size() > taus_before) {
                    residual += f(s.y()) - f(y_open) - integral;
                    drift_total += drift_gap;
                    ++closed;
                    open = false;
                } else if (!open && detector.record().sigmas.size() > sigmas_before) {
                    open = true;
                    y_open = s.y();
                    integral = 0.0;
                    drift_gap = 0.0;
                }
                if (open) {
                    // Left-point rule: the closing point may sit arbitrarily close to y = 0.
                    integral += h * generator_apply(f, s.y());
                    const double limit_drift_term = s.y() > 0.0 ? 0.5 / s.y() : 0.0;
                    drift_gap += h * (s.x() * s.x() / p.epsilon - limit_drift_term);
                }
            },
            options.scheme);
        residuals[r] = residual;
        drifts[r] = drift_total;
        windows[r] = static_cast<double>(closed);
    });
    WindowReport report;
    report.residual = summarize(residuals, echo(p, options));
    report.drift_replacement = summarize(drifts, echo(p, options));
    report.mean_windows = summarize(windows).estimate;
    return report;
}

StatReport weak_gap_a(const ModelParams& p, const std::function<double(double, double)>& F,
                      const MonteCarloOptions& options) {
    p.validate();
    const TimeGrid grid = grid_for(p, options, p.horizon);
    std::vector<double> samples(options.replicas);
    parallel_for(options.replicas, [&](std::size_t r) {
        State2 final{0.0, 0.0};
        simulate_rescaled(
            p, grid, replica_streams(options.seed, r), [&](std::size_t, const State2& s, double) { final = s; },
            options.scheme);
        samples[r] = F(final.x(), final.y()) - F(0.0, final.y());
    });
    return summarize(samples, echo(p, options));
}

WeakGapReport weak_gap_b(const ModelParams& p, const TestFunction& f, const MonteCarloOptions& options) {
    p.validate();
    const TimeGrid grid = grid_for(p, options, p.horizon);
    const double y_pi = project_pi(p.start());
    if (!(y_pi > 0.0)) throw std::invalid_argument("weak_gap_b: start must differ from the origin");

    std::vector<double> y_eps(options.replicas);
    std::vector<double> y_limit(options.replicas);
    std::vector<double> paired(options.replicas);
    std::vector<double> f_eps(options.replicas);
    std::vector<double> f_limit(options.replicas);
    parallel_for(options.replicas, [&](std::size_t r) {
        State2 final{0.0, 0.0};
        simulate_rescaled(
            p, grid, replica_streams(options.seed, r), [&](std::size_t, const State2& s, double) { final = s; },
            options.scheme);
        y_eps[r] = final.y();
        f_eps[r] = f(final.y());
        paired[r] = f(final.y()) - f(final.norm());
        y_limit[r] = sample_limit_terminal(y_pi, p.horizon, replica_streams(options.seed ^ kLimitSalt, r));
        f_limit[r] = f(y_limit[r]);
    });
    WeakGapReport report;
    report.limit_y0 = y_pi;
    report.independent = difference(summarize(f_eps, echo(p, options)), summarize(f_limit, echo(p, options)));
    report.coupled = summarize(paired, echo(p, options));
    report.ks_statistic = ks_two_sample(y_eps, y_limit);
    report.ks_critical = ks_critical_two_sample(y_eps.size(), y_limit.size());
    return report;
}

// ---------------------------------------------------------------------------

namespace {

double integrate(const std::function<double(double)>& g, double a, double b) {
    double error = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, a, b, 15, 1e-10, &error);
    if (!(error <= 1e-9 * std::max(1e-300, std::abs(value)))) throw std::runtime_error("quadrature did not converge");
    return value;
}

void check_delta(double delta, const char* what) {
    if (!(delta > 0.0) || delta > 5.0)
        throw std::domain_error(std::string(what) + ": delta must lie in (0, 5]");
}

}  // namespace

double ou_exit_two_sided(double delta) {
    check_delta(delta, "ou_exit_two_sided");
    const double lo = -2.0 * delta;
    const double erf_lo = std::erf(2.0 * delta);
    // G(z) = int_{-2 delta}^z exp(-u^2) du
    const auto weighted = [&](double z) {
        return std::exp(z * z) * 0.5 * std::sqrt(std::numbers::pi) * (std::erf(z) + erf_lo);
    };
    const auto scale = [](double z) { return std::exp(z * z); };
    const double i1 = integrate(weighted, lo, delta);
    const double i2 = integrate(scale, lo, delta);
    const double j1 = integrate(weighted, lo, 2.0 * delta);
    const double j2 = integrate(scale, lo, 2.0 * delta);
    return -2.0 * i1 + 2.0 * i2 * j1 / j2;
}

double ou_exit_one_sided(double delta) {
    check_delta(delta, "ou_exit_one_sided");
    // int_z^inf exp(-u^2) du = sqrt(pi)/2 erfc(z)
    const auto integrand = [](double z) { return std::exp(z * z) * 0.5 * std::sqrt(std::numbers::pi) * std::erfc(z); };
    return 2.0 * integrate(integrand, delta, 2.0 * delta);
}

namespace {

/// First passage of the exact OU chain out of (lower, upper), with the
/// Brownian-bridge probability of an unobserved crossing inside each step.
double ou_first_exit(double start, double lower, double upper, double h, const std::array<RngStream, 2>& streams,
                     double max_time) {
    const double decay = std::exp(-h);
    const double sd = ou_step_stddev(1.0, h);
    const double var = sd * sd;
    NormalSequence noise(streams[0]);
    double y = start;
    const auto max_steps = static_cast<std::uint64_t>(std::ceil(max_time / h));
    for (std::uint64_t k = 0; k < max_steps; ++k) {
        const double next = y * decay + sd * noise.next();
        // The crossing happened somewhere inside (t_k, t_{k+1}); report the midpoint.
        const double t = (static_cast<double>(k) + 0.5) * h;
        if (next <= lower || next >= upper) return t;
        double survive = 1.0;
        if (std::isfinite(upper)) survive *= 1.0 - std::exp(-2.0 * (upper - y) * (upper - next) / var);
        if (std::isfinite(lower)) survive *= 1.0 - std::exp(-2.0 * (y - lower) * (next - lower) / var);
        if (streams[1].uniform(k) > survive) return t;
        y = next;
    }
    return max_time;
}

}  // namespace

StatReport ou_exit_two_sided_mc(double delta, const MonteCarloOptions& options) {
    check_delta(delta, "ou_exit_two_sided_mc");
    std::vector<double> samples(options.replicas);
    parallel_for(options.replicas, [&](std::size_t r) {
        samples[r] = ou_first_exit(delta, -2.0 * delta, 2.0 * delta, options.step,
                                   replica_streams(options.seed, r), 1e3);
    });
    return summarize(samples, {0.0, 0.0, 0.0, options.step, options.seed});
}

StatReport ou_exit_one_sided_mc(double delta, const MonteCarloOptions& options) {
    check_delta(delta, "ou_exit_one_sided_mc");
    std::vector<double> samples(options.replicas);
    parallel_for(options.replicas, [&](std::size_t r) {
        samples[r] = ou_first_exit(2.0 * delta, delta, std::numeric_limits<double>::infinity(), options.step,
                                   replica_streams(options.seed, r), 1e3);
    });
    return summarize(samples, {0.0, 0.0, 0.0, options.step, options.seed});
}

CrossingReport crossing_stats(const ModelParams& p, const MonteCarloOptions& options) {
    p.validate();
    const TimeGrid grid = grid_for(p, options, p.horizon);
    const double delta = p.delta();

    std::vector<StoppingRecord> records(options.replicas);
    parallel_for(options.replicas, [&](std::size_t r) {
        StoppingTimeDetector detector(delta, p.horizon);
        const bool diverged = simulate_rescaled(
            p, grid, replica_streams(options.seed, r),
            [&](std::size_t k, const State2& s, double) { detector.observe(k, grid.time(k), s.y()); },
            options.scheme);
        if (diverged) throw DivergenceError("crossing_stats: a replica diverged; reduce the step");
        records[r] = detector.record();
    });

    std::vector<double> counts, exits, returns;
    std::size_t no_crossing = 0;
    for (const auto& rec : records) {
        counts.push_back(static_cast<double>(rec.n_upcrossings));
        if (rec.n_upcrossings == 0) ++no_crossing;
        for (std::size_t k = 0; k < rec.sigmas.size(); ++k) exits.push_back(rec.sigmas[k] - rec.taus[k]);
        for (std::size_t k = 0; k + 1 < rec.taus.size() && k < rec.sigmas.size(); ++k)
            returns.push_back(rec.taus[k + 1] - rec.sigmas[k]);
    }
    // Pooled interval samples may be empty or singletons in crossing-free regimes.
    const auto pooled = [&](std::vector<double>& v) {
        if (v.size() >= 2) return summarize(v, echo(p, options));
        StatReport empty;
        empty.n_replicas = v.size();
        empty.estimate = v.empty() ? 0.0 : v.front();
        empty.config = echo(p, options);
        return empty;
    };

    CrossingReport report;
    report.delta = delta;
    report.upcrossings = summarize(counts, echo(p, options));
    report.band_exit = pooled(exits);
    report.band_return = pooled(returns);
    report.fraction_no_crossing = static_cast<double>(no_crossing) / static_cast<double>(records.size());
    const double one_sided = ou_exit_one_sided(delta);
    report.bound_upcrossings = (4.0 / 3.0) * p.horizon / one_sided * 2.0;
    report.bound_band_exit = (4.0 / 3.0) * ou_exit_two_sided(delta) * 2.0 + grid.step();
    report.bound_band_return = one_sided / 2.0 - grid.step();
    return report;
}

// ---------------------------------------------------------------------------

StatReport excursion_probability(const ModelParams& p, double a, double t, const MonteCarloOptions& options) {
    p.validate();
    if (!(a > 0.0)) throw std::invalid_argument("excursion_probability: a must be > 0");
    const TimeGrid grid = grid_for(p, options, t);
    std::vector<double> hits(options.replicas);
    parallel_for(options.replicas, [&](std::size_t r) {
        bool hit = false;
        simulate_rescaled(
            p, grid, replica_streams(options.seed, r),
            [&](std::size_t, const State2& s, double) {
                hit = s.y() <= -a;
                return !hit;
            },
            options.scheme);
        hits[r] = hit ? 1.0 : 0.0;
    });
    ModelParams echoed = p;
    echoed.horizon = t;
    return summarize(hits, echo(echoed, options));
}

ExcursionTracker::ExcursionTracker(double a, double delta) : a_(a), delta_(delta) {
    if (!(a > 0.0) || !(delta > 0.0)) throw std::invalid_argument("ExcursionTracker: a and delta must be > 0");
}

void ExcursionTracker::observe(std::size_t k, double t, double x, double y) {
    if (inside_) {
        if (y >= a_) {
            records_.back().return_index = k;
            records_.back().return_time = t;
            inside_ = false;
            last_on_axis_ = k;
            last_on_axis_time_ = t;
            max_abs_x_ = std::abs(x);
        }
        return;
    }
    if (y >= delta_) {
        last_on_axis_ = k;
        last_on_axis_time_ = t;
        max_abs_x_ = std::abs(x);
        return;
    }
    max_abs_x_ = std::max(max_abs_x_, std::abs(x));
    if (y <= -a_) {
        ExcursionRecord rec;
        rec.departure_index = last_on_axis_;
        rec.departure_time = last_on_axis_time_;
        rec.entry_index = k;
        rec.entry_time = t;
        rec.max_abs_x = max_abs_x_;
        records_.push_back(rec);
        inside_ = true;
    }
}

std::vector<ExcursionRecord> excursion_anatomy(const PathSample& path, double a, double delta) {
    if (path.dim() != 2) throw std::invalid_argument("excursion_anatomy: path must be 2-D");
    ExcursionTracker tracker(a, delta);
    for (std::size_t k = 0; k < path.size(); ++k) {
        const double x = path.states(static_cast<Eigen::Index>(k), 0);
        const double y = path.states(static_cast<Eigen::Index>(k), 1);
        if (!std::isfinite(x) || !std::isfinite(y)) break;
        tracker.observe(k, path.t(k), x, y);
    }
    return tracker.records();
}

ExcursionSurvey excursion_survey(const ModelParams& p, double a, double t, const MonteCarloOptions& options) {
    p.validate();
    const TimeGrid grid = grid_for(p, options, t);
    std::vector<std::vector<ExcursionRecord>> per_replica(options.replicas);
    parallel_for(options.replicas, [&](std::size_t r) {
        ExcursionTracker tracker(a, p.delta());
        simulate_rescaled(
            p, grid, replica_streams(options.seed, r),
            [&](std::size_t k, const State2& s, double) { tracker.observe(k, grid.time(k), s.x(), s.y()); },
            options.scheme);
        per_replica[r] = tracker.records();
    });
    ExcursionSurvey survey;
    std::vector<double> max_x, jump_back;
    for (const auto& recs : per_replica) {
        if (!recs.empty()) ++survey.replicas_with_excursion;
        for (const auto& rec : recs) {
            survey.records.push_back(rec);
            max_x.push_back(rec.max_abs_x);
            if (rec.returned()) jump_back.push_back(rec.jump_back_duration());
        }
    }
    survey.median_max_abs_x = median(max_x);
    survey.median_jump_back = median(jump_back);
    return survey;
}

}  // namespace ablab
