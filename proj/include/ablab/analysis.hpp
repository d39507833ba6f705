#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "ablab/limit.hpp"
#include "ablab/model.hpp"
#include "ablab/sde.hpp"
#include "ablab/stats.hpp"

namespace ablab {

struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MonteCarloOptions {
    std::size_t replicas = 10000;
    std::uint64_t seed = 42;
    /// Absolute step; ignored when step_over_epsilon > 0.
    double step = 1e-3;
    /// If > 0 the step is epsilon * step_over_epsilon.
    double step_over_epsilon = 0.0;
    Scheme scheme = Scheme::exact_splitting;

    [[nodiscard]] double step_for(double epsilon) const noexcept {
        return step_over_epsilon > 0.0 ? epsilon * step_over_epsilon : step;
    }
};

[[nodiscard]] ConfigEcho echo(const ModelParams& p, const MonteCarloOptions& o);

// ---------------------------------------------------------------------------
// Up-crossings of the band |Y| <= delta -> |Y| >= 2 delta

struct StoppingRecord {
    std::vector<double> taus;
    std::vector<double> sigmas;
    std::vector<std::size_t> tau_index;
    std::vector<std::size_t> sigma_index;
    std::size_t n_upcrossings = 0;
    double delta = 0.0;
};

/// Discrete reading: tau_k is the first grid time >= sigma_{k-1} with |Y| <= delta,
/// sigma_k the first grid time >= tau_k with |Y| >= 2 delta; sigma_0 = 0.
class StoppingTimeDetector {
public:
    StoppingTimeDetector(double delta, double horizon);
    void observe(std::size_t k, double t, double y);
    [[nodiscard]] const StoppingRecord& record() const noexcept { return record_; }
    [[nodiscard]] bool inside_band() const noexcept { return waiting_for_sigma_; }

private:
    StoppingRecord record_;
    double horizon_;
    bool waiting_for_sigma_ = false;
};

[[nodiscard]] StoppingRecord detect_stopping_times(const PathSample& path, double delta, double horizon);

// ---------------------------------------------------------------------------
// Moment, residual and weak-gap estimators

struct Lemma1Report {
    StatReport x_square;
    double exclusion_rate = 0.0;
    double t0 = 0.0;
    bool warning = false;  ///< exclusion rate above 10%
};

/// E[X_t^2] over replicas whose Y stays >= delta on [0, t] (others excluded and counted).
/// Throws std::invalid_argument if t < eps^((1-alpha)/2).
[[nodiscard]] Lemma1Report lemma1_xsquare(const ModelParams& p, double t, const MonteCarloOptions& options);

/// One scaling fit of log E[X_t^2] vs log eps per alpha.
[[nodiscard]] std::vector<ScalingFit> lemma1_scaling(std::span<const double> alphas, std::span<const double> epsilons,
                                                     const ModelParams& base, double t,
                                                     const MonteCarloOptions& options);

/// E[f(Y_T) - f(y^pi(x0, y0)) - int_0^T Af(Y_t) dt] over the rescaled system
/// (trapezoid rule in time). With control_variate the zero-mean discrete
/// martingale sum_k f'(Y_k) dW2_k is subtracted pathwise.
[[nodiscard]] StatReport martingale_residual(const ModelParams& p, const TestFunction& f,
                                             const MonteCarloOptions& options, bool control_variate = true);

/// Same functional for the exact limit sampler started at y0 (control case).
[[nodiscard]] StatReport martingale_residual_limit(double y0, double horizon, const TestFunction& f,
                                                   const MonteCarloOptions& options, bool control_variate = false);

struct WindowReport {
    StatReport residual;           ///< sum over windows of f(Y_tau) - f(Y_sigma) - int Af
    StatReport drift_replacement;  ///< sum over windows of int (X^2/eps - 1/(2Y)) dt
    double mean_windows = 0.0;
};

/// Residual restricted to the windows [sigma_{k-1}, tau_k] with delta = eps^alpha.
[[nodiscard]] WindowReport window_residual(const ModelParams& p, const TestFunction& f,
                                           const MonteCarloOptions& options);

/// E[F(X_T, Y_T) - F(0, Y_T)], paired per replica.
[[nodiscard]] StatReport weak_gap_a(const ModelParams& p, const std::function<double(double, double)>& F,
                                    const MonteCarloOptions& options);

struct WeakGapReport {
    /// mean f(Y_T^eps) - mean f(Y_T) with Y from the exact limit sampler (independent seeds).
    StatReport independent;
    /// Paired f(Y_T^eps) - f(r_T^eps), r = |(X, Y)|; r_T has the limit law exactly.
    StatReport coupled;
    double ks_statistic = 0.0;
    double ks_critical = 0.0;
    double limit_y0 = 0.0;
};

[[nodiscard]] WeakGapReport weak_gap_b(const ModelParams& p, const TestFunction& f, const MonteCarloOptions& options);

// ---------------------------------------------------------------------------
// OU exit-time oracles for dY = -Y dt + dW

/// Expected exit time from (-2 delta, 2 delta) started at delta (quadrature).
[[nodiscard]] double ou_exit_two_sided(double delta);
/// Expected hitting time of delta started at 2 delta (quadrature).
[[nodiscard]] double ou_exit_one_sided(double delta);

/// Monte Carlo counterparts: exact OU steps with Brownian-bridge crossing checks.
[[nodiscard]] StatReport ou_exit_two_sided_mc(double delta, const MonteCarloOptions& options);
[[nodiscard]] StatReport ou_exit_one_sided_mc(double delta, const MonteCarloOptions& options);

struct CrossingReport {
    StatReport upcrossings;      ///< N per replica
    StatReport band_exit;        ///< sigma_k - tau_k, pooled
    StatReport band_return;      ///< tau_{k+1} - sigma_k, pooled (right-censored at T)
    double fraction_no_crossing = 0.0;
    double delta = 0.0;
    double bound_upcrossings = 0.0;  ///< (4/3) T / E tau_one_sided * 2
    double bound_band_exit = 0.0;    ///< (4/3) E sigma_two_sided * 2 + h
    double bound_band_return = 0.0;  ///< E tau_one_sided / 2 - h (lower)
    [[nodiscard]] bool upper_bounds_hold() const noexcept {
        return upcrossings.estimate <= bound_upcrossings && band_exit.estimate <= bound_band_exit;
    }
};

[[nodiscard]] CrossingReport crossing_stats(const ModelParams& p, const MonteCarloOptions& options);

// ---------------------------------------------------------------------------
// Metastable excursions below Y = -a

/// Fraction of replicas whose grid path reaches Y <= -a by time t.
[[nodiscard]] StatReport excursion_probability(const ModelParams& p, double a, double t,
                                               const MonteCarloOptions& options);

struct ExcursionRecord {
    std::size_t departure_index = 0;  ///< last index before entry with Y >= delta
    std::size_t entry_index = 0;      ///< first index with Y <= -a
    std::size_t return_index = std::numeric_limits<std::size_t>::max();  ///< first later index with Y >= a
    double departure_time = 0.0;
    double entry_time = 0.0;
    double return_time = std::numeric_limits<double>::quiet_NaN();
    double max_abs_x = 0.0;  ///< over [departure, entry]
    [[nodiscard]] bool returned() const noexcept { return return_index != std::numeric_limits<std::size_t>::max(); }
    [[nodiscard]] double jump_back_duration() const noexcept { return return_time - entry_time; }
};

class ExcursionTracker {
public:
    ExcursionTracker(double a, double delta);
    void observe(std::size_t k, double t, double x, double y);
    [[nodiscard]] const std::vector<ExcursionRecord>& records() const noexcept { return records_; }

private:
    double a_;
    double delta_;
    bool inside_ = false;
    std::size_t last_on_axis_ = 0;
    double last_on_axis_time_ = 0.0;
    double max_abs_x_ = 0.0;
    std::vector<ExcursionRecord> records_;
};

[[nodiscard]] std::vector<ExcursionRecord> excursion_anatomy(const PathSample& path, double a, double delta);

struct ExcursionSurvey {
    std::vector<ExcursionRecord> records;
    double median_max_abs_x = 0.0;
    double median_jump_back = 0.0;
    std::size_t replicas_with_excursion = 0;
};

[[nodiscard]] ExcursionSurvey excursion_survey(const ModelParams& p, double a, double t, const MonteCarloOptions& options);

}  // namespace ablab
