#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ablab {

/// Parameters echoed into every report.
struct ConfigEcho {
    double epsilon = 0.0;
    double alpha = 0.0;
    double horizon = 0.0;
    double step = 0.0;
    std::uint64_t seed = 0;
};

/// Monte Carlo estimate of a scalar functional.
struct StatReport {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t n_replicas = 0;
    ConfigEcho config;
};

/// Sample mean and std/sqrt(n), reduced in index order. Requires n >= 2.
[[nodiscard]] StatReport summarize(std::span<const double> samples, const ConfigEcho& config = {});

/// Difference of two independent estimates with pooled standard error.
[[nodiscard]] StatReport difference(const StatReport& a, const StatReport& b);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
[[nodiscard]] double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// One-sample KS statistic against a continuous CDF.
[[nodiscard]] double ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Asymptotic KS critical values c(alpha) * sqrt((n+m)/(n m)) and c(alpha)/sqrt(n),
/// with c(alpha) = sqrt(-ln(alpha/2)/2).
[[nodiscard]] double ks_critical_two_sample(std::size_t n, std::size_t m, double alpha = 0.01);
[[nodiscard]] double ks_critical_one_sample(std::size_t n, double alpha = 0.01);

/// Least-squares fit of log(estimate) against log(epsilon).
struct ScalingFit {
    std::vector<double> epsilons;
    std::vector<double> estimates;
    double slope = 0.0;
    double intercept = 0.0;
    double slope_ci_low = 0.0;
    double slope_ci_high = 0.0;
};

/// Requires >= 3 strictly decreasing positive epsilons and positive estimates.
[[nodiscard]] ScalingFit fit_scaling(std::vector<double> epsilons, std::vector<double> estimates);

/// Strictly decreasing sequence check used by the trend tests.
[[nodiscard]] bool strictly_decreasing(std::span<const double> values) noexcept;

}  // namespace ablab
