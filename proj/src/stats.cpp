#include "ablab/stats.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ablab {

StatReport summarize(std::span<const double> samples, const ConfigEcho& config) {
    if (samples.size() < 2) throw std::invalid_argument("summarize: need at least two replicas");
    const auto n = static_cast<double>(samples.size());
    double sum = 0.0;
    for (double v : samples) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    const double variance = ss / (n - 1.0);
    return {mean, std::sqrt(variance / n), samples.size(), config};
}

StatReport difference(const StatReport& a, const StatReport& b) {
    return {a.estimate - b.estimate, std::hypot(a.std_error, b.std_error), std::min(a.n_replicas, b.n_replicas),
            a.config};
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());
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

double ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
    std::sort(samples.begin(), samples.end());
    const auto n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

namespace {
double ks_coefficient(double alpha) { return std::sqrt(-std::log(alpha / 2.0) / 2.0); }
}  // namespace

double ks_critical_two_sample(std::size_t n, std::size_t m, double alpha) {
    const auto dn = static_cast<double>(n);
    const auto dm = static_cast<double>(m);
    return ks_coefficient(alpha) * std::sqrt((dn + dm) / (dn * dm));
}

double ks_critical_one_sample(std::size_t n, double alpha) {
    return ks_coefficient(alpha) / std::sqrt(static_cast<double>(n));
}

ScalingFit fit_scaling(std::vector<double> epsilons, std::vector<double> estimates) {
    if (epsilons.size() < 3 || epsilons.size() != estimates.size())
        throw std::invalid_argument("fit_scaling: need >= 3 matching (epsilon, estimate) pairs");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0) || !(estimates[i] > 0.0))
            throw std::invalid_argument("fit_scaling: epsilons and estimates must be positive");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
            throw std::invalid_argument("fit_scaling: epsilons must be strictly decreasing");
    }
    const auto n = static_cast<Eigen::Index>(epsilons.size());
    Eigen::MatrixXd design(n, 2);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = std::log(epsilons[static_cast<std::size_t>(i)]);
        rhs[i] = std::log(estimates[static_cast<std::size_t>(i)]);
    }
    const Eigen::Vector2d beta = design.colPivHouseholderQr().solve(rhs);
    const Eigen::VectorXd residual = rhs - design * beta;
    const double dof = static_cast<double>(n - 2);
    double half_width = 0.0;
    if (dof > 0) {
        const double sigma2 = residual.squaredNorm() / dof;
        const Eigen::Matrix2d cov = sigma2 * (design.transpose() * design).inverse();
        const boost::math::students_t dist(dof);
        half_width = boost::math::quantile(boost::math::complement(dist, 0.025)) * std::sqrt(cov(1, 1));
    }
    return {std::move(epsilons), std::move(estimates), beta[1], beta[0], beta[1] - half_width, beta[1] + half_width};
}

bool strictly_decreasing(std::span<const double> values) noexcept {
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i] < values[i - 1])) return false;
    return true;
}

}  // namespace ablab
