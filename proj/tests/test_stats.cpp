#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ablab/stats.hpp"

using namespace ablab;

TEST_CASE("summary statistics") {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const StatReport r = summarize(v);
    CHECK(r.estimate == 2.5);
    CHECK(r.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(r.n_replicas == 4);
    CHECK_THROWS_AS((void)summarize(std::vector<double>{1.0}), std::invalid_argument);

    StatReport a{1.0, 0.3, 10, {}}, b{0.25, 0.4, 20, {}};
    const StatReport d = difference(a, b);
    CHECK(d.estimate == 0.75);
    CHECK(d.std_error == doctest::Approx(0.5));
}

TEST_CASE("kolmogorov-smirnov statistics") {
    CHECK(ks_two_sample({1, 2, 3}, {1, 2, 3}) == 0.0);
    CHECK(ks_two_sample({1, 2, 3}, {4, 5, 6}) == 1.0);
    CHECK(ks_two_sample({1, 2, 3, 4}, {3, 4, 5, 6}) == doctest::Approx(0.5));
    CHECK(ks_one_sample({0.25, 0.75}, [](double x) { return x; }) == doctest::Approx(0.25));
    // c(0.01) = sqrt(-ln(0.005)/2) = 1.6276
    CHECK(ks_critical_one_sample(10000) == doctest::Approx(0.016276).epsilon(1e-3));
    CHECK(ks_critical_two_sample(10000, 10000) == doctest::Approx(0.016276 * std::sqrt(2.0)).epsilon(1e-3));
}

TEST_CASE("scaling fit recovers exact power laws") {
    const std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};
    std::vector<double> est;
    for (double e : eps) est.push_back(3.0 * std::pow(e, 0.9));
    const ScalingFit fit = fit_scaling(eps, est);
    CHECK(fit.slope == doctest::Approx(0.9));
    CHECK(fit.intercept == doctest::Approx(std::log(3.0)));
    CHECK(fit.slope_ci_low == doctest::Approx(0.9));
    CHECK(fit.slope_ci_high == doctest::Approx(0.9));
    CHECK_THROWS_AS((void)fit_scaling({1e-1, 1e-2}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)fit_scaling({1e-2, 1e-1, 1e-3}, {1.0, 2.0, 3.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)fit_scaling({1e-1, 1e-2, 1e-3}, {1.0, -2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("strict decrease") {
    CHECK(strictly_decreasing(std::vector<double>{3, 2, 1}));
    CHECK_FALSE(strictly_decreasing(std::vector<double>{3, 3, 1}));
    CHECK(strictly_decreasing(std::vector<double>{1}));
}
