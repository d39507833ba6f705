#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "ablab/model.hpp"
#include "ablab/rng.hpp"
#include "ablab/sde.hpp"

namespace ablab {

/// A test function on y >= 0 with closed-form derivatives.
struct TestFunction {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> d1;
    std::function<double(double)> d2;
    std::function<double(double)> d3;
    /// lim_{y->0+} f'(y)/y; meaningful only when in_domain_A.
    double d1_over_y_at_zero = 0.0;
    /// f'(0+) = 0 with f'(y)/y bounded near 0.
    bool in_domain_A = false;
    bool bounded_derivs_3 = false;
    bool bounded = false;

    double operator()(double y) const { return value(y); }
};

namespace catalog {
TestFunction gaussian();         ///< f1(y) = exp(-y^2)
TestFunction lorentzian();       ///< f2(y) = 1/(1+y^2)
TestFunction square();           ///< f3(y) = y^2 (unbounded)
TestFunction cos_square();       ///< f4(y) = cos(y^2)
TestFunction constant(double c);
TestFunction identity();         ///< f(y) = y, not in D(A)
std::vector<TestFunction> all();
}  // namespace catalog

enum class LimitVariant { damped, no_dissipation };

struct LimitParams {
    double y0 = 1.0;
    LimitVariant variant = LimitVariant::damped;
    double horizon = 1.0;

    void validate() const;
};

/// Generator of the damped radial Bessel process:
///   Af(y) = f''/2 + (1/(2y) - y) f'        for y > 0,
///   Af(0) = f''(0)/2 + lim f'(y)/(2y)      (requires f in D(A)),
///   Af(y) = 0                              for y < 0.
/// Throws std::domain_error at y = 0 when f is not in D(A).
[[nodiscard]] double generator_apply(const TestFunction& f, double y);

/// Drift of the limit SDE: 1/(2y) - y (damped) or 1/y (no dissipation).
[[nodiscard]] inline double limit_drift(LimitVariant v, double y) noexcept {
    return v == LimitVariant::damped ? 0.5 / y - y : 1.0 / y;
}

struct DomainReport {
    std::vector<double> probe_points;
    std::vector<double> derivatives;
    std::vector<double> ratios;  ///< f'(y)/y
    bool derivative_vanishes = false;
    bool ratio_stabilizes = false;
    double ratio_limit = 0.0;
    [[nodiscard]] bool pass() const noexcept { return derivative_vanishes && ratio_stabilizes; }
};

/// Evaluates f' at y = 1e-1 .. 1e-6 and checks f' -> 0 with f'(y)/y settling.
[[nodiscard]] DomainReport domain_check(const TestFunction& f);

/// One step of the squared-radius scheme S = Y^2:
///   damped:          S += (2 - 2S) h + 2 sqrt(S) dW
///   no dissipation:  S += 3 h + 2 sqrt(S) dW
/// Negative excursions are reflected to |S|.
[[nodiscard]] inline double squared_radius_step(LimitVariant v, double s, double h, double dw) noexcept {
    const double drift = v == LimitVariant::damped ? 2.0 - 2.0 * s : 3.0;
    return std::abs(s + drift * h + 2.0 * std::sqrt(s) * dw);
}

/// Direct discretization via the squared-radius scheme; streams obs(k, y_k).
template <class Observer>
void simulate_limit_em(const LimitParams& p, const TimeGrid& grid, const RngStream& stream, Observer&& obs) {
    p.validate();
    NormalSequence noise(stream);
    const double sqrt_h = std::sqrt(grid.step());
    double s = p.y0 * p.y0;
    obs(std::size_t{0}, p.y0);
    for (std::size_t k = 1; k <= grid.n_steps(); ++k) {
        s = squared_radius_step(p.variant, s, grid.step(), sqrt_h * noise.next());
        obs(k, std::sqrt(s));
    }
}

[[nodiscard]] PathSample simulate_limit_em(const LimitParams& p, const TimeGrid& grid, const RngStream& stream);

/// Exact-in-law sampler: |Z_t| for the 2-D OU process dZ = -Z dt + dW started at
/// (0, y0). Streams obs(k, Z_k) where Z_k is the 2-D point. Damped variant only.
template <class Observer>
void simulate_limit_exact(const LimitParams& p, const TimeGrid& grid, const std::array<RngStream, 2>& streams,
                          Observer&& obs) {
    p.validate();
    if (p.variant != LimitVariant::damped)
        throw std::invalid_argument("simulate_limit_exact: no exact sampler for the no-dissipation variant");
    NormalSequence n1(streams[0]);
    NormalSequence n2(streams[1]);
    const double h = grid.step();
    const double decay = std::exp(-h);
    const double sd = ou_step_stddev(1.0, h);
    State2 z{0.0, p.y0};
    obs(std::size_t{0}, z);
    for (std::size_t k = 1; k <= grid.n_steps(); ++k) {
        z = {z.x() * decay + sd * n1.next(), z.y() * decay + sd * n2.next()};
        obs(k, z);
    }
}

[[nodiscard]] PathSample simulate_limit_exact(const LimitParams& p, const TimeGrid& grid,
                                              const std::array<RngStream, 2>& streams);

/// Exact terminal sample |Z_T| using a single Gaussian transition.
[[nodiscard]] double sample_limit_terminal(double y0, double t, const std::array<RngStream, 2>& streams);

}  // namespace ablab
