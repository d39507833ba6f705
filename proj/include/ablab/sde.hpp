#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ablab/rng.hpp"

namespace ablab {

/// Default divergence guard on |state| used by every explicit scheme.
inline constexpr double kDivergenceGuard = 1e6;

/// Uniform time grid t0, t0+h, ..., t0+n*h with n = ceil((horizon - t0)/h).
class TimeGrid {
public:
    TimeGrid(double t0, double horizon, double step);
    TimeGrid(double horizon, double step) : TimeGrid(0.0, horizon, step) {}

    [[nodiscard]] double t0() const noexcept { return t0_; }
    [[nodiscard]] double horizon() const noexcept { return horizon_; }
    [[nodiscard]] double step() const noexcept { return step_; }
    [[nodiscard]] std::size_t n_steps() const noexcept { return n_steps_; }
    [[nodiscard]] double time(std::size_t k) const noexcept { return t0_ + static_cast<double>(k) * step_; }

private:
    double t0_;
    double horizon_;
    double step_;
    std::size_t n_steps_;
};

/// A sampled trajectory: row k of `states` is the state at grid.time(k).
struct PathSample {
    TimeGrid grid;
    Eigen::MatrixXd states;
    std::vector<RngStream> streams;
    std::string scheme;
    bool diverged = false;
    /// Grid indices whose value is a carried-forward placeholder (e.g. undefined angle).
    std::vector<std::size_t> flagged;

    [[nodiscard]] Eigen::Index dim() const noexcept { return states.cols(); }
    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(states.rows()); }
    /// Last coordinate: Y for (x, y) paths, the only coordinate for 1-D paths.
    [[nodiscard]] double y(std::size_t k) const { return states(static_cast<Eigen::Index>(k), states.cols() - 1); }
    [[nodiscard]] double t(std::size_t k) const noexcept { return grid.time(k); }
};

/// n_steps draws of N(0, h) from `stream`.
[[nodiscard]] Eigen::VectorXd brownian_increments(const RngStream& stream, const TimeGrid& grid);

/// Exact Gaussian transition of dX = -lambda X dt + dW over a step h with lambda frozen.
/// Valid for any real lambda; lambda = 0 is the Brownian limit x + sqrt(h) * noise.
[[nodiscard]] inline double ou_step_stddev(double lambda, double h) noexcept {
    if (lambda == 0.0) return std::sqrt(h);
    return std::sqrt(-std::expm1(-2.0 * lambda * h) / (2.0 * lambda));
}

[[nodiscard]] inline double exact_ou_step(double x, double lambda, double h, double noise) noexcept {
    return x * std::exp(-lambda * h) + ou_step_stddev(lambda, h) * noise;
}

/// Explicit Euler-Maruyama for dX = drift(X) dt + diffusion dW.
///
/// `diffusion` is d x m and `streams` supplies one stream per noise column. The run
/// stops and is flagged diverged as soon as any coordinate leaves [-guard, guard]
/// or becomes non-finite; later rows are NaN.
template <class Drift>
PathSample euler_maruyama(Drift&& drift, const Eigen::MatrixXd& diffusion, const Eigen::VectorXd& x0,
                          const TimeGrid& grid, std::span<const RngStream> streams,
                          double guard = kDivergenceGuard) {
    if (diffusion.rows() != x0.size())
        throw std::invalid_argument("euler_maruyama: diffusion rows must match state dimension");
    if (static_cast<std::size_t>(diffusion.cols()) != streams.size())
        throw std::invalid_argument("euler_maruyama: need one stream per noise dimension");

    const auto n = static_cast<Eigen::Index>(grid.n_steps());
    const double h = grid.step();
    const double sqrt_h = std::sqrt(h);

    PathSample path{grid, Eigen::MatrixXd::Constant(n + 1, x0.size(), std::nan("")),
                    {streams.begin(), streams.end()}, "euler_maruyama"};
    std::vector<NormalSequence> noise;
    noise.reserve(streams.size());
    for (const auto& s : streams) noise.emplace_back(s);

    Eigen::VectorXd x = x0;
    Eigen::VectorXd dw(diffusion.cols());
    path.states.row(0) = x.transpose();
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index j = 0; j < dw.size(); ++j) dw[j] = sqrt_h * noise[static_cast<std::size_t>(j)].next();
        x += drift(x) * h + diffusion * dw;
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > guard) {
            path.diverged = true;
            break;
        }
        path.states.row(k + 1) = x.transpose();
    }
    return path;
}

}  // namespace ablab
