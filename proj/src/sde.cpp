#include "ablab/sde.hpp"

namespace ablab {

TimeGrid::TimeGrid(double t0, double horizon, double step) : t0_(t0), horizon_(horizon), step_(step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("TimeGrid: step must be > 0");
    if (!(horizon >= t0) || !std::isfinite(horizon) || !std::isfinite(t0))
        throw std::invalid_argument("TimeGrid: horizon must be >= t0");
    // Tolerate representation error so that e.g. 1.0 / 1e-3 gives 1000 steps, not 1001.
    const double ratio = (horizon - t0) / step;
    n_steps_ = static_cast<std::size_t>(std::ceil(ratio - 1e-9 * std::max(1.0, ratio)));
}

Eigen::VectorXd brownian_increments(const RngStream& stream, const TimeGrid& grid) {
    const auto n = static_cast<Eigen::Index>(grid.n_steps());
    const double sqrt_h = std::sqrt(grid.step());
    Eigen::VectorXd out(n);
    NormalSequence noise(stream);
    for (Eigen::Index k = 0; k < n; ++k) out[k] = sqrt_h * noise.next();
    return out;
}

}  // namespace ablab
