#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ablab/analysis.hpp"
#include "ablab/limit.hpp"
#include "ablab/model.hpp"
#include "ablab/stats.hpp"

namespace ablab {

/// Uniform grid on [0, y_max] for u_t = (1/(2y) - y) u_y + u_yy / 2.
struct Grid1D {
    double y_min = 0.0;
    double y_max = 6.0;
    std::size_t n_points = 601;
    double dy = 0.01;
    double dt = 0.0;
    double t_final = 1.0;

    /// Grid with dt = safety * stable_dt().
    static Grid1D make(std::size_t n_points, double t_final, double y_max = 6.0, double safety = 0.9);

    [[nodiscard]] double y(std::size_t j) const noexcept { return y_min + static_cast<double>(j) * dy; }
    [[nodiscard]] double max_abs_drift() const noexcept;
    /// min(dy^2 / (1 + max|b| dy), dy^2 / 2); the second bound keeps the y = 0 node monotone.
    [[nodiscard]] double stable_dt() const noexcept;
    /// Throws std::invalid_argument for malformed grids, y_max with exp(-y_max^2) >= 1e-6,
    /// or (when explicit) dt above stable_dt().
    void validate(bool explicit_scheme = true) const;
};

enum class PdeScheme { explicit_euler, crank_nicolson };

struct PDESolution {
    Grid1D grid;
    std::vector<double> times;
    Eigen::MatrixXd u;  ///< row k = snapshot at times[k], column j = node y_j
    std::string initial;
    /// 2(u1 - u0)/dy^2 at the final time against the same quotient on the 2dy stencil.
    double singular_ratio = 0.0;
    bool singular_node_ok = true;

    /// Linear interpolation in y at snapshot k.
    [[nodiscard]] double at(std::size_t k, double y) const;
    /// Snapshot index of time t (exact match within 1e-12).
    [[nodiscard]] std::size_t index_of(double t) const;
    [[nodiscard]] double value(double t, double y) const { return at(index_of(t), y); }
};

/// Solves the limit Cauchy problem with u(0, .) = f. Snapshots are stored at
/// 0 and at each requested output time (defaults to grid.t_final). The y = 0 node
/// uses the even-extension stencil du0/dt = 2 (u1 - u0) / dy^2, y_max is Neumann-0.
[[nodiscard]] PDESolution solve_limit_pde(const TestFunction& f, const Grid1D& grid,
                                          std::vector<double> output_times = {},
                                          PdeScheme scheme = PdeScheme::explicit_euler);

/// E_y f(Y_t) for the limit process by exact terminal sampling.
[[nodiscard]] StatReport feynman_kac_mc(double y, double t, const TestFunction& f, const MonteCarloOptions& options);

struct CauchyReport {
    StatReport mc;         ///< E f2(X_t, Y_t) under the rescaled system
    StatReport coupled;    ///< paired f2(X_t, Y_t) - f2(0, |(X_t, Y_t)|)
    double y_pi = 0.0;
    std::optional<double> pde;  ///< u(t, y_pi) when a reference solution is supplied
};

/// Probabilistic solution of the 2-D Cauchy problem at (x, y). `p.x0`, `p.y0`
/// and `p.horizon` are overridden by (x, y, t).
[[nodiscard]] CauchyReport cauchy_2d_mc(double x, double y, double t, const std::function<double(double, double)>& f2,
                                        ModelParams p, const MonteCarloOptions& options,
                                        const PDESolution* reference = nullptr);

}  // namespace ablab
