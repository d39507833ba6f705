#include "ablab/pde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ablab/parallel.hpp"

namespace ablab {

Grid1D Grid1D::make(std::size_t n_points, double t_final, double y_max, double safety) {
    if (n_points < 4) throw std::invalid_argument("Grid1D: need at least 4 points");
    Grid1D g;
    g.y_max = y_max;
    g.n_points = n_points;
    g.dy = (y_max - g.y_min) / static_cast<double>(n_points - 1);
    g.t_final = t_final;
    g.dt = safety * g.stable_dt();
    g.validate();
    return g;
}

double Grid1D::max_abs_drift() const noexcept {
    // |1/(2y) - y| on the nodes y >= dy is largest at one of the two ends.
    const double near = std::abs(0.5 / dy - dy);
    const double far = std::abs(0.5 / y_max - y_max);
    return std::max(near, far);
}

double Grid1D::stable_dt() const noexcept {
    const double dy2 = dy * dy;
    return std::min(dy2 / (1.0 + max_abs_drift() * dy), 0.5 * dy2);
}

void Grid1D::validate(bool explicit_scheme) const {
    if (n_points < 4) throw std::invalid_argument("Grid1D: need at least 4 points");
    if (y_min != 0.0) throw std::invalid_argument("Grid1D: y_min must be 0");
    if (!(dy > 0.0) || std::abs(y_min + static_cast<double>(n_points - 1) * dy - y_max) > 1e-9 * y_max)
        throw std::invalid_argument("Grid1D: dy inconsistent with y_max and n_points");
    if (!(std::exp(-y_max * y_max) < 1e-6)) throw std::invalid_argument("Grid1D: y_max too small for truncation");
    if (!(dt > 0.0) || !(t_final >= 0.0)) throw std::invalid_argument("Grid1D: dt must be > 0 and t_final >= 0");
    if (explicit_scheme && dt > stable_dt() * (1.0 + 1e-12))
        throw std::invalid_argument("Grid1D: dt exceeds the explicit stability bound");
}

double PDESolution::at(std::size_t k, double y) const {
    if (k >= times.size()) throw std::out_of_range("PDESolution::at: snapshot index");
    if (y < grid.y_min || y > grid.y_max) throw std::out_of_range("PDESolution::at: y outside grid");
    const double pos = (y - grid.y_min) / grid.dy;
    const auto j = std::min(static_cast<std::size_t>(pos), grid.n_points - 2);
    const double w = pos - static_cast<double>(j);
    const auto row = static_cast<Eigen::Index>(k);
    const auto col = static_cast<Eigen::Index>(j);
    return (1.0 - w) * u(row, col) + w * u(row, col + 1);
}

std::size_t PDESolution::index_of(double t) const {
    for (std::size_t k = 0; k < times.size(); ++k)
        if (std::abs(times[k] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return k;
    throw std::out_of_range("PDESolution::index_of: time not stored");
}

namespace {

/// Tridiagonal operator L: (L u)_j = lower_j u_{j-1} + diag_j u_j + upper_j u_{j+1}.
struct Operator {
    Eigen::VectorXd lower, diag, upper;

    explicit Operator(const Grid1D& g) {
        const auto n = static_cast<Eigen::Index>(g.n_points);
        lower = Eigen::VectorXd::Zero(n);
        diag = Eigen::VectorXd::Zero(n);
        upper = Eigen::VectorXd::Zero(n);
        const double dy2 = g.dy * g.dy;
        diag[0] = -2.0 / dy2;
        upper[0] = 2.0 / dy2;
        for (Eigen::Index j = 1; j + 1 < n; ++j) {
            const double b = 0.5 / g.y(static_cast<std::size_t>(j)) - g.y(static_cast<std::size_t>(j));
            lower[j] = 0.5 / dy2 - b / (2.0 * g.dy);
            diag[j] = -1.0 / dy2;
            upper[j] = 0.5 / dy2 + b / (2.0 * g.dy);
        }
        // Ghost node u_n = u_{n-2}: zero slope, the drift term drops out.
        lower[n - 1] = 1.0 / dy2;
        diag[n - 1] = -1.0 / dy2;
    }

    void apply(const Eigen::VectorXd& u, Eigen::VectorXd& out) const {
        const Eigen::Index n = u.size();
        out[0] = diag[0] * u[0] + upper[0] * u[1];
        for (Eigen::Index j = 1; j + 1 < n; ++j) out[j] = lower[j] * u[j - 1] + diag[j] * u[j] + upper[j] * u[j + 1];
        out[n - 1] = lower[n - 1] * u[n - 2] + diag[n - 1] * u[n - 1];
    }
};

/// Solves (I - c L) x = rhs by the Thomas algorithm.
void solve_shifted(const Operator& op, double c, const Eigen::VectorXd& rhs, Eigen::VectorXd& x,
                   Eigen::VectorXd& scratch) {
    const Eigen::Index n = rhs.size();
    double denom = 1.0 - c * op.diag[0];
    scratch[0] = -c * op.upper[0] / denom;
    x[0] = rhs[0] / denom;
    for (Eigen::Index j = 1; j < n; ++j) {
        const double a = -c * op.lower[j];
        denom = (1.0 - c * op.diag[j]) - a * scratch[j - 1];
        scratch[j] = j + 1 < n ? -c * op.upper[j] / denom : 0.0;
        x[j] = (rhs[j] - a * x[j - 1]) / denom;
    }
    for (Eigen::Index j = n - 2; j >= 0; --j) x[j] -= scratch[j] * x[j + 1];
}

}  // namespace

PDESolution solve_limit_pde(const TestFunction& f, const Grid1D& grid, std::vector<double> output_times,
                            PdeScheme scheme) {
    grid.validate(scheme == PdeScheme::explicit_euler);
    if (output_times.empty()) output_times.push_back(grid.t_final);
    std::sort(output_times.begin(), output_times.end());
    if (output_times.front() < 0.0) throw std::invalid_argument("solve_limit_pde: negative output time");

    const auto n = static_cast<Eigen::Index>(grid.n_points);
    Eigen::VectorXd u(n), work(n), rhs(n), scratch(n);
    for (Eigen::Index j = 0; j < n; ++j) u[j] = f(grid.y(static_cast<std::size_t>(j)));
    if (!u.allFinite()) throw std::invalid_argument("solve_limit_pde: initial data not finite");

    PDESolution sol;
    sol.grid = grid;
    sol.initial = f.name;
    sol.times.push_back(0.0);
    for (double t : output_times)
        if (t > sol.times.back()) sol.times.push_back(t);
    sol.u.resize(static_cast<Eigen::Index>(sol.times.size()), n);
    sol.u.row(0) = u.transpose();

    const Operator op(grid);
    for (std::size_t k = 1; k < sol.times.size(); ++k) {
        const double span = sol.times[k] - sol.times[k - 1];
        const auto steps = static_cast<std::size_t>(std::ceil(span / grid.dt - 1e-9));
        const double dt = span / static_cast<double>(steps);
        for (std::size_t s = 0; s < steps; ++s) {
            op.apply(u, work);
            if (scheme == PdeScheme::explicit_euler) {
                u += dt * work;
            } else {
                rhs = u + 0.5 * dt * work;
                solve_shifted(op, 0.5 * dt, rhs, u, scratch);
            }
        }
        if (!u.allFinite()) throw std::runtime_error("solve_limit_pde: solution became non-finite");
        sol.u.row(static_cast<Eigen::Index>(k)) = u.transpose();
    }

    const double dy2 = grid.dy * grid.dy;
    const double fine = 2.0 * (u[1] - u[0]) / dy2;
    const double coarse = 2.0 * (u[2] - u[0]) / (4.0 * dy2);
    sol.singular_ratio = fine;
    sol.singular_node_ok = std::abs(fine - coarse) <= 0.1 * std::max(std::abs(fine), 1e-6);
    return sol;
}

StatReport feynman_kac_mc(double y, double t, const TestFunction& f, const MonteCarloOptions& options) {
    if (y < 0.0 || t < 0.0) throw std::invalid_argument("feynman_kac_mc: y and t must be >= 0");
    std::vector<double> samples(options.replicas);
    parallel_for(options.replicas, [&](std::size_t r) {
        samples[r] = f(sample_limit_terminal(y, t, replica_streams(options.seed, r)));
    });
    return summarize(samples, {0.0, 0.0, t, t, options.seed});
}

CauchyReport cauchy_2d_mc(double x, double y, double t, const std::function<double(double, double)>& f2,
                          ModelParams p, const MonteCarloOptions& options, const PDESolution* reference) {
    p.x0 = x;
    p.y0 = y;
    p.horizon = t;
    p.validate();
    const TimeGrid grid(t, options.step_for(p.epsilon));
    std::vector<double> values(options.replicas);
    std::vector<double> paired(options.replicas);
    std::vector<char> diverged(options.replicas, 0);
    parallel_for(options.replicas, [&](std::size_t r) {
        State2 final{0.0, 0.0};
        diverged[r] = simulate_rescaled(
            p, grid, replica_streams(options.seed, r), [&](std::size_t, const State2& s, double) { final = s; },
            options.scheme);
        values[r] = f2(final.x(), final.y());
        paired[r] = values[r] - f2(0.0, final.norm());
    });
    if (std::find(diverged.begin(), diverged.end(), 1) != diverged.end())
        throw DivergenceError("cauchy_2d_mc: a replica diverged; reduce the step");
    CauchyReport report;
    report.y_pi = project_pi(p.start());
    report.mc = summarize(values, echo(p, options));
    report.coupled = summarize(paired, echo(p, options));
    if (reference != nullptr) report.pde = reference->value(t, report.y_pi);
    return report;
}

}  // namespace ablab
