#include "ablab/limit.hpp"

#include <stdexcept>

namespace ablab {

namespace catalog {

TestFunction gaussian() {
    return {"f1_gaussian",
            [](double y) { return std::exp(-y * y); },
            [](double y) { return -2.0 * y * std::exp(-y * y); },
            [](double y) { return (4.0 * y * y - 2.0) * std::exp(-y * y); },
            [](double y) { return (12.0 * y - 8.0 * y * y * y) * std::exp(-y * y); },
            -2.0,
            true,
            true,
            true};
}

TestFunction lorentzian() {
    return {"f2_lorentzian",
            [](double y) { return 1.0 / (1.0 + y * y); },
            [](double y) { return -2.0 * y / std::pow(1.0 + y * y, 2); },
            [](double y) { return (6.0 * y * y - 2.0) / std::pow(1.0 + y * y, 3); },
            [](double y) { return 24.0 * y * (1.0 - y * y) / std::pow(1.0 + y * y, 4); },
            -2.0,
            true,
            true,
            true};
}

TestFunction square() {
    return {"f3_square",
            [](double y) { return y * y; },
            [](double y) { return 2.0 * y; },
            [](double) { return 2.0; },
            [](double) { return 0.0; },
            2.0,
            true,
            false,
            false};
}

TestFunction cos_square() {
    return {"f4_cos_square",
            [](double y) { return std::cos(y * y); },
            [](double y) { return -2.0 * y * std::sin(y * y); },
            [](double y) { return -2.0 * std::sin(y * y) - 4.0 * y * y * std::cos(y * y); },
            [](double y) { return -12.0 * y * std::cos(y * y) + 8.0 * y * y * y * std::sin(y * y); },
            0.0,
            true,
            false,
            true};
}

TestFunction constant(double c) {
    return {"constant",
            [c](double) { return c; },
            [](double) { return 0.0; },
            [](double) { return 0.0; },
            [](double) { return 0.0; },
            0.0,
            true,
            true,
            true};
}

TestFunction identity() {
    return {"identity",
            [](double y) { return y; },
            [](double) { return 1.0; },
            [](double) { return 0.0; },
            [](double) { return 0.0; },
            0.0,
            false,
            true,
            false};
}

std::vector<TestFunction> all() { return {gaussian(), lorentzian(), square(), cos_square()}; }

}  // namespace catalog

void LimitParams::validate() const {
    if (!(y0 > 0.0) || !std::isfinite(y0)) throw std::invalid_argument("LimitParams: y0 must be > 0");
    if (!(horizon > 0.0)) throw std::invalid_argument("LimitParams: horizon must be > 0");
}

double generator_apply(const TestFunction& f, double y) {
    if (y < 0.0) return 0.0;
    if (y == 0.0) {
        if (!f.in_domain_A) throw std::domain_error("generator_apply: Af(0) needs f'(0+) = 0 (" + f.name + ")");
        return 0.5 * f.d2(0.0) + 0.5 * f.d1_over_y_at_zero;
    }
    return 0.5 * f.d2(y) + (0.5 / y - y) * f.d1(y);
}

DomainReport domain_check(const TestFunction& f) {
    DomainReport report;
    for (double y = 1e-1; y >= 0.5e-6; y /= 10.0) {
        const double d = f.d1(y);
        report.probe_points.push_back(y);
        report.derivatives.push_back(d);
        report.ratios.push_back(d / y);
    }
    const std::size_t last = report.ratios.size() - 1;
    report.ratio_limit = report.ratios[last];
    report.derivative_vanishes = std::abs(report.derivatives[last]) <= 1e-4 * std::max(1.0, std::abs(report.derivatives[0]));
    report.ratio_stabilizes =
        std::abs(report.ratios[last] - report.ratios[last - 1]) <= 1e-6 * std::max(1.0, std::abs(report.ratio_limit));
    return report;
}

PathSample simulate_limit_em(const LimitParams& p, const TimeGrid& grid, const RngStream& stream) {
    PathSample path{grid, Eigen::MatrixXd(static_cast<Eigen::Index>(grid.n_steps() + 1), 1), {stream},
                    "squared-radius-euler"};
    simulate_limit_em(p, grid, stream, [&](std::size_t k, double y) { path.states(static_cast<Eigen::Index>(k), 0) = y; });
    return path;
}

PathSample simulate_limit_exact(const LimitParams& p, const TimeGrid& grid, const std::array<RngStream, 2>& streams) {
    PathSample path{grid, Eigen::MatrixXd(static_cast<Eigen::Index>(grid.n_steps() + 1), 1),
                    {streams.begin(), streams.end()}, "exact-ou-radius"};
    simulate_limit_exact(p, grid, streams,
                         [&](std::size_t k, const State2& z) { path.states(static_cast<Eigen::Index>(k), 0) = z.norm(); });
    return path;
}

double sample_limit_terminal(double y0, double t, const std::array<RngStream, 2>& streams) {
    if (t == 0.0) return y0;
    const double sd = ou_step_stddev(1.0, t);
    const double zx = sd * streams[0].normal(0);
    const double zy = y0 * std::exp(-t) + sd * streams[1].normal(0);
    return std::hypot(zx, zy);
}

}  // namespace ablab
