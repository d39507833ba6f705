#include "ablab/model.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

#include "ablab/ode.hpp"

namespace ablab {

std::string_view to_string(Variant v) noexcept {
    return v == Variant::dissipative ? "dissipative" : "no-dissipation";
}

std::string_view to_string(Scheme s) noexcept {
    switch (s) {
        case Scheme::exact_splitting:
            return "exact-splitting";
        case Scheme::frozen_ou:
            return "frozen-ou";
        case Scheme::euler_maruyama:
            return "euler-maruyama";
    }
    return "unknown";
}

Variant parse_variant(std::string_view text) {
    if (text == "dissipative" || text == "damped") return Variant::dissipative;
    if (text == "no-dissipation" || text == "no_dissipation") return Variant::no_dissipation;
    throw std::invalid_argument("unknown variant: " + std::string(text));
}

Scheme parse_scheme(std::string_view text) {
    if (text == "exact-splitting" || text == "exact_splitting") return Scheme::exact_splitting;
    if (text == "frozen-ou" || text == "frozen_ou") return Scheme::frozen_ou;
    if (text == "euler-maruyama" || text == "euler_maruyama") return Scheme::euler_maruyama;
    throw std::invalid_argument("unknown scheme: " + std::string(text));
}

void ModelParams::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("ModelParams: epsilon must be > 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ModelParams: alpha must lie in (0, 1)");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("ModelParams: horizon must be > 0");
    if (!std::isfinite(x0) || !std::isfinite(y0)) throw std::invalid_argument("ModelParams: start must be finite");
}

State2 flow_unperturbed(const State2& s0, double t, double tol) {
    return integrate_dopri5<State2>([](const State2& s) { return unperturbed_rhs(s); }, s0, t, tol);
}

double project_pi_by_flow(const State2& s, double t, double kappa) {
    if (s.x() == 0.0 && s.y() == 0.0) return 0.0;
    State2 start = s;
    if (s.x() == 0.0 && s.y() < 0.0) {
        const double r = std::abs(s.y());
        start = {r * std::sin(kappa), -r * std::cos(kappa)};
    }
    return flow_unperturbed(start, t, 1e-12).y();
}

RescaledStepper::RescaledStepper(const ModelParams& p, double h, Scheme scheme)
    : scheme_(scheme),
      h_(h),
      sqrt_h_(std::sqrt(h)),
      inv_eps_(1.0 / p.epsilon),
      damp_(p.damping()),
      fast_time_(h / p.epsilon),
      decay_(std::exp(-p.damping() * h)),
      ou_sd_(ou_step_stddev(p.damping(), h)) {
    if (!(h > 0.0)) throw std::invalid_argument("RescaledStepper: step must be > 0");
}

SlowtimeStepper::SlowtimeStepper(const ModelParams& p, double h)
    : h_(h),
      decay_(std::exp(-p.damping() * p.epsilon * h)),
      noise_sd_(std::sqrt(p.epsilon) * ou_step_stddev(p.damping() * p.epsilon, h)) {
    if (!(h > 0.0)) throw std::invalid_argument("SlowtimeStepper: step must be > 0");
}

namespace {

template <class Simulate>
PathSample record_path(const TimeGrid& grid, const std::array<RngStream, 2>& streams, std::string scheme,
                       Simulate&& simulate) {
    const auto rows = static_cast<Eigen::Index>(grid.n_steps() + 1);
    PathSample path{grid, Eigen::MatrixXd::Constant(rows, 2, std::nan("")), {streams.begin(), streams.end()},
                    std::move(scheme)};
    path.diverged = simulate([&](std::size_t k, const State2& s, double) {
        path.states.row(static_cast<Eigen::Index>(k)) = s.transpose();
    });
    return path;
}

}  // namespace

PathSample simulate_rescaled(const ModelParams& p, const TimeGrid& grid, const std::array<RngStream, 2>& streams,
                             Scheme scheme) {
    return record_path(grid, streams, std::string(to_string(scheme)), [&](auto&& obs) {
        return simulate_rescaled(p, grid, streams, obs, scheme);
    });
}

PathSample simulate_slowtime(const ModelParams& p, const TimeGrid& grid, const std::array<RngStream, 2>& streams) {
    return record_path(grid, streams, "slowtime-exact-splitting",
                       [&](auto&& obs) { return simulate_slowtime(p, grid, streams, obs); });
}

PathSample to_polar(const PathSample& path) {
    if (path.dim() != 2) throw std::invalid_argument("to_polar: path must be 2-D");
    PathSample out{path.grid, Eigen::MatrixXd(path.states.rows(), 2), path.streams, path.scheme, path.diverged};
    double previous_theta = std::numbers::pi / 2;
    for (Eigen::Index k = 0; k < path.states.rows(); ++k) {
        const double x = path.states(k, 0);
        const double y = path.states(k, 1);
        out.states(k, 0) = std::hypot(x, y);
        if (x == 0.0 && y == 0.0) {
            out.states(k, 1) = previous_theta;
            out.flagged.push_back(static_cast<std::size_t>(k));
        } else {
            previous_theta = std::atan2(y, std::abs(x));
            out.states(k, 1) = previous_theta;
        }
    }
    return out;
}

}  // namespace ablab
