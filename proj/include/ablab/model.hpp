#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstddef>
#include <string_view>
#include <type_traits>

#include "ablab/rng.hpp"
#include "ablab/sde.hpp"

namespace ablab {

template <class Scalar>
using State2T = Eigen::Matrix<Scalar, 2, 1>;
using State2 = State2T<double>;

enum class Variant { dissipative, no_dissipation };

/// Integrator for the time-rescaled system.
enum class Scheme {
    /// Exact flow of the conservative part over h/eps, then an exact OU step
    /// (damping + noise) per coordinate. Preserves the radius law exactly.
    exact_splitting,
    /// Exact OU step for X with lambda = Y/eps (+1) frozen, explicit step for Y.
    frozen_ou,
    /// Plain explicit Euler-Maruyama; needs h well below eps.
    euler_maruyama,
};

[[nodiscard]] std::string_view to_string(Variant v) noexcept;
[[nodiscard]] std::string_view to_string(Scheme s) noexcept;
[[nodiscard]] Variant parse_variant(std::string_view text);
[[nodiscard]] Scheme parse_scheme(std::string_view text);

struct ModelParams {
    double epsilon = 0.01;
    double alpha = 0.1;
    Variant variant = Variant::dissipative;
    double x0 = 0.0;
    double y0 = 2.0;
    double horizon = 1.0;

    /// Throws std::invalid_argument unless eps > 0, 0 < alpha < 1, T > 0.
    void validate() const;
    [[nodiscard]] double delta() const noexcept { return std::pow(epsilon, alpha); }
    [[nodiscard]] State2 start() const noexcept { return {x0, y0}; }
    [[nodiscard]] double damping() const noexcept { return variant == Variant::dissipative ? 1.0 : 0.0; }
};

// ---------------------------------------------------------------------------
// Unperturbed conservative system  x' = -x y,  y' = x^2

template <class Scalar>
[[nodiscard]] State2T<Scalar> unperturbed_rhs(const State2T<Scalar>& s) {
    return {-s.x() * s.y(), s.x() * s.x()};
}

template <class Scalar>
[[nodiscard]] Scalar energy(const State2T<Scalar>& s) {
    return s.x() * s.x() + s.y() * s.y();
}

/// Adaptive Runge-Kutta solution of the unperturbed system at time t.
/// Throws StepSizeUnderflow for pathological tolerances.
[[nodiscard]] State2 flow_unperturbed(const State2& s0, double t, double tol = 1e-12);

/// Closed-form flow of x' = -x y, y' = x^2 over time tau >= 0. On the circle of
/// radius r the solution is y = r tanh(r t + asinh(y0/|x0|)), x = sign(x0) r sech(.).
[[nodiscard]] inline State2 fast_flow_exact(const State2& s, double tau) noexcept {
    const double x = s.x();
    const double y = s.y();
    if (x == 0.0 || tau == 0.0) return s;
    const double r = std::hypot(x, y);
    const double u = std::asinh(y / std::abs(x));
    // |x| negligible next to |y| (y/|x| overflowed): linearized x' = -x y on the axis.
    if (!std::isfinite(u)) return {x * std::exp(-std::copysign(r * tau, y)), y};
    const double v = u + r * tau;
    const double au = std::abs(u);
    const double av = std::abs(v);
    // cosh(u)/cosh(v) without overflow.
    const double ratio = std::exp(au - av) * (1.0 + std::exp(-2.0 * au)) / (1.0 + std::exp(-2.0 * av));
    return {x * ratio, r * std::tanh(v)};
}

/// Limit point y^pi of the unperturbed flow: the radius sqrt(x^2 + y^2), with
/// y^pi(0, 0) = 0. Points on the negative y-axis map to |y0|.
[[nodiscard]] inline double project_pi(const State2& s) noexcept { return std::hypot(s.x(), s.y()); }

/// Independent oracle for project_pi: the y-coordinate after flowing for `t`.
/// Points on the negative y-axis are nudged off the axis by kappa first.
[[nodiscard]] double project_pi_by_flow(const State2& s, double t = 50.0, double kappa = 1e-3);

// ---------------------------------------------------------------------------
// Time-rescaled system  dX = (-XY/eps - X) dt + dW1,  dY = (X^2/eps - Y) dt + dW2

template <class Scalar>
[[nodiscard]] State2T<Scalar> rescaled_drift(const State2T<Scalar>& s, const ModelParams& p) {
    const Scalar damp = static_cast<Scalar>(p.damping());
    const Scalar inv_eps = Scalar(1) / static_cast<Scalar>(p.epsilon);
    return {-s.x() * s.y() * inv_eps - damp * s.x(), s.x() * s.x() * inv_eps - damp * s.y()};
}

/// Slow-time drift (-xy - eps x, x^2 - eps y); noise amplitude sqrt(eps).
template <class Scalar>
[[nodiscard]] State2T<Scalar> slowtime_drift(const State2T<Scalar>& s, const ModelParams& p) {
    const Scalar friction = static_cast<Scalar>(p.damping() * p.epsilon);
    return {-s.x() * s.y() - friction * s.x(), s.x() * s.x() - friction * s.y()};
}

/// One step of the rescaled system under the chosen scheme.
class RescaledStepper {
public:
    RescaledStepper(const ModelParams& p, double h, Scheme scheme = Scheme::exact_splitting);

    /// Advances s by h given standard normals (n1, n2); returns the additive
    /// Y-noise increment that was applied.
    double step(State2& s, double n1, double n2) const noexcept {
        const double x = s.x();
        const double y = s.y();
        switch (scheme_) {
            case Scheme::exact_splitting: {
                s = fast_flow_exact(s, fast_time_);
                const double dwy = ou_sd_ * n2;
                s = {s.x() * decay_ + ou_sd_ * n1, s.y() * decay_ + dwy};
                return dwy;
            }
            case Scheme::frozen_ou: {
                const double lambda = y * inv_eps_ + damp_;
                const double dwy = sqrt_h_ * n2;
                s.x() = exact_ou_step(x, lambda, h_, n1);
                s.y() = y + (x * x * inv_eps_ - damp_ * y) * h_ + dwy;
                return dwy;
            }
            case Scheme::euler_maruyama: {
                const double dwy = sqrt_h_ * n2;
                s.x() = x + (-x * y * inv_eps_ - damp_ * x) * h_ + sqrt_h_ * n1;
                s.y() = y + (x * x * inv_eps_ - damp_ * y) * h_ + dwy;
                return dwy;
            }
        }
        return 0.0;
    }

    [[nodiscard]] double h() const noexcept { return h_; }
    [[nodiscard]] Scheme scheme() const noexcept { return scheme_; }

private:
    Scheme scheme_;
    double h_;
    double sqrt_h_;
    double inv_eps_;
    double damp_;
    double fast_time_;
    double decay_;
    double ou_sd_;
};

[[nodiscard]] inline bool within_guard(const State2& s, double guard = kDivergenceGuard) noexcept {
    return std::isfinite(s.x()) && std::isfinite(s.y()) && std::abs(s.x()) <= guard && std::abs(s.y()) <= guard;
}

/// One step of the slow-time system: exact conservative flow over h, then the exact
/// OU transition of dX = -eps X dt + sqrt(eps) dW per coordinate.
class SlowtimeStepper {
public:
    SlowtimeStepper(const ModelParams& p, double h);

    double step(State2& s, double n1, double n2) const noexcept {
        s = fast_flow_exact(s, h_);
        const double dwy = noise_sd_ * n2;
        s = {s.x() * decay_ + noise_sd_ * n1, s.y() * decay_ + dwy};
        return dwy;
    }

    [[nodiscard]] double h() const noexcept { return h_; }

private:
    double h_;
    double decay_;
    double noise_sd_;
};

namespace detail {
template <class Observer, class... Args>
bool notify(Observer& obs, Args&&... args) {
    if constexpr (std::is_same_v<std::invoke_result_t<Observer&, Args...>, bool>) {
        return obs(std::forward<Args>(args)...);
    } else {
        obs(std::forward<Args>(args)...);
        return true;
    }
}

template <class Stepper, class Observer>
bool drive(const Stepper& stepper, State2 s, const TimeGrid& grid, const std::array<RngStream, 2>& streams,
           Observer& obs) {
    NormalSequence n1(streams[0]);
    NormalSequence n2(streams[1]);
    const std::size_t n = grid.n_steps();
    for (std::size_t k = 0; k < n; ++k) {
        const double z1 = n1.next();
        const double z2 = n2.next();
        const State2 before = s;
        const double dwy = stepper.step(s, z1, z2);
        if (!notify(obs, k, before, dwy)) return false;
        if (!within_guard(s)) return true;
    }
    notify(obs, n, s, 0.0);
    return false;
}
}  // namespace detail

/// Streams the rescaled path to obs(k, state_k, dW2_k) where dW2_k is the Y-noise
/// increment of step k -> k+1 (0 at the final index). The observer may return
/// false to stop early. Returns true iff the run diverged.
template <class Observer>
bool simulate_rescaled(const ModelParams& p, const TimeGrid& grid, const std::array<RngStream, 2>& streams,
                       Observer&& obs, Scheme scheme = Scheme::exact_splitting) {
    p.validate();
    const RescaledStepper stepper(p, grid.step(), scheme);
    return detail::drive(stepper, p.start(), grid, streams, obs);
}

[[nodiscard]] PathSample simulate_rescaled(const ModelParams& p, const TimeGrid& grid,
                                           const std::array<RngStream, 2>& streams,
                                           Scheme scheme = Scheme::exact_splitting);

/// Slow-time system (friction eps, noise sqrt(eps)). With slow step h/eps its
/// path coincides with the rescaled path at step h, up to rounding.
template <class Observer>
bool simulate_slowtime(const ModelParams& p, const TimeGrid& grid, const std::array<RngStream, 2>& streams,
                       Observer&& obs) {
    p.validate();
    const SlowtimeStepper stepper(p, grid.step());
    return detail::drive(stepper, p.start(), grid, streams, obs);
}

[[nodiscard]] PathSample simulate_slowtime(const ModelParams& p, const TimeGrid& grid,
                                           const std::array<RngStream, 2>& streams);

/// (r, theta) with theta = atan2(y, |x|): the principal arctan branch, with the
/// left half-plane reflected (theta -> pi - theta). At the origin the previous
/// angle is carried forward and the index recorded in `flagged`.
[[nodiscard]] PathSample to_polar(const PathSample& path);

}  // namespace ablab
