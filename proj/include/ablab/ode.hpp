#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ablab {

struct StepSizeUnderflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dormand-Prince 5(4) with elementary step control. Integrates
/// dy/dt = rhs(y) from 0 to t_end; observer(t, y) is called after every accepted step.
template <class Vector, class Rhs, class Observer>
Vector integrate_dopri5(Rhs&& rhs, Vector y, double t_end, double tol, Observer&& observer) {
    if (!(tol > 0.0)) throw std::invalid_argument("integrate_dopri5: tol must be > 0");
    if (t_end <= 0.0) return y;

    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    double t = 0.0;
    double h = std::min(t_end, 1e-3);
    const double h_min = 1e-14 * std::max(1.0, t_end);
    Vector k1 = rhs(y);
    while (t < t_end) {
        h = std::min(h, t_end - t);
        const Vector k2 = rhs(Vector(y + h * a21 * k1));
        const Vector k3 = rhs(Vector(y + h * (a31 * k1 + a32 * k2)));
        const Vector k4 = rhs(Vector(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
        const Vector k5 = rhs(Vector(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
        const Vector k6 = rhs(Vector(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
        const Vector y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Vector k7 = rhs(y_new);
        const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const Vector scale = (tol + tol * y.cwiseAbs().cwiseMax(y_new.cwiseAbs()).array()).matrix();
        const double err_norm = std::sqrt((err.cwiseQuotient(scale)).squaredNorm() / static_cast<double>(y.size()));
        if (!std::isfinite(err_norm)) throw std::runtime_error("integrate_dopri5: non-finite state");

        if (err_norm <= 1.0) {
            t += h;
            y = y_new;
            k1 = k7;
            observer(t, y);
        }
        const double factor = err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
        h *= factor;
        if (h < h_min && t < t_end) throw StepSizeUnderflow("integrate_dopri5: step size underflow");
    }
    return y;
}

template <class Vector, class Rhs>
Vector integrate_dopri5(Rhs&& rhs, Vector y, double t_end, double tol) {
    return integrate_dopri5(std::forward<Rhs>(rhs), std::move(y), t_end, tol, [](double, const Vector&) {});
}

}  // namespace ablab
