#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "ablab/model.hpp"
#include "ablab/ode.hpp"

namespace ablab::affine {

/// g_{a,b} = [[a, b], [0, 1]] with a > 0.
template <class Scalar = double>
struct GroupElement {
    Scalar a = Scalar(1);
    Scalar b = Scalar(0);

    static GroupElement identity() { return {Scalar(1), Scalar(0)}; }
    [[nodiscard]] bool valid() const { return a > Scalar(0); }
    [[nodiscard]] Eigen::Matrix<Scalar, 2, 2> matrix() const {
        Eigen::Matrix<Scalar, 2, 2> m;
        m << a, b, Scalar(0), Scalar(1);
        return m;
    }
    bool operator==(const GroupElement&) const = default;
};

/// [[xi1, xi2], [0, 0]]; `dual` marks an element of the dual algebra. The
/// pairing of a dual element with an algebra element is xi1 eta1 + xi2 eta2.
template <class Scalar = double>
struct AlgebraElement {
    Scalar xi1 = Scalar(0);
    Scalar xi2 = Scalar(0);
    bool dual = false;

    [[nodiscard]] Eigen::Matrix<Scalar, 2, 2> matrix() const {
        Eigen::Matrix<Scalar, 2, 2> m;
        m << xi1, xi2, Scalar(0), Scalar(0);
        return m;
    }
    [[nodiscard]] Eigen::Matrix<Scalar, 2, 1> vector() const { return {xi1, xi2}; }
    bool operator==(const AlgebraElement&) const = default;
};

/// Body angular momentum (M1, M2); x = M2, y = -M1.
template <class Scalar = double>
using MomentumState = Eigen::Matrix<Scalar, 2, 1>;

template <class Scalar>
[[nodiscard]] GroupElement<Scalar> multiply(const GroupElement<Scalar>& g2, const GroupElement<Scalar>& g1) {
    return {g1.a * g2.a, g2.a * g1.b + g2.b};
}

template <class Scalar>
[[nodiscard]] GroupElement<Scalar> inverse(const GroupElement<Scalar>& g) {
    if (!g.valid()) throw std::domain_error("affine::inverse: a must be > 0");
    return {Scalar(1) / g.a, -g.b / g.a};
}

/// Ad_g eta = g eta g^{-1} = (eta1, -b eta1 + a eta2).
template <class Scalar>
[[nodiscard]] AlgebraElement<Scalar> ad(const GroupElement<Scalar>& g, const AlgebraElement<Scalar>& eta) {
    return {eta.xi1, -g.b * eta.xi1 + g.a * eta.xi2, false};
}

/// Ad*_g xi = (xi1 - b xi2, a xi2).
template <class Scalar>
[[nodiscard]] AlgebraElement<Scalar> coad(const GroupElement<Scalar>& g, const AlgebraElement<Scalar>& xi) {
    return {xi.xi1 - g.b * xi.xi2, g.a * xi.xi2, true};
}

/// [xi, eta] = (0, xi1 eta2 - xi2 eta1).
template <class Scalar>
[[nodiscard]] AlgebraElement<Scalar> bracket(const AlgebraElement<Scalar>& xi, const AlgebraElement<Scalar>& eta) {
    return {Scalar(0), xi.xi1 * eta.xi2 - xi.xi2 * eta.xi1, false};
}

/// {xi, zeta} = (-xi2 zeta2, xi1 zeta2), defined by ({xi, zeta}, eta) = (zeta, [xi, eta]).
template <class Scalar>
[[nodiscard]] AlgebraElement<Scalar> coadjoint_bracket(const AlgebraElement<Scalar>& xi,
                                                       const AlgebraElement<Scalar>& zeta) {
    return {-xi.xi2 * zeta.xi2, xi.xi1 * zeta.xi2, true};
}

template <class Scalar>
[[nodiscard]] Scalar pairing(const AlgebraElement<Scalar>& xi, const AlgebraElement<Scalar>& eta) {
    return xi.xi1 * eta.xi1 + xi.xi2 * eta.xi2;
}

/// exp(t xi) = [[e^{t xi1}, xi2 f(xi1)], [0, 1]] with f(s) = (e^{t s} - 1)/s (= t at s = 0).
template <class Scalar>
[[nodiscard]] GroupElement<Scalar> exp(const AlgebraElement<Scalar>& xi, Scalar t = Scalar(1)) {
    using std::exp;
    using std::expm1;
    const Scalar s = xi.xi1;
    const Scalar f = s == Scalar(0) ? t : expm1(t * s) / s;
    return {exp(t * s), xi.xi2 * f};
}

// Matrix route: the same operations through explicit 2x2 products.

template <class Scalar>
[[nodiscard]] GroupElement<Scalar> multiply_matrix(const GroupElement<Scalar>& g2, const GroupElement<Scalar>& g1) {
    const Eigen::Matrix<Scalar, 2, 2> m = g2.matrix() * g1.matrix();
    return {m(0, 0), m(0, 1)};
}

template <class Scalar>
[[nodiscard]] AlgebraElement<Scalar> ad_matrix(const GroupElement<Scalar>& g, const AlgebraElement<Scalar>& eta) {
    const Eigen::Matrix<Scalar, 2, 2> m = g.matrix() * eta.matrix() * g.matrix().inverse();
    return {m(0, 0), m(0, 1), false};
}

template <class Scalar>
[[nodiscard]] AlgebraElement<Scalar> bracket_matrix(const AlgebraElement<Scalar>& xi,
                                                    const AlgebraElement<Scalar>& eta) {
    const Eigen::Matrix<Scalar, 2, 2> m = xi.matrix() * eta.matrix() - eta.matrix() * xi.matrix();
    return {m(0, 0), m(0, 1), false};
}

// Euler-Arnold equation with the identity inertia operator.

template <class Scalar>
[[nodiscard]] MomentumState<Scalar> euler_arnold_rhs(const MomentumState<Scalar>& m) {
    const AlgebraElement<Scalar> mc{m(0), m(1), true};
    const auto d = coadjoint_bracket(mc, mc);
    return {d.xi1, d.xi2};
}

template <class Scalar>
[[nodiscard]] State2T<Scalar> to_xy(const MomentumState<Scalar>& m) {
    return {m(1), -m(0)};
}

template <class Scalar>
[[nodiscard]] MomentumState<Scalar> from_xy(const State2T<Scalar>& s) {
    return {-s.y(), s.x()};
}

template <class Scalar>
[[nodiscard]] Scalar kinetic_energy(const MomentumState<Scalar>& m) {
    return Scalar(0.5) * m.squaredNorm();
}

[[nodiscard]] inline MomentumState<double> integrate_euler_arnold(const MomentumState<double>& m0, double t,
                                                                  double tol = 1e-12) {
    if (t < 0.0) throw std::invalid_argument("integrate_euler_arnold: t must be >= 0");
    return integrate_dopri5<MomentumState<double>>(
        [](const MomentumState<double>& m) { return euler_arnold_rhs(m); }, m0, t, tol);
}

}  // namespace ablab::affine
