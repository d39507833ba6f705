#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ablab/pde.hpp"

using namespace ablab;

namespace {

double moment_solution(double t, double y) { return 1.0 + (y * y - 1.0) * std::exp(-2.0 * t); }

double square_error(std::size_t n_points, PdeScheme scheme = PdeScheme::explicit_euler) {
    const Grid1D g = Grid1D::make(n_points, 1.0);
    const PDESolution s = solve_limit_pde(catalog::square(), g, {}, scheme);
    double worst = 0.0;
    for (std::size_t j = 0; g.y(j) <= 3.0 + 1e-12; ++j)
        worst = std::max(worst, std::abs(s.u(1, static_cast<Eigen::Index>(j)) - moment_solution(1.0, g.y(j))));
    return worst;
}

}  // namespace

TEST_CASE("grid construction and validation") {
    const Grid1D g = Grid1D::make(601, 1.0);
    CHECK(g.dy == doctest::Approx(0.01));
    CHECK(g.dt <= g.stable_dt());
    CHECK(g.dt <= g.dy * g.dy / (1.0 + g.max_abs_drift() * g.dy));
    CHECK(g.y(600) == doctest::Approx(6.0));
    CHECK_THROWS_AS((void)Grid1D::make(601, 1.0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS((void)Grid1D::make(3, 1.0), std::invalid_argument);
    Grid1D bad = g;
    bad.dt = 2.0 * g.stable_dt();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_NOTHROW(bad.validate(false));
    bad.dy = 0.02;
    CHECK_THROWS_AS(bad.validate(false), std::invalid_argument);
}

TEST_CASE("constants are preserved") {
    const Grid1D g = Grid1D::make(301, 2.0);
    for (PdeScheme scheme : {PdeScheme::explicit_euler, PdeScheme::crank_nicolson}) {
        const PDESolution s = solve_limit_pde(catalog::constant(1.0), g, {0.5, 1.0, 2.0}, scheme);
        CHECK(s.times == std::vector<double>{0.0, 0.5, 1.0, 2.0});
        CHECK((s.u.array() - 1.0).abs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("second moment surface 1 + (y^2 - 1) exp(-2t)") {
    CHECK(square_error(601) <= 1e-3);
    CHECK(square_error(601, PdeScheme::crank_nicolson) <= 1e-3);
    const Grid1D g = Grid1D::make(601, 2.0);
    const PDESolution s = solve_limit_pde(catalog::square(), g, {0.5, 1.0, 2.0});
    for (double t : {0.5, 1.0, 2.0})
        for (double y : {0.0, 0.5, 1.5, 2.5}) CHECK(std::abs(s.value(t, y) - moment_solution(t, y)) <= 1e-3);
}

TEST_CASE("property: grid refinement reduces the error about fourfold") {
    const double e1 = square_error(301);
    const double e2 = square_error(601);
    const double e3 = square_error(1201);
    CAPTURE(e1);
    CAPTURE(e2);
    CAPTURE(e3);
    CHECK(e1 / e2 >= 3.0);
    CHECK(e1 / e2 <= 5.0);
    CHECK(e2 / e3 >= 3.0);
    CHECK(e2 / e3 <= 5.0);
}

TEST_CASE("property: maximum principle") {
    for (const TestFunction& f : {catalog::gaussian(), catalog::lorentzian(), catalog::cos_square()}) {
        const Grid1D g = Grid1D::make(301, 3.0);
        const PDESolution s = solve_limit_pde(f, g, {0.1, 0.5, 1.0, 2.0, 3.0});
        double lo = f(0.0), hi = f(0.0);
        for (std::size_t j = 0; j < g.n_points; ++j) {
            lo = std::min(lo, f(g.y(j)));
            hi = std::max(hi, f(g.y(j)));
        }
        CAPTURE(f.name);
        CHECK(s.u.minCoeff() >= lo - 1e-12);
        CHECK(s.u.maxCoeff() <= hi + 1e-12);
        CHECK(s.u.allFinite());
        CHECK(s.singular_node_ok);
    }
}

TEST_CASE("snapshots and interpolation") {
    const Grid1D g = Grid1D::make(301, 1.0);
    const PDESolution s = solve_limit_pde(catalog::gaussian(), g, {0.25, 1.0});
    CHECK(s.index_of(0.25) == 1);
    CHECK(s.value(0.0, 0.5) == doctest::Approx(std::exp(-0.25)).epsilon(1e-3));
    CHECK_THROWS_AS((void)s.index_of(0.3), std::out_of_range);
    CHECK_THROWS_AS((void)s.value(1.0, 7.0), std::out_of_range);
    CHECK(s.initial == "f1_gaussian");
}

TEST_CASE("crank-nicolson agrees with the explicit scheme") {
    const Grid1D g = Grid1D::make(601, 1.0);
    const PDESolution a = solve_limit_pde(catalog::gaussian(), g);
    const PDESolution b = solve_limit_pde(catalog::gaussian(), g, {}, PdeScheme::crank_nicolson);
    CHECK((a.u.row(1) - b.u.row(1)).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("feynman-kac representation") {
    MonteCarloOptions o;
    o.replicas = 100000;
    const StatReport one = feynman_kac_mc(1.3, 0.7, catalog::constant(1.0), o);
    CHECK(one.estimate == 1.0);
    CHECK(one.std_error == 0.0);
    const StatReport sq = feynman_kac_mc(2.0, 1.0, catalog::square(), o);
    CHECK(std::abs(sq.estimate - (1.0 + 3.0 * std::exp(-2.0))) <= 3.0 * sq.std_error);
    CHECK(feynman_kac_mc(1.5, 0.0, catalog::gaussian(), o).estimate == doctest::Approx(std::exp(-2.25)).epsilon(1e-12));
}

TEST_CASE("property: solver agrees with feynman-kac at 20 probes") {
    const TestFunction f = catalog::gaussian();
    const Grid1D g = Grid1D::make(601, 1.0);
    const PDESolution s = solve_limit_pde(f, g, {0.5, 1.0});
    MonteCarloOptions o;
    o.replicas = 100000;
    o.seed = 3;
    for (double t : {0.5, 1.0})
        for (double y : {0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
            const StatReport mc = feynman_kac_mc(y, t, f, o);
            CAPTURE(t);
            CAPTURE(y);
            CHECK(std::abs(mc.estimate - s.value(t, y)) <= 3.0 * mc.std_error + 1e-3);
        }
}

TEST_CASE("two-dimensional cauchy problem") {
    ModelParams p;
    p.epsilon = 1e-3;
    MonteCarloOptions o;
    o.replicas = 2000;
    o.step = 1e-4;
    const CauchyReport one = cauchy_2d_mc(3.0, 4.0, 1.0, [](double, double) { return 1.0; }, p, o);
    CHECK(one.mc.estimate == 1.0);
    CHECK(one.y_pi == 5.0);
    CHECK_FALSE(one.pde.has_value());

    const Grid1D g = Grid1D::make(601, 1.0);
    const PDESolution ref = solve_limit_pde(catalog::gaussian(), g);
    const CauchyReport r =
        cauchy_2d_mc(3.0, 4.0, 1.0, [](double, double y) { return std::exp(-y * y); }, p, o, &ref);
    REQUIRE(r.pde.has_value());
    CHECK(std::abs(r.mc.estimate - *r.pde) <= 3.0 * r.mc.std_error + 0.02);
}
