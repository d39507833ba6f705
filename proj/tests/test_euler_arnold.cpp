#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <limits>
#include <random>

#include "ablab/euler_arnold.hpp"

using namespace ablab;
using namespace ablab::affine;

namespace {

using G = GroupElement<double>;
using A = AlgebraElement<double>;

// |a - b| within n ulp of the magnitude scale of the computation.
bool ulp_close(double a, double b, double scale, double n = 8.0) {
    return std::abs(a - b) <= n * std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);
}

struct Sampler {
    std::mt19937_64 gen{20240601};
    std::uniform_real_distribution<double> coord{-3.0, 3.0};
    std::uniform_real_distribution<double> positive{0.2, 3.0};
    G group() { return {positive(gen), coord(gen)}; }
    A algebra() { return {coord(gen), coord(gen), false}; }
};

}  // namespace

TEST_CASE("group law and inverse") {
    CHECK(multiply(G{2, 1}, G{3, 4}) == G{6, 9});
    CHECK(inverse(G{2, 1}) == G{0.5, -0.5});
    CHECK(multiply(G{2, 1}, inverse(G{2, 1})) == G::identity());
    CHECK_THROWS_AS((void)inverse(G{0.0, 1.0}), std::domain_error);
    CHECK_FALSE(G{-1.0, 0.0}.valid());
    CHECK(multiply_matrix(G{2, 1}, G{3, 4}) == G{6, 9});
}

TEST_CASE("adjoint and coadjoint actions") {
    const G g{2.0, 3.0};
    CHECK(ad(g, A{1.0, 2.0}) == A{1.0, -3.0 + 4.0, false});
    CHECK(ad(G::identity(), A{1.5, -0.5}) == A{1.5, -0.5, false});
    CHECK(coad(g, A{1.0, 2.0, true}) == A{1.0 - 6.0, 4.0, true});
    CHECK(ad_matrix(g, A{1.0, 2.0}).xi2 == doctest::Approx(1.0));
}

TEST_CASE("brackets") {
    CHECK(bracket(A{1, 0}, A{0, 1}) == A{0, 1, false});
    CHECK(bracket(A{1.5, -2}, A{1.5, -2}) == A{0, 0, false});
    CHECK(coadjoint_bracket(A{1, 2}, A{3, 4, true}) == A{-8, 4, true});
    CHECK(coadjoint_bracket(A{1, 2}, A{3, 0, true}) == A{-0.0, 0, true});
    CHECK(bracket_matrix(A{1, 0}, A{0, 1}) == A{0, 1, false});
}

TEST_CASE("exponential map") {
    CHECK(exp(A{0.0, 2.0}, 1.5) == G{1.0, 3.0});
    const G e = exp(A{1.0, 2.0}, 1.0);
    CHECK(e.a == doctest::Approx(std::exp(1.0)));
    CHECK(e.b == doctest::Approx(2.0 * (std::exp(1.0) - 1.0)));
    // One-parameter subgroup: exp(s xi) exp(t xi) = exp((s + t) xi).
    Sampler s;
    for (int i = 0; i < 100; ++i) {
        const A xi = s.algebra();
        const G lhs = multiply(exp(xi, 0.3), exp(xi, 0.5));
        const G rhs = exp(xi, 0.8);
        CHECK(lhs.a == doctest::Approx(rhs.a).epsilon(1e-13));
        CHECK(lhs.b == doctest::Approx(rhs.b).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("property: algebraic identities hold to a few ulp on random inputs") {
    Sampler s;
    for (int i = 0; i < 1000; ++i) {
        const G g = s.group(), h = s.group();
        const A xi = s.algebra(), eta = s.algebra(), zeta = s.algebra();
        const double scale = 10.0 * (1.0 + std::abs(g.a) + std::abs(g.b)) * (1.0 + std::abs(h.a) + std::abs(h.b)) *
                             (1.0 + std::abs(xi.xi1) + std::abs(xi.xi2)) * (1.0 + std::abs(eta.xi1) + std::abs(eta.xi2)) *
                             (1.0 + std::abs(zeta.xi1) + std::abs(zeta.xi2));

        const G gh = multiply(g, h), gh_m = multiply_matrix(g, h);
        REQUIRE(ulp_close(gh.a, gh_m.a, scale));
        REQUIRE(ulp_close(gh.b, gh_m.b, scale));

        // Ad_{gh} = Ad_g o Ad_h
        const A lhs = ad(gh, eta), rhs = ad(g, ad(h, eta));
        REQUIRE(ulp_close(lhs.xi1, rhs.xi1, scale));
        REQUIRE(ulp_close(lhs.xi2, rhs.xi2, scale));

        const A adm = ad_matrix(g, eta), ada = ad(g, eta);
        REQUIRE(ulp_close(adm.xi1, ada.xi1, scale));
        REQUIRE(ulp_close(adm.xi2, ada.xi2, scale));

        // (Ad*_g xi, eta) = (xi, Ad_g eta)
        const A xi_dual{xi.xi1, xi.xi2, true};
        REQUIRE(ulp_close(pairing(coad(g, xi_dual), eta), pairing(xi_dual, ad(g, eta)), scale));

        // ({xi, zeta}, eta) = (zeta, [xi, eta])
        const A zeta_dual{zeta.xi1, zeta.xi2, true};
        REQUIRE(ulp_close(pairing(coadjoint_bracket(xi, zeta_dual), eta), pairing(zeta_dual, bracket(xi, eta)), scale));

        // Antisymmetry and Jacobi.
        const A ab = bracket(xi, eta), ba = bracket(eta, xi);
        REQUIRE(ab.xi1 == -ba.xi1);
        REQUIRE(ab.xi2 == -ba.xi2);
        const A j1 = bracket(xi, bracket(eta, zeta));
        const A j2 = bracket(eta, bracket(zeta, xi));
        const A j3 = bracket(zeta, bracket(xi, eta));
        REQUIRE(ulp_close(j1.xi1 + j2.xi1 + j3.xi1, 0.0, scale));
        REQUIRE(ulp_close(j1.xi2 + j2.xi2 + j3.xi2, 0.0, scale));

        const A bm = bracket_matrix(xi, eta);
        REQUIRE(ulp_close(bm.xi2, ab.xi2, scale));

        // g g^{-1} = e
        const G one = multiply(g, inverse(g));
        REQUIRE(ulp_close(one.a, 1.0, scale));
        REQUIRE(ulp_close(one.b, 0.0, scale));
    }
}

TEST_CASE("euler-arnold right-hand side is the AB vector field") {
    const MomentumState<double> m{-2.0, 1.0};
    CHECK(euler_arnold_rhs(m) == MomentumState<double>{-1.0, -2.0});
    CHECK(euler_arnold_rhs(MomentumState<double>{-3.0, 0.0}) == MomentumState<double>{-0.0, 0.0});
    CHECK(to_xy(m) == State2{1.0, 2.0});
    CHECK(from_xy(State2{1.0, 2.0}) == m);

    Sampler s;
    std::uniform_real_distribution<double> wide(-1e3, 1e3);
    for (int i = 0; i < 1000; ++i) {
        const MomentumState<double> mi{wide(s.gen), wide(s.gen)};
        const MomentumState<double> d = euler_arnold_rhs(mi);
        // Mapped through (x, y) = (M2, -M1) the two sides are the same polynomial.
        const State2 xy = to_xy(mi);
        const State2 lhs{d(1), -d(0)};
        REQUIRE(lhs == unperturbed_rhs(xy));
    }
    // Also holds in single precision.
    const MomentumState<float> mf{-2.0f, 1.0f};
    CHECK(euler_arnold_rhs(mf) == MomentumState<float>{-1.0f, -2.0f});
}

TEST_CASE("euler-arnold integration follows the unperturbed flow") {
    const MomentumState<double> m0{-4.0, 3.0};
    const MomentumState<double> m = integrate_euler_arnold(m0, 50.0);
    CHECK((m - MomentumState<double>{-5.0, 0.0}).norm() < 1e-4);
    CHECK(std::abs(kinetic_energy(m) - 12.5) < 1e-8);

    const MomentumState<double> still{-2.0, 0.0};
    CHECK(integrate_euler_arnold(still, 10.0) == still);
    CHECK_THROWS_AS((void)integrate_euler_arnold(m0, -1.0), std::invalid_argument);

    Sampler s;
    for (int i = 0; i < 50; ++i) {
        const State2 xy{s.coord(s.gen), s.coord(s.gen)};
        const double t = s.positive(s.gen);
        const State2 flow = flow_unperturbed(xy, t, 1e-12);
        const State2 ea = to_xy(integrate_euler_arnold(from_xy(xy), t, 1e-12));
        CHECK((flow - ea).norm() < 1e-9 * std::max(1.0, xy.norm()));
        CHECK(kinetic_energy(from_xy(flow)) == doctest::Approx(0.5 * energy(flow)));
    }
}
