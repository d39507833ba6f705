#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>
#include <random>
#include <vector>

#include "ablab/limit.hpp"
#include "ablab/model.hpp"
#include "ablab/ode.hpp"
#include "ablab/stats.hpp"

using namespace ablab;

namespace {

ModelParams params(double eps, double x0, double y0, double horizon, Variant v = Variant::dissipative) {
    ModelParams p;
    p.epsilon = eps;
    p.x0 = x0;
    p.y0 = y0;
    p.horizon = horizon;
    p.variant = v;
    return p;
}

std::array<RngStream, 2> silent_streams() { return {RngStream{1, 0}.silenced(), RngStream{1, 1}.silenced()}; }

}  // namespace

TEST_CASE("unperturbed vector field and energy") {
    CHECK(unperturbed_rhs(State2{0, 5}) == State2{0, 0});
    CHECK(unperturbed_rhs(State2{1, 2}) == State2{-2, 1});
    CHECK(unperturbed_rhs(State2{-1, 2}) == State2{2, 1});
    CHECK(energy(State2{0, 0}) == 0.0);
    CHECK(energy(State2{1, 1}) == 2.0);
    CHECK(energy(State2{3, 4}) == 25.0);
    // The templated form also works for other scalar types.
    CHECK(unperturbed_rhs(State2T<float>{1.0f, 2.0f}) == State2T<float>{-2.0f, 1.0f});
}

TEST_CASE("flow of the unperturbed system") {
    CHECK(flow_unperturbed({0, 2}, 17.0) == State2{0, 2});
    const State2 s = flow_unperturbed({3, 4}, 50.0);
    CHECK((s - State2{0, 5}).norm() < 1e-4);
    CHECK(std::abs(energy(s) - 25.0) < 1e-8);
    const State2 u = flow_unperturbed({1e-3, -1}, 50.0);
    CHECK((u - State2{0, 1}).norm() < 1e-3);
    CHECK_THROWS_AS((void)flow_unperturbed({1, 1}, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("closed-form fast flow agrees with the adaptive integrator") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> coord(-5.0, 5.0), time(0.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const State2 s{coord(gen), coord(gen)};
        const double t = time(gen);
        const State2 a = fast_flow_exact(s, t);
        const State2 b = flow_unperturbed(s, t, 1e-13);
        CAPTURE(s.transpose());
        CHECK((a - b).norm() < 1e-8 * std::max(1.0, s.norm()));
        CHECK(std::abs(energy(a) - energy(s)) < 1e-12 * std::max(1.0, energy(s)));
    }
    // Huge fast times do not overflow.
    const State2 far = fast_flow_exact({3, -4}, 1e8);
    CHECK(std::isfinite(far.x()));
    CHECK(far.y() == doctest::Approx(5.0));
    // Subnormal x next to the axis stays finite.
    const State2 tiny = fast_flow_exact({1e-320, 4.0}, 1.0);
    CHECK(std::isfinite(tiny.x()));
    CHECK(tiny.y() == 4.0);
    CHECK(std::isfinite(fast_flow_exact({-1e-320, -4.0}, 1.0).x()));
}

TEST_CASE("projection operator") {
    CHECK(project_pi({0, 2}) == 2.0);
    CHECK(project_pi({3, 4}) == 5.0);
    CHECK(project_pi({0, -2}) == 2.0);
    CHECK(project_pi({0, 0}) == 0.0);
    CHECK(std::abs(project_pi_by_flow({3, 4}) - 5.0) < 1e-4);
    CHECK(project_pi_by_flow({0, 0}) == 0.0);
    // The extension below the axis does not depend on kappa.
    for (double kappa : {1e-1, 1e-2, 1e-3}) CHECK(std::abs(project_pi_by_flow({0, -2}, 80.0, kappa) - 2.0) < 1e-4);
}

TEST_CASE("property: projection matches the flow limit for random starts") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> energy_dist(0.1, 100.0), angle(-std::numbers::pi, std::numbers::pi);
    int checked = 0;
    while (checked < 100) {
        const double r = std::sqrt(energy_dist(gen));
        const double a = angle(gen);
        const State2 s{r * std::cos(a), r * std::sin(a)};
        if (s.x() == 0.0) continue;
        CAPTURE(s.transpose());
        // Starts close to the unstable half-axis need longer to leave it.
        const double t = 50.0 + 20.0 / r;
        CHECK(std::abs(project_pi(s) - project_pi_by_flow(s, t)) < 1e-3);
        ++checked;
    }
}

TEST_CASE("property: energy is conserved along the flow for t <= 100") {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> coord(-70.0, 70.0);
    for (int i = 0; i < 30; ++i) {
        State2 s{coord(gen), coord(gen)};
        if (energy(s) > 1e4) s *= 99.0 / s.norm();
        const double e0 = energy(s);
        double worst = 0.0;
        integrate_dopri5<State2>([](const State2& v) { return unperturbed_rhs(v); }, s, 100.0, 1e-12,
                                 [&](double, const State2& v) {
                                     worst = std::max(worst, std::abs(energy(v) - e0) / std::max(e0, 1.0));
                                 });
        CAPTURE(s.transpose());
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("rescaled and slow-time drifts") {
    ModelParams p = params(0.1, 0, 0, 1);
    CHECK(rescaled_drift(State2{0, 3}, p) == State2{0, -3});
    CHECK(rescaled_drift(State2{1, 1}, p).isApprox(State2{-11, 9}, 1e-14));
    p.variant = Variant::no_dissipation;
    CHECK(rescaled_drift(State2{1, 1}, p).isApprox(State2{-10, 10}, 1e-14));
    const ModelParams one = params(1.0, 0, 0, 1);
    CHECK(slowtime_drift(State2{2, 3}, one) == State2{-6 - 2, 4 - 3});
}

TEST_CASE("model parameters are validated") {
    ModelParams p;
    CHECK_NOTHROW(p.validate());
    CHECK(p.delta() == doctest::Approx(std::pow(0.01, 0.1)));
    p.epsilon = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ModelParams{};
    p.alpha = 1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ModelParams{};
    p.horizon = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK(parse_variant("no-dissipation") == Variant::no_dissipation);
    CHECK(parse_scheme("frozen-ou") == Scheme::frozen_ou);
    CHECK_THROWS_AS((void)parse_scheme("rk4"), std::invalid_argument);
}

TEST_CASE("rescaled system: X is small near the stable axis") {
    const ModelParams p = params(0.01, 0.0, 2.0, 1.0);
    const TimeGrid g(1.0, 1e-4);
    std::vector<double> x2(1000);
    for (std::size_t r = 0; r < x2.size(); ++r) {
        const PathSample path = simulate_rescaled(p, g, replica_streams(42, r));
        REQUIRE_FALSE(path.diverged);
        const double x = path.states(static_cast<Eigen::Index>(path.size() - 1), 0);
        x2[r] = x * x;
    }
    CHECK(summarize(x2).estimate <= 5.0 * std::pow(0.01, 0.9));
}

TEST_CASE("rescaled system without noise: fast projection then slow decay") {
    const double eps = 1e-3;
    const ModelParams p = params(eps, 3.0, 4.0, 1.0);
    for (Scheme scheme : {Scheme::exact_splitting, Scheme::frozen_ou}) {
        const double h = scheme == Scheme::exact_splitting ? 1e-3 : 1e-6;
        const PathSample path = simulate_rescaled(p, TimeGrid(1.0, h), silent_streams(), scheme);
        REQUIRE_FALSE(path.diverged);
        const auto last = static_cast<Eigen::Index>(path.size() - 1);
        CAPTURE(to_string(scheme));
        CHECK(std::abs(path.states(last, 0)) < 10 * eps);
        CHECK(std::abs(path.states(last, 1) - 5.0 * std::exp(-1.0)) < 10 * eps);
    }
    // Reference by direct fine-step integration of the drift.
    State2 s{3.0, 4.0};
    const double h = 1e-6;
    for (int k = 0; k < 1000000; ++k) s += h * rescaled_drift(s, p);
    const PathSample path = simulate_rescaled(p, TimeGrid(1.0, 1e-3), silent_streams());
    CHECK(std::abs(path.y(path.size() - 1) - s.y()) < 10 * eps);
}

TEST_CASE("rescaled system: determinism and scheme tag") {
    const ModelParams p = params(0.05, 0.5, 1.0, 0.5);
    const TimeGrid g(0.5, 1e-3);
    const PathSample a = simulate_rescaled(p, g, replica_streams(9, 3));
    const PathSample b = simulate_rescaled(p, g, replica_streams(9, 3));
    CHECK(a.states == b.states);
    CHECK(a.scheme == "exact-splitting");
    CHECK(a.size() == g.n_steps() + 1);
    CHECK(a.streams.size() == 2);
}

TEST_CASE("explicit euler-maruyama on the rescaled system diverges when h is far above eps") {
    const ModelParams p = params(1e-4, 1.0, -1.0, 1.0);
    const PathSample path = simulate_rescaled(p, TimeGrid(1.0, 1e-2), replica_streams(1, 0), Scheme::euler_maruyama);
    CHECK(path.diverged);
    // The exact splitting is unconditionally stable on the same grid.
    CHECK_FALSE(simulate_rescaled(p, TimeGrid(1.0, 1e-2), replica_streams(1, 0)).diverged);
}

TEST_CASE("property: mirroring x0 and the X noise mirrors the path exactly") {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    for (int i = 0; i < 20; ++i) {
        const ModelParams p = params(0.02, coord(gen), coord(gen), 0.5);
        ModelParams q = p;
        q.x0 = -p.x0;
        const auto streams = replica_streams(99, static_cast<std::uint64_t>(i));
        const std::array<RngStream, 2> mirrored{streams[0].mirrored(), streams[1]};
        for (Scheme scheme : {Scheme::exact_splitting, Scheme::frozen_ou, Scheme::euler_maruyama}) {
            const TimeGrid g(0.5, scheme == Scheme::exact_splitting ? 1e-3 : 1e-4);
            const PathSample a = simulate_rescaled(p, g, streams, scheme);
            const PathSample b = simulate_rescaled(q, g, mirrored, scheme);
            CAPTURE(to_string(scheme));
            CHECK(a.diverged == b.diverged);
            CHECK(a.states.col(0) == -b.states.col(0));
            CHECK(a.states.col(1) == b.states.col(1));
        }
    }
}

TEST_CASE("slow-time system") {
    const ModelParams p = params(0.1, 0.0, 2.0, 5.0);
    const PathSample path = simulate_slowtime(p, TimeGrid(5.0, 1e-2), silent_streams());
    for (std::size_t k = 0; k < path.size(); k += 50)
        CHECK(path.y(k) == doctest::Approx(2.0 * std::exp(-0.1 * path.t(k))).epsilon(1e-12));
}

TEST_CASE("time change: slow-time path at step h/eps equals the rescaled path at step h") {
    const double eps = 0.05;
    const ModelParams p = params(eps, 1.0, 0.5, 1.0);
    ModelParams slow = p;
    slow.horizon = 1.0 / eps;
    const auto streams = replica_streams(3, 8);
    const PathSample fast = simulate_rescaled(p, TimeGrid(1.0, 1e-3), streams);
    const PathSample slowp = simulate_slowtime(slow, TimeGrid(1.0 / eps, 1e-3 / eps), streams);
    REQUIRE(fast.size() == slowp.size());
    CHECK((fast.states - slowp.states).cwiseAbs().maxCoeff() < 1e-10);

    // And in law: terminal Y over independent replicas.
    std::vector<double> a(2000), b(2000);
    for (std::size_t r = 0; r < a.size(); ++r) {
        a[r] = simulate_rescaled(p, TimeGrid(1.0, 1e-3), replica_streams(4, r)).y(1000);
        b[r] = simulate_slowtime(slow, TimeGrid(1.0 / eps, 1e-3 / eps), replica_streams(5, r)).y(1000);
    }
    CHECK(ks_two_sample(a, b) < ks_critical_two_sample(a.size(), b.size()));
}

TEST_CASE("polar coordinates follow the reflected arctan branch") {
    PathSample path{TimeGrid(3.0, 1.0), Eigen::MatrixXd(4, 2), {}, "synthetic"};
    path.states << 0, 2, 1, 1, -1, 1, 0, 0;
    const PathSample polar = to_polar(path);
    CHECK(polar.states(0, 0) == 2.0);
    CHECK(polar.states(0, 1) == doctest::Approx(std::numbers::pi / 2));
    CHECK(polar.states(1, 0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(polar.states(1, 1) == doctest::Approx(std::numbers::pi / 4));
    CHECK(polar.states(2, 1) == doctest::Approx(std::numbers::pi / 4));
    CHECK(polar.states(3, 1) == polar.states(2, 1));
    CHECK(polar.flagged == std::vector<std::size_t>{3});

    PathSample one{TimeGrid(1.0, 1.0), Eigen::MatrixXd::Zero(2, 1), {}, "1d"};
    CHECK_THROWS_AS((void)to_polar(one), std::invalid_argument);
}

TEST_CASE("property: radius law is the damped radial process for any eps") {
    const std::size_t n = 4000;
    for (double eps : {1.0, 0.1}) {
        const ModelParams p = params(eps, 3.0, 4.0, 1.0);
        std::vector<double> r2d(n), lim(n);
        for (std::size_t r = 0; r < n; ++r) {
            const PathSample path = simulate_rescaled(p, TimeGrid(1.0, 1e-2), replica_streams(61, r));
            const auto last = static_cast<Eigen::Index>(path.size() - 1);
            r2d[r] = path.states.row(last).norm();
            lim[r] = sample_limit_terminal(5.0, 1.0, replica_streams(62, r));
        }
        CAPTURE(eps);
        CHECK(ks_two_sample(r2d, lim) < ks_critical_two_sample(n, n));
    }
}
