#include "doctest.h"

#include "spaql/metric_space.hpp"
#include "spaql/rng.hpp"

#include <cmath>
#include <stdexcept>

using namespace spaql;

TEST_CASE("squash matches tanh(m*y)") {
    CHECK(squash(1.0 / 240.0, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(squash(1.0 / 240.0, 240.0) == doctest::Approx(0.7615941559557649).epsilon(1e-12));
    CHECK(squash(1.0 / 21.0, -21.0) == doctest::Approx(-0.7615941559557649).epsilon(1e-12));
    Rng rng(17);
    for (int i = 0; i < 1000; ++i) {
        double m = rng.uniform(1e-3, 2.0);
        double y = rng.uniform(-18.0 / m, 18.0 / m);  // |tanh| < 1 holds in doubles up to ~18
        CHECK(squash(m, y) == doctest::Approx(std::tanh(m * y)).epsilon(1e-12));
        CHECK(std::abs(squash(m, y)) < 1.0);
    }
    CHECK_THROWS_AS(squash(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(squash(-0.5, 1.0), std::invalid_argument);
}

TEST_CASE("normalize_angle maps into (-pi, pi]") {
    CHECK(normalize_angle(0.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(normalize_angle(3.0 * M_PI) == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK(normalize_angle(-1.5 * M_PI) == doctest::Approx(0.5 * M_PI).epsilon(1e-12));
    CHECK(normalize_angle(M_PI) == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK(normalize_angle(-M_PI) == doctest::Approx(M_PI).epsilon(1e-12));

    Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        double th = rng.uniform(-50.0, 50.0);
        double m = normalize_angle(th);
        CHECK(m > -M_PI);
        CHECK(m <= M_PI);
        // idempotent and 2*pi periodic
        CHECK(normalize_angle(m) == doctest::Approx(m).epsilon(1e-12));
        CHECK(normalize_angle(th + 2.0 * M_PI) == doctest::Approx(m).epsilon(1e-9));
        // same angle: sin/cos agree
        CHECK(std::sin(m) == doctest::Approx(std::sin(th)).epsilon(1e-9));
        CHECK(std::cos(m) == doctest::Approx(std::cos(th)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(normalize_angle(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
}

TEST_CASE("state_distance is the sup metric") {
    StateVec a{1.0, 0.0, 0.0};
    StateVec b{-1.0, 0.0, 0.0};
    CHECK(state_distance(a.span(), b.span()) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(state_distance(a.span(), a.span()) == 0.0);
    StateVec c{0.2, -0.3};
    CHECK_THROWS_AS(state_distance(a.span(), c.span()), std::invalid_argument);
}

TEST_CASE("distance on standard points") {
    SpaceSpec pend = pendulum_space();
    StandardPoint p({1.0, 0.0, 0.0}, Action::continuous(0.0));
    StandardPoint q({-1.0, 0.0, 0.0}, Action::continuous(0.0));
    CHECK(distance(pend, p, q) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(distance(pend, p, p) == 0.0);

    SpaceSpec cart = cartpole_space();
    StandardPoint u({0.1, 0.0, 0.0, 0.0}, Action::categorical(0));
    StandardPoint v({0.1, 0.0, 0.0, 0.0}, Action::categorical(1));
    CHECK(distance(cart, u, v) == doctest::Approx(2.0).epsilon(1e-15));
    StandardPoint w({0.3, 0.0, 0.0, 0.0}, Action::categorical(1));
    CHECK(distance(cart, u, w) == doctest::Approx(2.0).epsilon(1e-15));  // max(0.2, 2)
    CHECK(distance(cart, v, w) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("distance satisfies the metric axioms") {
    SpaceSpec pend = pendulum_space();
    Rng rng(99);
    auto rand_pt = [&]() {
        StateVec s;
        for (int j = 0; j < pend.state_dims(); ++j) s.push_back(rng.uniform(-1.0, 1.0));
        return StandardPoint(s, Action::continuous(rng.uniform(-1.0, 1.0)));
    };
    for (int i = 0; i < 10000; ++i) {
        StandardPoint x = rand_pt(), y = rand_pt(), z = rand_pt();
        double dxy = distance(pend, x, y);
        double dyx = distance(pend, y, x);
        double dxz = distance(pend, x, z);
        double dzy = distance(pend, z, y);
        CHECK(dxy >= 0.0);
        CHECK(dxy == dyx);
        CHECK(dxy <= dxz + dzy + 1e-12);
    }
    // identity of indiscernibles
    StandardPoint x = rand_pt();
    CHECK(distance(pend, x, x) == 0.0);
}

TEST_CASE("pendulum observation mapping") {
    StateVec obs = pendulum_to_standard(1.0, 0.0, 8.0);
    REQUIRE(obs.size() == 3);
    CHECK(obs[0] == doctest::Approx(1.0));
    CHECK(obs[1] == doctest::Approx(0.0));
    CHECK(obs[2] == doctest::Approx(1.0));
    // angular velocity beyond the physical cap still lands inside the cube
    StateVec fast = pendulum_to_standard(0.0, 1.0, 9.5);
    CHECK(fast[2] == doctest::Approx(1.0));
    StateVec slow = pendulum_to_standard(0.0, -1.0, -4.0);
    CHECK(slow[2] == doctest::Approx(-0.5));
}

TEST_CASE("standard action to torque") {
    CHECK(standard_to_torque(0.0) == doctest::Approx(0.0));
    CHECK(standard_to_torque(-1.0) == doctest::Approx(-2.0));
    CHECK(standard_to_torque(0.5) == doctest::Approx(1.0));
    CHECK(standard_to_torque(1.5) == doctest::Approx(2.0));  // clamped
}

TEST_CASE("cartpole observation mapping") {
    StateVec zero = cartpole_to_standard(0.0, 0.0, 0.0, 0.0);
    REQUIRE(zero.size() == 4);
    for (double v : zero) CHECK(v == doctest::Approx(0.0));

    StateVec edge = cartpole_to_standard(4.8, 0.0, 0.0, 0.0);
    CHECK(edge[0] == doctest::Approx(1.0).epsilon(1e-12));

    StateVec fast = cartpole_to_standard(0.0, 240.0, 0.0, 0.0);
    CHECK(fast[1] == doctest::Approx(0.7615941559557649).epsilon(1e-12));

    double theta_lim = 24.0 * M_PI / 180.0;
    StateVec tilted = cartpole_to_standard(0.0, 0.0, theta_lim, 0.0);
    CHECK(tilted[2] == doctest::Approx(1.0).epsilon(1e-12));

    // positions clamp, velocities squash: everything stays inside the cube
    Rng rng(5);
    for (int i = 0; i < 2000; ++i) {
        StateVec s = cartpole_to_standard(rng.uniform(-20.0, 20.0), rng.uniform(-500.0, 500.0),
                                          rng.uniform(-2.0, 2.0), rng.uniform(-100.0, 100.0));
        for (double v : s) {
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }
    }
    StateVec clamped = cartpole_to_standard(6.0, 0.0, -1.0, 0.0);
    CHECK(clamped[0] == doctest::Approx(1.0));
    CHECK(clamped[2] == doctest::Approx(-1.0));
}

TEST_CASE("space factories") {
    SpaceSpec pend = pendulum_space();
    CHECK(pend.state_dims() == 3);
    CHECK(pend.action_kind() == ActionKind::kContinuous);
    CHECK(pend.raw_action_scale() == doctest::Approx(2.0));

    SpaceSpec pd = pendulum_discrete_space();
    CHECK(pd.state_dims() == 3);
    CHECK(pd.action_kind() == ActionKind::kCategorical);
    REQUIRE(pd.num_actions() == 5);
    CHECK(pd.categorical_actions()[0] == doctest::Approx(-2.0));
    CHECK(pd.categorical_actions()[4] == doctest::Approx(2.0));

    SpaceSpec cart = cartpole_space();
    CHECK(cart.state_dims() == 4);
    CHECK(cart.action_kind() == ActionKind::kCategorical);
    CHECK(cart.num_actions() == 2);
}

TEST_CASE("StandardPoint clamps coordinates into the cube") {
    SpaceSpec pend = pendulum_space();
    StandardPoint p({1.5, -2.0, 0.3}, Action::continuous(3.0));
    CHECK(p.coords[0] == doctest::Approx(1.0));
    CHECK(p.coords[1] == doctest::Approx(-1.0));
    CHECK(p.coords[2] == doctest::Approx(0.3));
    CHECK(p.action.value == doctest::Approx(1.0));
}
