#include <doctest.h>

#include "park/safety.hpp"
#include "park/sim.hpp"
#include "test_util.hpp"

using namespace park;

TEST_CASE("non-overshooting law matches reference values") {
    const InputPair u = nonovershoot_control({{1, 0.5, 1, 1}}, {1, kPi / 2, 0.2});
    CHECK(u.v == doctest::Approx(0.98006657784124163112).epsilon(1e-14));
    CHECK(u.omega == doctest::Approx(5.8780764332311458817).epsilon(1e-13));
}

TEST_CASE("psi_doubled matches its quotient form") {
    test::StateSampler gen(41);
    for (int i = 0; i < 500; ++i) {
        const double z = gen.uniform(-2, 2), g = gen.uniform(-2, 2);
        if (std::abs(z) < 1e-3) continue;
        const double direct = (std::sin(2 * z - 2 * g) + std::sin(2 * g)) / (2 * z);
        CHECK(psi_doubled(z, g) == doctest::Approx(direct).epsilon(1e-12).scale(1.0));
    }
    CHECK(psi_doubled(0.0, 0.3) == doctest::Approx(std::cos(0.6)));
}

TEST_CASE("z obeys a linear decay along the closed loop") {
    // dz/dt = -(k4 + (k3/k2) psi_d^2 N (1 + t^2)) z with N = sqrt(1 + 16 k2^2 t^2)
    test::StateSampler gen(42);
    for (int i = 0; i < 500; ++i) {
        const ClfGains g{gen.uniform(0.2, 3), gen.uniform(0.05, 3), gen.uniform(0.2, 3), gen.uniform(0.2, 3)};
        const PolarState s = gen.state(0.05, 3, 2.8, 2.8);
        const InputPair u = nonovershoot_control({g}, s);
        const PolarDerivative d = polar_dynamics(s, u);
        const double t = std::tan(0.5 * s.delta);
        const double z = safety_z(g.k2, s);
        const double dz_ddelta = g.k2 * (1 + t * t) / (1 + 16 * g.k2 * g.k2 * t * t);
        const double zdot = d.gamma_dot + dz_ddelta * d.delta_dot;
        const double pd = psi_doubled(z, s.gamma);
        const double rate = g.k4 + g.k3 / g.k2 * pd * pd * std::sqrt(1 + 16 * g.k2 * g.k2 * t * t) * (1 + t * t);
        CHECK(zdot == doctest::Approx(-rate * z).epsilon(1e-9).scale(1.0));

        const ClfSpec clf{ClfKind::BarFliSafety, g};
        const Gradient gr = clf_gradient(clf, s);
        CHECK(gr.d_rho * d.rho_dot + gr.d_delta * d.delta_dot + gr.d_gamma * d.gamma_dot < 0.0);
    }
}

TEST_CASE("admissible k2 interval examples") {
    K2Interval k = k2_admissible_interval(kPi / 2, 0.0);
    CHECK(k.lo == doctest::Approx(0.0));
    CHECK(std::isinf(k.hi));

    k = k2_admissible_interval(kPi / 2, 0.2);
    CHECK(k.lo == doctest::Approx(0.0));
    CHECK(k.hi == doctest::Approx(std::tan(kPi / 2 - 0.4) / 4));

    k = k2_admissible_interval(kPi / 2, -0.2);
    CHECK(k.lo == doctest::Approx(std::tan(0.4) / 4));
    CHECK(std::isinf(k.hi));

    CHECK(k2_midpoint(kPi / 2, 0.2) == doctest::Approx(std::tan((kPi / 2 - 0.4) / 2) / 4));
    CHECK(k2_midpoint(kPi / 2, -0.2) == doctest::Approx(std::tan((0.4 + kPi / 2) / 2) / 4));

    CHECK_THROWS_AS(k2_admissible_interval(-0.5, 0.0), InadmissibleInitialCondition);
    CHECK_THROWS_AS(k2_admissible_interval(0.5, kPi / 4), InadmissibleInitialCondition);
    CHECK_THROWS_AS(k2_admissible_interval(kPi, 0.0), InadmissibleInitialCondition);
}

TEST_CASE("midpoint gain puts z0 at pi/8 + gamma0/2, inside (0, pi/4)") {
    for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) {
            const double delta0 = 0.05 + (kPi - 0.1) * i / 19.0;
            const double gamma0 = -kPi / 4 + 0.02 + (kPi / 2 - 0.04) * j / 19.0;
            const K2Interval k = k2_admissible_interval(delta0, gamma0);
            const double k2 = k2_midpoint(delta0, gamma0);
            CHECK(k2 > k.lo);
            CHECK(k2 < k.hi);
            const double z0 = safety_z(k2, {1, delta0, gamma0});
            CHECK(z0 > 0.0);
            CHECK(z0 < kPi / 4);
            CHECK(z0 == doctest::Approx(kPi / 8 + gamma0 / 2).epsilon(1e-12));
        }
    }
}

TEST_CASE("curb metrics of an empty trajectory are zero") {
    const CurbMetrics m = curb_metrics(Trajectory{});
    CHECK(m.min_y == 0.0);
    CHECK(m.min_v == 0.0);
}

TEST_CASE("negative control: a GES law overshoots the curb that the safety law respects") {
    // Same start on the curb-safe side (delta0 in (0, pi) means y < 0).
    Scenario ges;
    ges.controller = GesControllerSpec{Direction::Unidirectional, {}};
    ges.initial = {1, kPi / 2, 0.0};
    ges.horizon = 20;
    const Trajectory crossed = integrate(ges);
    CHECK(crossed.extrema.max_y > 1e-3);
    CHECK(crossed.extrema.min_delta < -1e-3);

    Scenario safe;
    safe.controller = SafetySpec{{1, k2_midpoint(kPi / 2, 0.0), 1, 1}};
    safe.initial = ges.initial;
    safe.horizon = 200;
    safe.scheme = Scheme::Rosenbrock;
    safe.rtol = 1e-8;
    safe.atol = 1e-12;
    safe.rho_floor = 1e-6;  // rho converges long before the heading does
    const Trajectory kept = integrate(safe);
    CHECK(kept.extrema.max_y <= 1e-6);
    CHECK(kept.extrema.min_v >= -1e-9);
    CHECK(kept.extrema.min_delta >= -1e-9);
    CHECK(norm(kept.back().state) < 1e-3);
}

TEST_CASE("bundled large-gain corners sit inside their admissible intervals") {
    // (gamma0, delta0, k2) as in the bundled scenarios
    const double cases[][3] = {{-0.5, 0.0043378109941048544707, 392.85},
                               {-0.3, 0.0042873088312727948479, 221.09},
                               {0.2, 0.0025965955236286266834, 127.65}};
    for (const auto& c : cases) {
        const K2Interval k = k2_admissible_interval(c[1], c[0]);
        CHECK(c[2] > k.lo);
        CHECK(c[2] < k.hi);
        CHECK(k2_midpoint(c[1], c[0]) == doctest::Approx(c[2]).epsilon(1e-12));
    }
}
