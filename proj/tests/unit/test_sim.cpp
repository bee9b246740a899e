#include <doctest.h>

#include "park/sim.hpp"
#include "test_util.hpp"

using namespace park;

namespace {

Scenario ges_scenario(Direction d, PolarState initial, double horizon, double dt) {
    Scenario sc;
    sc.controller = GesControllerSpec{d, {}};
    sc.initial = initial;
    sc.horizon = horizon;
    sc.dt = dt;
    return sc;
}

double distance(const PolarState& a, const PolarState& b) {
    return std::sqrt((a.rho - b.rho) * (a.rho - b.rho) + (a.delta - b.delta) * (a.delta - b.delta) +
                     (a.gamma - b.gamma) * (a.gamma - b.gamma));
}

}  // namespace

TEST_CASE("zero controller leaves the state in place") {
    Scenario sc;
    sc.initial = {1.5, 0.3, -0.2};
    sc.horizon = 1.0;
    sc.dt = 0.01;
    const Trajectory tr = integrate(sc);
    CHECK(tr.status == RunStatus::Completed);
    CHECK(tr.samples.size() == 101);
    CHECK(tr.back().t == doctest::Approx(1.0));
    CHECK(tr.back().state.rho == 1.5);
    CHECK(tr.back().state.delta == 0.3);
    CHECK(tr.back().state.gamma == -0.2);
    CHECK(tr.extrema.max_abs_v == 0.0);
}

TEST_CASE("RK4 converges at fourth order") {
    const PolarState s0{1, 0.8, -0.5};
    auto final_state = [&](double dt) {
        return integrate(ges_scenario(Direction::Bidirectional, s0, 1.0, dt)).back().state;
    };
    const PolarState a = final_state(0.1), b = final_state(0.05), c = final_state(0.025);
    const double ratio = distance(a, b) / distance(b, c);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
}

TEST_CASE("adaptive schemes agree with RK4") {
    const PolarState s0{1, -2.0, 1.0};
    const PolarState ref = integrate(ges_scenario(Direction::Bidirectional, s0, 2.0, 1e-4)).back().state;
    for (Scheme scheme : {Scheme::Dopri5, Scheme::Rosenbrock}) {
        Scenario sc = ges_scenario(Direction::Bidirectional, s0, 2.0, 1e-3);
        sc.scheme = scheme;
        sc.rtol = 1e-10;
        sc.atol = 1e-12;
        const Trajectory tr = integrate(sc);
        CHECK(tr.back().t == doctest::Approx(2.0));
        CHECK(distance(tr.back().state, ref) < 1e-6);
    }
}

TEST_CASE("exponential fit recovers a synthetic rate") {
    Trajectory tr;
    for (int i = 0; i <= 1000; ++i) {
        Sample s;
        s.t = 0.01 * i;
        const double r = 3.0 * std::exp(-2.0 * s.t);
        s.state = {r * 0.6, r * 0.8, 0.0};
        tr.samples.push_back(s);
    }
    const ExponentialFit fit = fit_exponential(tr);
    CHECK(fit.lambda == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(fit.K == doctest::Approx(1.0).epsilon(1e-6));

    Trajectory flat;
    flat.samples.resize(50);
    for (auto& s : flat.samples) s.state = {1, 0, 0};
    CHECK_THROWS_AS(fit_exponential(flat), InsufficientDecay);
}

TEST_CASE("Lyapunov certificate holds and its negative control fails") {
    const Scenario sc = ges_scenario(Direction::Bidirectional, {1, -4 * kPi / 5, kPi}, 20, 1e-3);
    const Trajectory tr = integrate(sc);
    CHECK(verify_lyapunov(tr, controller_decay_constant(sc.controller)).passed);
    // claiming a rate three times faster than certified must be caught
    CHECK_FALSE(verify_lyapunov(tr, 3.0 * controller_decay_constant(sc.controller)).passed);

    // an increasing V channel must be caught as well
    Trajectory flipped = integrate(ges_scenario(Direction::Bidirectional, {1, 0.5, 0.3}, 2, 1e-3));
    for (auto& s : flipped.samples) s.V = 1.0 / (1.0 + s.V);
    CHECK_FALSE(verify_lyapunov(flipped, 0.1).passed);
}

TEST_CASE("runs are deterministic") {
    Scenario sc = ges_scenario(Direction::Unidirectional, {2, 1.0, -0.5}, 5, 1e-3);
    const Trajectory a = integrate(sc), b = integrate(sc);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].state.rho == b.samples[i].state.rho);
        CHECK(a.samples[i].state.gamma == b.samples[i].state.gamma);
    }
}

TEST_CASE("parking detection") {
    Scenario sc = ges_scenario(Direction::Bidirectional, {1, 0.3, 0.2}, 100, 1e-2);
    sc.v_dead = 1e-6;
    const Trajectory parked = integrate(sc);
    CHECK(parked.status == RunStatus::Parked);
    CHECK(parked.back().V <= 1e-6);
    CHECK(parked.back().t < 100);

    sc.stop_when_parked = false;
    sc.horizon = 30;
    const Trajectory frozen = integrate(sc);
    CHECK(frozen.status == RunStatus::Completed);
    CHECK(frozen.back().t == doctest::Approx(30));
    CHECK(frozen.back().input.v == 0.0);
    CHECK(parked_time(frozen, 1e-6) < 30);
}

TEST_CASE("prescribed-time run equals the base run in dilated time") {
    const GesControllerSpec base{Direction::Bidirectional, {1, 2.2, 2.5, 0.5}};
    const PtSpec pt{base, 2.0, 0.0};
    Scenario sc;
    sc.controller = pt;
    sc.initial = {1, kPi / 2, kPi / 4};
    sc.horizon = 1.5;
    sc.dt = 1e-4;
    const Trajectory tr = integrate(sc);
    const double tau = time_dilation(pt, tr.back().t);

    Scenario ref;
    ref.controller = base;
    ref.initial = sc.initial;
    ref.horizon = tau;
    ref.dt = 1e-4;
    const Trajectory rt = integrate(ref);
    CHECK(distance(tr.back().state, rt.back().state) < 1e-6);
}

TEST_CASE("validation rejects bad scenarios") {
    Scenario sc = ges_scenario(Direction::Bidirectional, {1, 0, 0}, 1, 1e-3);
    sc.dt = 0;
    CHECK_THROWS_AS(validate(sc), ValidationError);
    sc = ges_scenario(Direction::Unidirectional, {1, kPi, 0}, 1, 1e-3);
    CHECK_THROWS_AS(validate(sc), ValidationError);
    sc.controller = PtSpec{{}, 2.0, 0.0};
    sc.initial = {1, 0, 0};
    sc.horizon = 3.0;
    CHECK_THROWS_AS(validate(sc), ValidationError);
    sc.controller = FxtSpec{{}, 2.0, 0.6};
    CHECK_THROWS_AS(validate(sc), ValidationError);
    sc.controller = GesControllerSpec{Direction::Bidirectional, {1, -1, 1, 1}};
    CHECK_THROWS_AS(validate(sc), ValidationError);
}

TEST_CASE("metrics on a bidirectional run") {
    const Scenario sc = ges_scenario(Direction::Bidirectional, {1, -4 * kPi / 5, kPi}, 30, 1e-3);
    const Trajectory tr = integrate(sc);
    const Metrics m = compute_metrics(sc, tr);
    CHECK(m.status == RunStatus::Parked);
    CHECK(m.settling_time > 0);
    CHECK(m.lambda_hat >= 0.9 * controller_decay_constant(sc.controller) / 2);
    CHECK(std::isnan(m.J));
    CHECK(m.max_v >= 5.1250548550028962655 * (1 - 1e-12));
}

TEST_CASE("rho floor is exact for laws with v proportional to rho") {
    // The safety law has v = k1 rho cos(gamma) and omega free of rho, so lifting
    // rho to the floor and scaling back must not change the trajectory.
    Scenario sc;
    sc.controller = SafetySpec{{1, 0.25, 1, 1}};
    sc.initial = {1, kPi / 2, 0};
    sc.horizon = 10;
    sc.dt = 1e-3;
    const Trajectory plain = integrate(sc);
    sc.rho_floor = 1e-2;
    const Trajectory floored = integrate(sc);
    REQUIRE(plain.samples.size() == floored.samples.size());
    CHECK(plain.back().state.rho < 1e-3);  // well below the floor
    for (std::size_t i = 0; i < plain.samples.size(); i += 100) {
        CHECK(distance(plain.samples[i].state, floored.samples[i].state) < 1e-10);
    }
}

TEST_CASE("rho floor lets a run continue past the singularity guard") {
    Scenario sc;
    sc.controller = SafetySpec{{1, 0.25, 1, 1}};
    sc.initial = {1, kPi / 2, 0};
    sc.horizon = 200;
    sc.scheme = Scheme::Rosenbrock;
    sc.rtol = 1e-8;
    sc.atol = 1e-12;
    CHECK(integrate(sc).status == RunStatus::SingularRho);
    sc.rho_floor = 1e-6;
    const Trajectory tr = integrate(sc);
    CHECK(tr.status == RunStatus::Parked);
    CHECK(tr.extrema.min_v >= 0.0);

    sc.rho_floor = 1e-12;
    CHECK_THROWS_AS(validate(sc), ValidationError);
    sc.rho_floor = -1;
    CHECK_THROWS_AS(validate(sc), ValidationError);
}
