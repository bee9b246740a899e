#include <doctest.h>

#include "park/inverse_optimal.hpp"
#include "test_util.hpp"

using namespace park;

namespace {

const CostKind kCosts[] = {CostKind::Quadratic, CostKind::Cosh, CostKind::LnCos, CostKind::RelayApprox};

double vdot(const ClfSpec& clf, const PolarState& s, const InputPair& u) {
    const LiePair nu = lie_derivatives(clf, s);
    return nu.nu1 * u.v / s.rho + nu.nu2 * u.omega;
}

}  // namespace

TEST_CASE("eta' and its inverse compose to the identity") {
    for (CostKind c : kCosts) {
        for (double r : {1e-6, 0.01, 0.3, 1.0, 4.0, 50.0}) {
            const double x = eta_prime_inverse(c, r);
            CHECK(x < domain_limit(c));
            CHECK(eta_prime(c, x) == doctest::Approx(r).epsilon(1e-12));
        }
    }
    CHECK(eta_prime_inverse(CostKind::RelayApprox, 0.0) == 0.0);
    CHECK(eta_prime(CostKind::RelayApprox, 0.0) == 0.0);
    CHECK(domain_limit(CostKind::LnCos) == doctest::Approx(kPi / 2));
    CHECK(domain_limit(CostKind::RelayApprox) == 1.0);
    CHECK(std::isinf(domain_limit(CostKind::Cosh)));
}

TEST_CASE("eta values") {
    CHECK(eta_value(CostKind::Quadratic, 3.0) == doctest::Approx(4.5));
    CHECK(eta_value(CostKind::Cosh, 1.0) == doctest::Approx(std::cosh(1.0) - 1.0).epsilon(1e-14));
    CHECK(eta_value(CostKind::LnCos, 1.0) == doctest::Approx(-std::log(std::cos(1.0))).epsilon(1e-14));
    CHECK(eta_value(CostKind::RelayApprox, 0.1) == doctest::Approx(1.0412368045322125755e-6).epsilon(1e-9));
    CHECK(eta_value(CostKind::RelayApprox, 0.5) == doctest::Approx(0.06737471677550152691).epsilon(1e-10));
    CHECK(eta_value(CostKind::RelayApprox, 0.9) == doctest::Approx(1.0923528211296734312).epsilon(1e-10));
}

TEST_CASE("Legendre ratios against quadrature") {
    const std::pair<double, double> relay[] = {{1e-9, 0.04408671750126996813}, {1e-6, 0.063456919937118484643},
                                               {0.01, 0.15410942677131987097}, {0.5, 0.36714167437117813905},
                                               {2.0, 0.5556466772751980016},   {10.0, 0.79177733899080789584}};
    for (auto [r, expected] : relay) {
        CHECK(legendre_ratio(CostKind::RelayApprox, r) == doctest::Approx(expected).epsilon(1e-9));
    }
    CHECK(legendre_ratio(CostKind::Cosh, 1.0) == doctest::Approx(0.46716002464644797643).epsilon(1e-14));
    CHECK(legendre_ratio(CostKind::Cosh, 2.3) == doctest::Approx(0.91463191705154748398).epsilon(1e-14));
    CHECK(legendre_ratio(CostKind::LnCos, 0.7) == doctest::Approx(0.325885878705374493).epsilon(1e-14));
    CHECK(legendre_ratio(CostKind::Quadratic, 0.7) == doctest::Approx(0.35));
    for (CostKind c : kCosts) {
        CHECK(legendre_ratio(c, 1e-13) == 0.0);
        CHECK(legendre_transform(c, 0.0) == 0.0);
    }
    CHECK_THROWS_AS(legendre_ratio(CostKind::Cosh, -1.0), DomainLimit);
}

TEST_CASE("Legendre ratio is continuous and below the inverse") {
    for (CostKind c : kCosts) {
        double prev = legendre_ratio(c, 1e-9);
        for (double r = 1e-9; r < 100; r *= 1.07) {
            const double cur = legendre_ratio(c, r);
            CHECK(cur <= eta_prime_inverse(c, r) * (1 + 1e-12));
            CHECK(cur >= prev * (1 - 1e-10));  // nondecreasing
            CHECK(std::abs(cur - prev) <= 0.1 * cur);  // no jumps on a 7% grid
            prev = cur;
        }
    }
}

TEST_CASE("optimal variant satisfies the Fenchel-Young equality l + penalty = -dV/dt") {
    test::StateSampler gen(31);
    const ClfSpec clf{ClfKind::CompositeGloBa, {6.5, 3, 7, 1}};
    for (CostKind c : kCosts) {
        IocControllerSpec spec{clf, c, c, EpsilonSchedule::constant(0.7), EpsilonSchedule::constant(1.3),
                               IocVariant::Optimal};
        for (int i = 0; i < 200; ++i) {
            const PolarState s = gen.state(0.05, 3, 3, 3);
            const InputPair u = ioc_control(spec, s);
            const double lhs = running_cost(spec, s) + control_penalty(spec, s, u);
            CHECK(lhs == doctest::Approx(-vdot(clf, s, u)).epsilon(1e-8).scale(1e-12));
        }
    }
}

TEST_CASE("continuous variant still decreases V") {
    test::StateSampler gen(32);
    const ClfSpec clf{ClfKind::GenovaLie, {}};
    for (CostKind c : kCosts) {
        IocControllerSpec spec{clf, c, c, EpsilonSchedule::constant(1.0), EpsilonSchedule::constant(1.0),
                               IocVariant::Continuous};
        for (int i = 0; i < 200; ++i) {
            const PolarState s = gen.state(0.05, 3, 3, 3);
            CHECK(vdot(clf, s, ioc_control(spec, s)) < 0.0);
        }
    }
}

TEST_CASE("quadratic costs: closed form, and the doubled convention") {
    test::StateSampler gen(33);
    const ClfSpec clf{ClfKind::BidirBackstep, {1, 2, 3, 1}};
    const IocControllerSpec spec = quadratic_ioc(clf, 0.5, 2.0);
    for (int i = 0; i < 200; ++i) {
        const PolarState s = gen.state(0.05, 3, 3, 3);
        const LiePair nu = lie_derivatives(clf, s);
        const InputPair u = ioc_control(spec, s);
        CHECK(u.v == doctest::Approx(-s.rho * 0.25 * nu.nu1).epsilon(1e-14));
        CHECK(u.omega == doctest::Approx(-4.0 * nu.nu2).epsilon(1e-14));
        const double l = running_cost(spec, s);
        CHECK(l == doctest::Approx(0.5 * (0.25 * nu.nu1 * nu.nu1 + 4.0 * nu.nu2 * nu.nu2)).epsilon(1e-13));
        CHECK(quadratic_integrand_doubled(spec, s, u) ==
              doctest::Approx(2.0 * (l + control_penalty(spec, s, u))).epsilon(1e-13));
    }
}

TEST_CASE("saturating schedules bound the inputs") {
    test::StateSampler gen(34);
    const ClfSpec examples[] = {{ClfKind::GenovaLie, {}}, {ClfKind::GloBaLie, {}}};
    for (CostKind c : {CostKind::LnCos, CostKind::RelayApprox}) {
        const auto [e1, e2] = saturating_schedules(c, 1.0, 1.0, 0.3);
        for (const ClfSpec& clf : examples) {
            const IocControllerSpec spec{clf, c, c, e1, e2, IocVariant::Optimal};
            for (int i = 0; i < 10000; ++i) {
                const PolarState s = gen.state(1e-3, 50, 3.1, 3.1);
                const InputPair u = ioc_control(spec, s);
                CHECK(std::abs(u.v) <= 1.0);
                CHECK(std::abs(u.omega) <= 1.0);
            }
        }
    }
    CHECK_THROWS_AS(saturating_schedules(CostKind::Quadratic, 1, 1, 0.3), ValidationError);
    CHECK_THROWS_AS(saturating_schedules(CostKind::LnCos, 1, 1, 0.0), ValidationError);
    const auto [e1, e2] = saturating_schedules(CostKind::LnCos, 2.0, 3.0, 0.5);
    CHECK(e1(1.5) == doctest::Approx(2.0 * (2 / kPi) / 2.0));
    CHECK(e2(7.0) == doctest::Approx(3.0 * 2 / kPi));
}

TEST_CASE("cost J of short trajectories") {
    const IocControllerSpec spec = quadratic_ioc({ClfKind::GloBaLie, {}}, 1, 1);
    Trajectory empty;
    CHECK(evaluate_cost_J(empty, spec).J == 0.0);

    Trajectory one;
    Sample s;
    s.t = 0;
    s.state = {0, 0, 0};
    s.V = 0;
    one.samples.push_back(s);
    const CostReport r = evaluate_cost_J(one, spec);
    CHECK(r.J == 0.0);
    CHECK(r.V0 == 0.0);

    Trajectory stuck;
    Sample a;
    a.state = {1, 0, 0};
    a.V = 1;
    Sample b = a;
    b.t = 1;
    stuck.samples = {a, b};
    CHECK_THROWS_AS(evaluate_cost_J(stuck, spec), TailNotConverged);
}

TEST_CASE("cost names round-trip") {
    for (CostKind c : kCosts) CHECK(parse_cost_kind(to_string(c)) == c);
    CHECK_FALSE(parse_cost_kind("quadratic").has_value());
}

TEST_CASE("relay transform near the quadrature split and at large arguments") {
    // just above the split the tail interval is tiny; far out it is long
    for (double r : {1e-6 * (1 + 1e-12), 1e-6 * (1 + 1e-9), 1.0000001e-6, 1e3, 1e6, 1e8}) {
        const double L = legendre_transform(CostKind::RelayApprox, r);
        CHECK(L > 0.0);
        CHECK(L <= r * eta_prime_inverse(CostKind::RelayApprox, r));
    }
    CHECK(legendre_transform(CostKind::RelayApprox, 1e-6 * (1 + 1e-12)) ==
          doctest::Approx(legendre_transform(CostKind::RelayApprox, 1e-6)).epsilon(1e-9));
}
