#include "park/adaptive.hpp"

#include <algorithm>
#include <cmath>

namespace park {

PolarDerivative slip_dynamics(const PolarState& state, const InputPair& input, const SlipParams& slip) {
    return polar_dynamics(state, {slip.b1 * input.v, slip.b2 * input.omega});
}

InputPair adaptive_control(const AdaptiveSpec& spec, const AdaptiveState& est, const PolarState& state) {
    const LiePair nu = lie_derivatives(spec.clf, state);
    return {-est.eps1_hat * state.rho * nu.nu1, -est.eps2_hat * nu.nu2};
}

AdaptiveState update_law(const AdaptiveSpec& spec, const PolarState& state) {
    const LiePair nu = lie_derivatives(spec.clf, state);
    const double V = clf_value(spec.clf, state);
    const double gain = spec.n0 / (1.0 + spec.n0 * V);
    return {spec.mu1 * gain * nu.nu1 * nu.nu1, spec.mu2 * gain * nu.nu2 * nu.nu2};
}

double adaptive_clf_value(const AdaptiveSpec& spec, const SlipParams& slip, const AdaptiveState& est,
                          const PolarState& state) {
    const double e1 = 1.0 / slip.b1 - est.eps1_hat;
    const double e2 = 1.0 / slip.b2 - est.eps2_hat;
    return std::log1p(spec.n0 * clf_value(spec.clf, state)) + slip.b1 / (2.0 * spec.mu1) * e1 * e1 +
           slip.b2 / (2.0 * spec.mu2) * e2 * e2;
}

double upsilon(const SlipParams& slip, const AdaptiveState& est, const PolarState& state) {
    return norm(state) + std::hypot(1.0 / slip.b1 - est.eps1_hat, 1.0 / slip.b2 - est.eps2_hat);
}

double upsilon_bound(const AdaptiveSpec& spec, const SlipParams& slip, const PolarState& initial_state,
                     const AdaptiveState& initial_estimates) {
    const Sandwich k = quadratic_sandwich(spec.clf, initial_state);
    const double c_a = slip.b1 / (2.0 * spec.mu1);
    const double c_b = slip.b2 / (2.0 * spec.mu2);
    const double c1 = std::min(c_a, c_b);
    const double c2 = std::max(c_a, c_b);
    const double M = std::max(1.0, c2 / c1);
    const double m = std::max(c2, 1.0 / c2);
    const double a1_coef = std::min(spec.n0 * k.lower, 1.0);
    const double a2_coef = std::max(spec.n0 * k.upper, 1.0);
    const double u0 = upsilon(slip, initial_estimates, initial_state);
    const double inner = M * std::expm1(m * a2_coef * u0 * u0);
    return std::sqrt(inner / a1_coef);
}

ClfSpec bofo_standin_clf(double k2, double k3) {
    // BidirBackstep has q^2 = k1/k3; pick k1 = k3_demo, k3 = 1 so q^2 = k3_demo.
    return {ClfKind::BidirBackstep, {k3, k2, 1.0, 1.0}};
}

}  // namespace park
