#pragma once

#include "park/clf.hpp"

namespace park {

/// Unknown positive input coefficients: the plant sees (b1 v, b2 omega).
struct SlipParams {
    double b1 = 1.0;
    double b2 = 1.0;
};

/// Online estimates of 1/b1, 1/b2.
struct AdaptiveState {
    double eps1_hat = 0.0;
    double eps2_hat = 0.0;
};

/// Certainty-equivalence law with normalization n(V) = n0 V.
struct AdaptiveSpec {
    ClfSpec clf{};
    double mu1 = 1.0;
    double mu2 = 1.0;
    double n0 = 1.0;
};

PolarDerivative slip_dynamics(const PolarState& state, const InputPair& input, const SlipParams& slip);

/// v = -eps1_hat rho nu1, omega = -eps2_hat nu2.
InputPair adaptive_control(const AdaptiveSpec& spec, const AdaptiveState& est, const PolarState& state);

/// d eps_i_hat / dt = mu_i n'(V)/(1 + n(V)) nu_i^2.
AdaptiveState update_law(const AdaptiveSpec& spec, const PolarState& state);

/// V_a = ln(1 + n(V)) + sum b_i/(2 mu_i) (1/b_i - eps_i_hat)^2.
double adaptive_clf_value(const AdaptiveSpec& spec, const SlipParams& slip, const AdaptiveState& est,
                          const PolarState& state);

/// |state| + |(1/b1 - eps1_hat, 1/b2 - eps2_hat)|.
double upsilon(const SlipParams& slip, const AdaptiveState& est, const PolarState& state);

/// a1^{-1}(M (exp(m a2(Upsilon0)) - 1)) with a1(r) = min(n0 k_lo, 1) r^2,
/// a2(r) = max(n0 k_hi, 1) r^2, M = max(1, c2/c1), m = max(c2, 1/c2),
/// c1, c2 = min, max of b_i/(2 mu_i), k_lo, k_hi the CLF sandwich constants.
double upsilon_bound(const AdaptiveSpec& spec, const SlipParams& slip, const PolarState& initial_state,
                     const AdaptiveState& initial_estimates);

/// Stand-in for the demo CLF rho^2 + delta^2 + k3 (gamma + atan(2 k2 delta)/2)^2,
/// expressed as BidirBackstep with q^2 = k3.
ClfSpec bofo_standin_clf(double k2, double k3);

}  // namespace park
