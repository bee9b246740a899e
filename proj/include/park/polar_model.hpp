#pragma once

#include "park/types.hpp"

namespace park {

/// State spaces of the polar model. All require rho > 0;
/// S1 adds |gamma| < pi, S2 adds |delta| < pi, S3 adds both.
enum class StateSpace { S, S1, S2, S3 };

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

/// Cartesian pose -> polar coordinates relative to `target`.
/// delta and gamma are wrapped to (-pi, pi].
/// Throws DegenerateTransform when the position coincides with the target.
PolarState to_polar(const CartesianPose& pose, const CartesianPose& target = {});

/// Inverse of to_polar. Accepts unwrapped angles; the returned heading is
/// theta = delta - gamma + theta_target (not wrapped).
CartesianPose to_cartesian(const PolarState& state, const CartesianPose& target = {});

/// (rho_dot, delta_dot, gamma_dot) = (-v cos g, (v/rho) sin g, (v/rho) sin g - omega).
/// Throws SingularRho when rho <= kRhoMin.
PolarDerivative polar_dynamics(const PolarState& state, const InputPair& input);

/// (x_dot, y_dot, theta_dot) = (v cos theta, v sin theta, omega).
CartesianDerivative cartesian_dynamics(const CartesianPose& pose, const InputPair& input);

bool in_state_space(const PolarState& state, StateSpace space);

const char* to_string(StateSpace space);

}  // namespace park
