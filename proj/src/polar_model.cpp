#include "park/polar_model.hpp"

#include <cmath>

namespace park {

double wrap_angle(double angle) {
    double wrapped = std::remainder(angle, 2.0 * kPi);  // [-pi, pi]
    if (wrapped <= -kPi) wrapped += 2.0 * kPi;
    return wrapped;
}

PolarState to_polar(const CartesianPose& pose, const CartesianPose& target) {
    const double dx = pose.x - target.x;
    const double dy = pose.y - target.y;
    if (dx == 0.0 && dy == 0.0) {
        throw DegenerateTransform("to_polar: position coincides with the target");
    }
    const double rho = std::hypot(dx, dy);
    const double delta = std::atan2(dy, dx) - target.theta + kPi;
    const double gamma = delta - pose.theta + target.theta;
    return {rho, wrap_angle(delta), wrap_angle(gamma)};
}

CartesianPose to_cartesian(const PolarState& state, const CartesianPose& target) {
    // delta = atan2(dy, dx) - theta* + pi  =>  bearing from target = delta + theta* - pi
    const double bearing = state.delta + target.theta - kPi;
    return {target.x + state.rho * std::cos(bearing),
            target.y + state.rho * std::sin(bearing),
            state.delta - state.gamma + target.theta};
}

PolarDerivative polar_dynamics(const PolarState& state, const InputPair& input) {
    if (!(state.rho > kRhoMin)) {
        throw SingularRho("polar_dynamics: rho below singularity guard");
    }
    const double turn = input.v / state.rho * std::sin(state.gamma);
    return {-input.v * std::cos(state.gamma), turn, turn - input.omega};
}

CartesianDerivative cartesian_dynamics(const CartesianPose& pose, const InputPair& input) {
    return {input.v * std::cos(pose.theta), input.v * std::sin(pose.theta), input.omega};
}

bool in_state_space(const PolarState& state, StateSpace space) {
    if (!is_finite(state) || !(state.rho > 0.0)) return false;
    const bool delta_ok = std::abs(state.delta) < kPi;
    const bool gamma_ok = std::abs(state.gamma) < kPi;
    switch (space) {
        case StateSpace::S: return true;
        case StateSpace::S1: return gamma_ok;
        case StateSpace::S2: return delta_ok;
        case StateSpace::S3: return delta_ok && gamma_ok;
    }
    return false;
}

const char* to_string(StateSpace space) {
    switch (space) {
        case StateSpace::S: return "S";
        case StateSpace::S1: return "S1";
        case StateSpace::S2: return "S2";
        case StateSpace::S3: return "S3";
    }
    return "?";
}

}  // namespace park
