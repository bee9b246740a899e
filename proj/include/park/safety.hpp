#pragma once

#include "park/clf.hpp"
#include "park/trajectory.hpp"

namespace park {

/// Curb-safe forward parking law; k2 shapes the admissible initial set.
struct SafetySpec {
    ClfGains gains{};
};

/// (sin(2z - 2g) + sin 2g)/(2z) = sinc(z) cos(z - 2g). Not the same function as psi().
double psi_doubled(double z, double gamma);

/// v = k1 rho cos g, omega = (k1/2) sin 2g + omega_tilde on S2.
InputPair nonovershoot_control(const SafetySpec& spec, const PolarState& state);

/// z = gamma + atan(4 k2 tan(delta/2))/2.
double safety_z(double k2, const PolarState& state);

struct K2Interval {
    double lo = 0.0;
    double hi = 0.0;  // may be +inf
};

/// Open interval of k2 putting z0 in (0, pi/4).
/// Throws InadmissibleInitialCondition unless delta0 in (0, pi), gamma0 in (-pi/4, pi/4).
K2Interval k2_admissible_interval(double delta0, double gamma0);

/// Midpoint of the interval in the arctan domain, i.e. z0 = pi/8 + gamma0/2.
double k2_midpoint(double delta0, double gamma0);

struct CurbMetrics {
    double min_y = 0.0;
    double min_delta = 0.0;
    double max_delta = 0.0;
    double min_v = 0.0;
};

/// Extrema over every integrator step of the rollout (zeros for an empty trajectory).
CurbMetrics curb_metrics(const Trajectory& trajectory);

}  // namespace park
