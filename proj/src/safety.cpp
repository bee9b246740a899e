#include "park/safety.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "park/controllers.hpp"

namespace park {

double psi_doubled(double z, double gamma) { return sinc(z) * std::cos(z - 2.0 * gamma); }

double safety_z(double k2, const PolarState& s) {
    return s.gamma + 0.5 * std::atan(4.0 * k2 * std::tan(0.5 * s.delta));
}

InputPair nonovershoot_control(const SafetySpec& spec, const PolarState& s) {
    if (!is_finite(s) || std::abs(s.delta) > kPi - kBarrierMargin) {
        throw DomainViolation("nonovershoot_control: state outside S2");
    }
    const ClfGains& g = spec.gains;
    const double t = std::tan(0.5 * s.delta);
    const double n = std::sqrt(1.0 + 16.0 * g.k2 * g.k2 * t * t);
    const double z = safety_z(g.k2, s);
    const double p = psi_doubled(z, s.gamma);
    const double c = std::cos(0.5 * s.delta);
    const double sn = std::sin(0.5 * s.delta);
    const double sin2g = std::sin(2.0 * s.gamma);
    const double omega_tilde = (g.k4 + g.k3 / g.k2 * p * p * n * (1.0 + t * t)) * z +
                               0.5 * g.k1 * g.k2 / (c * c + 16.0 * g.k2 * g.k2 * sn * sn) * sin2g;
    return {g.k1 * s.rho * std::cos(s.gamma), 0.5 * g.k1 * sin2g + omega_tilde};
}

K2Interval k2_admissible_interval(double delta0, double gamma0) {
    if (!(delta0 > 0.0 && delta0 < kPi && gamma0 > -0.25 * kPi && gamma0 < 0.25 * kPi)) {
        throw InadmissibleInitialCondition("k2_admissible_interval: need delta0 in (0, pi), |gamma0| < pi/4");
    }
    const double t0 = std::tan(0.5 * delta0);
    const double lo_arg = std::max(0.0, -2.0 * gamma0);
    const double hi_arg = 0.5 * kPi + std::min(0.0, -2.0 * gamma0);
    const double hi = hi_arg >= 0.5 * kPi ? std::numeric_limits<double>::infinity()
                                          : std::tan(hi_arg) / (4.0 * t0);
    return {std::tan(lo_arg) / (4.0 * t0), hi};
}

double k2_midpoint(double delta0, double gamma0) {
    k2_admissible_interval(delta0, gamma0);  // precondition check
    const double lo_arg = std::max(0.0, -2.0 * gamma0);
    const double hi_arg = 0.5 * kPi + std::min(0.0, -2.0 * gamma0);
    return std::tan(0.5 * (lo_arg + hi_arg)) / (4.0 * std::tan(0.5 * delta0));
}

CurbMetrics curb_metrics(const Trajectory& traj) {
    if (traj.samples.empty()) return {};
    return {traj.extrema.min_y, traj.extrema.min_delta, traj.extrema.max_delta, traj.extrema.min_v};
}

}  // namespace park
