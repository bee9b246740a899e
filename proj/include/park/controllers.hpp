#pragma once

#include "park/clf.hpp"

namespace park {

/// Below this |x| sinc switches to its Taylor series.
inline constexpr double kSincEps = 1e-6;

/// sin(x)/x with a 3-term series near zero.
double sinc(double x);

/// psi(r,s) = (sin(r-s) + sin s)/r, evaluated as sinc(r/2) cos(r/2 - s). psi(0,s) = cos s.
double psi(double r, double s);

/// psi2(r,s) = d psi / ds = (cos s - cos(r-s))/r = sinc(r/2) sin(r/2 - s). psi2(0,s) = -sin s.
double psi2(double r, double s);

enum class Direction { Unidirectional, Bidirectional };

struct BacksteppingAux {
    double z = 0.0;
    double sigma = 1.0;
    double phi = 0.0;
    double psi = 0.0;
    double psi2 = 0.0;
};

struct GesControllerSpec {
    Direction direction = Direction::Bidirectional;
    ClfGains gains{};
};

/// z, sigma, phi and the psi values at the arguments the given law uses:
/// unidirectional psi(z, gamma); bidirectional psi(2z, 2gamma).
BacksteppingAux backstepping_aux(Direction direction, const ClfGains& gains, const PolarState& state);

/// Strictly forward law on S2: v = k1 sigma rho with sigma = sqrt(1 + k2^2 sin^2 delta).
InputPair unidirectional_control(const ClfGains& gains, const PolarState& state);

/// Reversing law on S: v = k1 rho sigma cos gamma with sigma = sqrt(1 + 4 k2^2 delta^2).
InputPair bidirectional_control(const ClfGains& gains, const PolarState& state);

InputPair ges_control(const GesControllerSpec& spec, const PolarState& state);

/// c such that dV/dt <= -c V in closed loop: min{2k1 (k1 if bidirectional), 2k1k2, 2k4}.
double decay_constant(const GesControllerSpec& spec);

/// The CLF certifying the law.
ClfSpec ges_clf(const GesControllerSpec& spec);

const char* to_string(Direction direction);

}  // namespace park
