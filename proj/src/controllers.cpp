#include "park/controllers.hpp"

#include <algorithm>
#include <cmath>

namespace park {

double sinc(double x) {
    if (std::abs(x) < kSincEps) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

double psi(double r, double s) { return sinc(0.5 * r) * std::cos(0.5 * r - s); }

double psi2(double r, double s) { return sinc(0.5 * r) * std::sin(0.5 * r - s); }

BacksteppingAux backstepping_aux(Direction direction, const ClfGains& g, const PolarState& s) {
    BacksteppingAux aux;
    if (direction == Direction::Unidirectional) {
        aux.phi = std::sin(s.delta);
        aux.sigma = std::sqrt(1.0 + g.k2 * g.k2 * aux.phi * aux.phi);
        aux.z = s.gamma + std::atan(g.k2 * aux.phi);
        aux.psi = psi(aux.z, s.gamma);
        aux.psi2 = psi2(aux.z, s.gamma);
    } else {
        aux.phi = s.delta;
        aux.sigma = std::sqrt(1.0 + 4.0 * g.k2 * g.k2 * s.delta * s.delta);
        aux.z = s.gamma + 0.5 * std::atan(2.0 * g.k2 * s.delta);
        aux.psi = psi(2.0 * aux.z, 2.0 * s.gamma);
        aux.psi2 = psi2(2.0 * aux.z, 2.0 * s.gamma);
    }
    return aux;
}

InputPair unidirectional_control(const ClfGains& g, const PolarState& s) {
    if (!is_finite(s) || std::abs(s.delta) > kPi - kBarrierMargin) {
        throw DomainViolation("unidirectional_control: state outside S2");
    }
    if (!(s.rho > kRhoMin)) throw SingularRho("unidirectional_control: rho below guard");
    const auto a = backstepping_aux(Direction::Unidirectional, g, s);
    const double t = std::tan(0.5 * s.delta);
    const double v = g.k1 * a.sigma * s.rho;
    // dV_delta/ddelta = 4t(1+t^2); the k3 term carries half of it
    const double omega_tilde = g.k4 * a.z - g.k3 * s.rho * s.rho * a.sigma * a.psi2 +
                               g.k3 * 2.0 * t * (1.0 + t * t) * a.sigma * a.psi +
                               g.k1 * g.k2 * std::cos(s.delta) / (a.sigma * a.sigma) *
                                   (a.sigma * a.psi * a.z - g.k2 * a.phi);
    return {v, g.k1 * a.sigma * std::sin(s.gamma) + omega_tilde};
}

InputPair bidirectional_control(const ClfGains& g, const PolarState& s) {
    if (!is_finite(s)) throw DomainViolation("bidirectional_control: non-finite state");
    if (!(s.rho > kRhoMin)) throw SingularRho("bidirectional_control: rho below guard");
    const auto a = backstepping_aux(Direction::Bidirectional, g, s);
    const double v = g.k1 * s.rho * a.sigma * std::cos(s.gamma);
    const double omega_tilde = g.k4 * a.z - g.k3 * s.rho * s.rho * a.sigma * a.psi2 +
                               g.k3 * s.delta * a.sigma * a.psi +
                               g.k1 * g.k2 / (a.sigma * a.sigma) * (a.sigma * a.psi * a.z - g.k2 * s.delta);
    return {v, g.k1 * a.sigma * std::cos(s.gamma) * std::sin(s.gamma) + omega_tilde};
}

InputPair ges_control(const GesControllerSpec& spec, const PolarState& state) {
    return spec.direction == Direction::Unidirectional ? unidirectional_control(spec.gains, state)
                                                       : bidirectional_control(spec.gains, state);
}

double decay_constant(const GesControllerSpec& spec) {
    const ClfGains& g = spec.gains;
    const double first = spec.direction == Direction::Unidirectional ? 2.0 * g.k1 : g.k1;
    // The z-channel decays at 2 k4 relative to its own weight q^2 z^2 in V.
    return std::min({first, 2.0 * g.k1 * g.k2, 2.0 * g.k4});
}

ClfSpec ges_clf(const GesControllerSpec& spec) {
    return {spec.direction == Direction::Unidirectional ? ClfKind::UnidirBarFli : ClfKind::BidirBackstep,
            spec.gains};
}

const char* to_string(Direction direction) {
    return direction == Direction::Unidirectional ? "unidirectional" : "bidirectional";
}

}  // namespace park
