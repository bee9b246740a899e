#pragma once

#include <optional>
#include <string_view>

#include "park/polar_model.hpp"

namespace park {

struct ClfGains {
    double k1 = 1.0;
    double k2 = 1.0;
    double k3 = 1.0;
    double k4 = 1.0;

    double q2() const { return k1 / k3; }
    double q() const { return std::sqrt(k1 / k3); }
};

enum class ClfKind {
    UnidirBarFli,    // rho^2 + 4 tan^2(delta/2) + q^2 (gamma + atan(k2 sin delta))^2, on S2
    BidirBackstep,   // rho^2 + delta^2 + q^2 (gamma + atan(2 k2 delta)/2)^2
    CompositeGloBa,  // sqrt(1 + k1 rho^2) + sqrt(1 + delta^2 + k3 z^2) - 2, z as above
    GenovaLie,       // fixed unity-gain CLF with closed-form Lie derivatives
    GloBaLie,        // BidirBackstep with unit gains, closed-form Lie derivatives
    BarFliSafety,    // rho^2 + 4 tan^2(delta/2) + q^2 (gamma + atan(4 k2 tan(delta/2))/2)^2, on S2
};

struct ClfSpec {
    ClfKind kind = ClfKind::BidirBackstep;
    ClfGains gains{};
};

struct Gradient {
    double d_rho = 0.0;
    double d_delta = 0.0;
    double d_gamma = 0.0;
};

/// nu1 = L_{g1}V, nu2 = L_{g2}V, chosen so that dV/dt = nu1 * v / rho + nu2 * omega.
struct LiePair {
    double nu1 = 0.0;
    double nu2 = 0.0;
};

/// Quadratic sandwich lower*|s|^2 <= V(s) <= upper*|s|^2.
struct Sandwich {
    double lower = 0.0;
    double upper = 0.0;
};

/// |delta| beyond pi - kBarrierMargin is rejected by the barrier (tan(delta/2)) CLFs.
inline constexpr double kBarrierMargin = 1e-6;

StateSpace certified_space(ClfKind kind);

/// Throws DomainViolation if `state` is outside the domain where V is evaluated.
/// rho = 0 is accepted (V is smooth there).
void check_domain(const ClfSpec& spec, const PolarState& state);

double clf_value(const ClfSpec& spec, const PolarState& state);
Gradient clf_gradient(const ClfSpec& spec, const PolarState& state);

/// Lie derivatives. GenovaLie and GloBaLie use hard-coded closed forms,
/// every other kind goes through the gradient.
LiePair lie_derivatives(const ClfSpec& spec, const PolarState& state);

/// nu1 = -V_rho rho cos g + (V_delta + V_gamma) sin g, nu2 = -V_gamma.
LiePair lie_from_gradient(const Gradient& grad, const PolarState& state);

/// Sandwich constants. BidirBackstep and UnidirBarFli use closed forms (the
/// unidirectional upper constant is valid for |delta| <= |initial.delta|);
/// other kinds are sampled over the ball of radius |initial| with a 2x margin.
Sandwich quadratic_sandwich(const ClfSpec& spec, const PolarState& initial);

const char* to_string(ClfKind kind);
std::optional<ClfKind> parse_clf_kind(std::string_view name);

}  // namespace park
