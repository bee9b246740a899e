#include "park/clf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace park {
namespace {

bool is_barrier(ClfKind kind) {
    return kind == ClfKind::UnidirBarFli || kind == ClfKind::BarFliSafety;
}

// z and dz/ddelta for the backstepping-type kinds.
struct ZTerm {
    double z;
    double dz_ddelta;
};

ZTerm z_bidir(double k2, double delta, double gamma) {
    return {gamma + 0.5 * std::atan(2.0 * k2 * delta), k2 / (1.0 + 4.0 * k2 * k2 * delta * delta)};
}

ZTerm z_unidir(double k2, double delta, double gamma) {
    const double s = std::sin(delta);
    return {gamma + std::atan(k2 * s), k2 * std::cos(delta) / (1.0 + k2 * k2 * s * s)};
}

ZTerm z_safety(double k2, double delta, double gamma) {
    const double t = std::tan(0.5 * delta);
    return {gamma + 0.5 * std::atan(4.0 * k2 * t),
            k2 * (1.0 + t * t) / (1.0 + 16.0 * k2 * k2 * t * t)};
}

}  // namespace

StateSpace certified_space(ClfKind kind) {
    return is_barrier(kind) ? StateSpace::S2 : StateSpace::S;
}

void check_domain(const ClfSpec& spec, const PolarState& state) {
    if (!is_finite(state) || state.rho < 0.0) {
        throw DomainViolation("CLF evaluated at a non-finite state or negative rho");
    }
    if (is_barrier(spec.kind) && std::abs(state.delta) > kPi - kBarrierMargin) {
        throw DomainViolation(std::string(to_string(spec.kind)) + ": |delta| too close to pi");
    }
}

double clf_value(const ClfSpec& spec, const PolarState& s) {
    check_domain(spec, s);
    const ClfGains& g = spec.gains;
    const double r2 = s.rho * s.rho;
    switch (spec.kind) {
        case ClfKind::UnidirBarFli: {
            const double t = std::tan(0.5 * s.delta);
            const double z = z_unidir(g.k2, s.delta, s.gamma).z;
            return r2 + 4.0 * t * t + g.q2() * z * z;
        }
        case ClfKind::BidirBackstep: {
            const double z = z_bidir(g.k2, s.delta, s.gamma).z;
            return r2 + s.delta * s.delta + g.q2() * z * z;
        }
        case ClfKind::CompositeGloBa: {
            const double z = z_bidir(g.k2, s.delta, s.gamma).z;
            const double w = s.delta * s.delta + g.k3 * z * z;
            // sqrt(1+a) - 1 written as a / (sqrt(1+a) + 1) to keep precision near 0
            return g.k1 * r2 / (std::sqrt(1.0 + g.k1 * r2) + 1.0) + w / (std::sqrt(1.0 + w) + 1.0);
        }
        case ClfKind::GenovaLie: {
            const double a = s.delta * s.delta + s.gamma * s.gamma;
            return r2 + 0.5 * a * a + 3.0 * a + 2.0 * s.delta * s.gamma;
        }
        case ClfKind::GloBaLie: {
            const double z = z_bidir(1.0, s.delta, s.gamma).z;
            return r2 + s.delta * s.delta + z * z;
        }
        case ClfKind::BarFliSafety: {
            const double t = std::tan(0.5 * s.delta);
            const double z = z_safety(g.k2, s.delta, s.gamma).z;
            return r2 + 4.0 * t * t + g.q2() * z * z;
        }
    }
    return 0.0;
}

Gradient clf_gradient(const ClfSpec& spec, const PolarState& s) {
    check_domain(spec, s);
    const ClfGains& g = spec.gains;
    switch (spec.kind) {
        case ClfKind::UnidirBarFli:
        case ClfKind::BarFliSafety: {
            const double t = std::tan(0.5 * s.delta);
            const ZTerm zt = spec.kind == ClfKind::UnidirBarFli ? z_unidir(g.k2, s.delta, s.gamma)
                                                                : z_safety(g.k2, s.delta, s.gamma);
            const double wz = 2.0 * g.q2() * zt.z;
            return {2.0 * s.rho, 4.0 * t * (1.0 + t * t) + wz * zt.dz_ddelta, wz};
        }
        case ClfKind::BidirBackstep:
        case ClfKind::GloBaLie: {
            const double k2 = spec.kind == ClfKind::GloBaLie ? 1.0 : g.k2;
            const double q2 = spec.kind == ClfKind::GloBaLie ? 1.0 : g.q2();
            const ZTerm zt = z_bidir(k2, s.delta, s.gamma);
            const double wz = 2.0 * q2 * zt.z;
            return {2.0 * s.rho, 2.0 * s.delta + wz * zt.dz_ddelta, wz};
        }
        case ClfKind::CompositeGloBa: {
            const ZTerm zt = z_bidir(g.k2, s.delta, s.gamma);
            const double w = s.delta * s.delta + g.k3 * zt.z * zt.z;
            const double root_w = std::sqrt(1.0 + w);
            return {g.k1 * s.rho / std::sqrt(1.0 + g.k1 * s.rho * s.rho),
                    (s.delta + g.k3 * zt.z * zt.dz_ddelta) / root_w, g.k3 * zt.z / root_w};
        }
        case ClfKind::GenovaLie: {
            const double a = s.delta * s.delta + s.gamma * s.gamma;
            return {2.0 * s.rho, 2.0 * s.delta * a + 6.0 * s.delta + 2.0 * s.gamma,
                    2.0 * s.gamma * a + 6.0 * s.gamma + 2.0 * s.delta};
        }
    }
    return {};
}

LiePair lie_from_gradient(const Gradient& grad, const PolarState& s) {
    return {-grad.d_rho * s.rho * std::cos(s.gamma) + (grad.d_delta + grad.d_gamma) * std::sin(s.gamma),
            -grad.d_gamma};
}

LiePair lie_derivatives(const ClfSpec& spec, const PolarState& s) {
    if (spec.kind == ClfKind::GenovaLie) {
        check_domain(spec, s);
        const double a = s.delta * s.delta + s.gamma * s.gamma;
        const double sum = s.delta + s.gamma;
        return {-2.0 * (s.rho * s.rho * std::cos(s.gamma) - std::sin(s.gamma) * (a + 4.0) * sum),
                -2.0 * ((a + 2.0) * s.gamma + sum)};
    }
    if (spec.kind == ClfKind::GloBaLie) {
        check_domain(spec, s);
        const double z = s.gamma + 0.5 * std::atan(2.0 * s.delta);
        const double w = 1.0 + 4.0 * s.delta * s.delta;
        return {-2.0 * (s.rho * s.rho * std::cos(s.gamma) - std::sin(s.gamma) * (s.delta + (1.0 + 1.0 / w) * z)),
                -2.0 * z};
    }
    return lie_from_gradient(clf_gradient(spec, s), s);
}

Sandwich quadratic_sandwich(const ClfSpec& spec, const PolarState& initial) {
    const ClfGains& g = spec.gains;
    const double q2 = g.q2();
    if (spec.kind == ClfKind::BidirBackstep || spec.kind == ClfKind::UnidirBarFli) {
        const double lower = std::min(0.5, g.k1 / (2.0 * g.k1 * g.k2 * g.k2 + g.k3));
        // 4 tan^2(d/2) <= c(d0) d^2 for |d| <= |d0|; c -> 1 as d0 -> 0
        double c = 1.0;
        if (spec.kind == ClfKind::UnidirBarFli && initial.delta != 0.0) {
            const double t = std::tan(0.5 * initial.delta);
            c = 4.0 * t * t / (initial.delta * initial.delta);
        }
        const double upper = std::max({1.0, c + 2.0 * q2 * g.k2 * g.k2, 2.0 * q2});
        return {lower, upper};
    }

    // Sampled fallback over the ball of radius |initial|, deterministic seed.
    const double radius = std::max(norm(initial), 1e-3);
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double lo = INFINITY;
    double hi = 0.0;
    for (int i = 0; i < 20000; ++i) {
        std::array<double, 3> d{std::abs(normal(rng)), normal(rng), normal(rng)};
        const double len = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        const double r = radius * std::cbrt(unit(rng)) + 1e-9;
        const PolarState s{d[0] / len * r, d[1] / len * r, d[2] / len * r};
        if (is_barrier(spec.kind) && std::abs(s.delta) > kPi - kBarrierMargin) continue;
        const double ratio = clf_value(spec, s) / (r * r);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    return {0.5 * lo, 2.0 * hi};
}

const char* to_string(ClfKind kind) {
    switch (kind) {
        case ClfKind::UnidirBarFli: return "UnidirBarFli";
        case ClfKind::BidirBackstep: return "BidirBackstep";
        case ClfKind::CompositeGloBa: return "CompositeGloBa";
        case ClfKind::GenovaLie: return "GenovaLie";
        case ClfKind::GloBaLie: return "GloBaLie";
        case ClfKind::BarFliSafety: return "BarFliSafety";
    }
    return "?";
}

std::optional<ClfKind> parse_clf_kind(std::string_view name) {
    for (ClfKind k : {ClfKind::UnidirBarFli, ClfKind::BidirBackstep, ClfKind::CompositeGloBa,
                      ClfKind::GenovaLie, ClfKind::GloBaLie, ClfKind::BarFliSafety}) {
        if (name == to_string(k)) return k;
    }
    return std::nullopt;
}

}  // namespace park
