#pragma once

#include <optional>
#include <string_view>

#include "park/clf.hpp"
#include "park/trajectory.hpp"

namespace park {

/// Cost-on-control functions eta. The domain is [0, a): a = pi/2 for LnCos,
/// a = 1 for RelayApprox, unbounded otherwise.
enum class CostKind { Quadratic, Cosh, LnCos, RelayApprox };

double domain_limit(CostKind cost);

double eta_value(CostKind cost, double r);
double eta_prime(CostKind cost, double r);
double eta_prime_inverse(CostKind cost, double r);

/// l_eta(r) = integral_0^r (eta')^{-1}(s) ds.
double legendre_transform(CostKind cost, double r);

/// l_eta(r)/r, returning 0 for r < 1e-12.
double legendre_ratio(CostKind cost, double r);

/// Either a constant or value * scale / (sigma + rho).
struct EpsilonSchedule {
    enum class Kind { Constant, RhoDependent };
    Kind kind = Kind::Constant;
    double value = 1.0;
    double sigma = 0.0;
    double scale = 1.0;

    static EpsilonSchedule constant(double eps) { return {Kind::Constant, eps, 0.0, 1.0}; }
    static EpsilonSchedule rho_dependent(double bar, double sigma, double scale) {
        return {Kind::RhoDependent, bar, sigma, scale};
    }
    double operator()(double rho) const {
        return kind == Kind::Constant ? value : value * scale / (sigma + rho);
    }
};

enum class IocVariant { Optimal, Continuous };

struct IocControllerSpec {
    ClfSpec clf{};
    CostKind cost1 = CostKind::Quadratic;
    CostKind cost2 = CostKind::Quadratic;
    EpsilonSchedule eps1 = EpsilonSchedule::constant(1.0);
    EpsilonSchedule eps2 = EpsilonSchedule::constant(1.0);
    IocVariant variant = IocVariant::Optimal;
};

/// Schedules bounding |v| <= vbar and |omega| <= wbar for the bounded costs
/// (LnCos: factor 2/pi, RelayApprox: factor 1). Throws ValidationError otherwise.
std::pair<EpsilonSchedule, EpsilonSchedule> saturating_schedules(CostKind cost, double vbar, double wbar,
                                                                 double sigma);

/// Quadratic costs with constant eps on both channels: v = -rho eps1^2 nu1, omega = -eps2^2 nu2.
IocControllerSpec quadratic_ioc(const ClfSpec& clf, double eps1, double eps2);

InputPair ioc_control(const IocControllerSpec& spec, const PolarState& state);

/// l = l_eta1(eps1 |nu1|) + l_eta2(eps2 |nu2|).
double running_cost(const IocControllerSpec& spec, const PolarState& state);

/// eta1(|v|/(eps1 rho)) + eta2(|omega|/eps2).
double control_penalty(const IocControllerSpec& spec, const PolarState& state, const InputPair& input);

/// Quadratic-cost integrand in the (eps nu)^2 + (v/(eps rho))^2 convention,
/// which is exactly twice the l + penalty convention above.
double quadratic_integrand_doubled(const IocControllerSpec& spec, const PolarState& state,
                                   const InputPair& input);

struct CostReport {
    double J = 0.0;
    double V0 = 0.0;
    double tail_bound = 0.0;  // V at the last sample; J + tail_bound bounds the infinite-horizon cost
};

/// Trapezoidal J over the recorded samples. Throws TailNotConverged when
/// V(end) >= tail_fraction * V(0).
CostReport evaluate_cost_J(const Trajectory& trajectory, const IocControllerSpec& spec,
                           double tail_fraction = 1e-2);

const char* to_string(CostKind cost);
std::optional<CostKind> parse_cost_kind(std::string_view name);

}  // namespace park
