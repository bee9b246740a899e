#include "park/inverse_optimal.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace park {
namespace {

constexpr double kQuadTol = 1e-10;
constexpr double kRelaySplit = 1e-6;
constexpr double kTinyRatio = 1e-12;

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void check_tolerance(double error, double value, const char* what) {
    // absolute for small values, relative for large ones
    if (!(error <= kQuadTol * std::max(1.0, std::abs(value)))) {
        throw QuadratureFailure(std::string(what) + ": error estimate " + std::to_string(error));
    }
}

// (eta')^{-1}(s) = 1/(1 + ln(1 + 1/s)) for the relay approximation.
double relay_inverse(double s) { return s <= 0.0 ? 0.0 : 1.0 / (1.0 + std::log1p(1.0 / s)); }

// integral_0^r (eta')^{-1}(s) ds for r <= kRelaySplit. With u = ln(1 + 1/s) the
// piece becomes integral_{u_r}^inf e^{-u} / ((1+u)(1-e^{-u})^2) du.
double relay_legendre_near_zero(double r) {
    const double u_r = std::log1p(1.0 / r);
    // Building the abscissa tables dominates the cost of a call, so keep one per thread.
    static thread_local boost::math::quadrature::exp_sinh<double> integrator;
    double error = 0.0;
    const double value = integrator.integrate(
        [u_r](double w) {
            const double u = u_r + w;
            const double em = -std::expm1(-u);
            return std::exp(-u) / ((1.0 + u) * em * em);
        },
        1e-13, &error);
    check_tolerance(error, value, "relay legendre transform near zero");
    return value;
}

double relay_legendre(double r) {
    if (r <= kRelaySplit) return relay_legendre_near_zero(r);
    // s = e^x flattens the logarithmic behaviour near the split point
    double error = 0.0;
    const double tail = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [](double x) {
            const double s = std::exp(x);
            return relay_inverse(s) * s;
        },
        std::log(kRelaySplit), std::log(r), 10, 1e-12, &error);
    check_tolerance(error, tail, "relay legendre transform");
    static const double head = relay_legendre_near_zero(kRelaySplit);
    return head + tail;
}

double relay_eta(double r) {
    if (r <= 0.0) return 0.0;
    static thread_local boost::math::quadrature::tanh_sinh<double> integrator;
    double error = 0.0;
    const double value =
        integrator.integrate([](double s) { return eta_prime(CostKind::RelayApprox, s); }, 0.0, r, 1e-13, &error);
    check_tolerance(error, value, "relay eta");
    return value;
}

void check_argument(CostKind cost, double r) {
    if (!(r >= 0.0)) throw DomainLimit(std::string(to_string(cost)) + ": negative or NaN argument");
    if (r >= domain_limit(cost)) throw DomainLimit(std::string(to_string(cost)) + ": argument beyond domain");
}

}  // namespace

double domain_limit(CostKind cost) {
    switch (cost) {
        case CostKind::LnCos: return 0.5 * kPi;
        case CostKind::RelayApprox: return 1.0;
        default: return std::numeric_limits<double>::infinity();
    }
}

double eta_value(CostKind cost, double r) {
    check_argument(cost, r);
    switch (cost) {
        case CostKind::Quadratic: return 0.5 * r * r;
        case CostKind::Cosh: {
            const double h = std::sinh(0.5 * r);
            return 2.0 * h * h;  // cosh r - 1 without cancellation
        }
        case CostKind::LnCos: return -std::log(std::cos(r));
        case CostKind::RelayApprox: return relay_eta(r);
    }
    return 0.0;
}

double eta_prime(CostKind cost, double r) {
    check_argument(cost, r);
    switch (cost) {
        case CostKind::Quadratic: return r;
        case CostKind::Cosh: return std::sinh(r);
        case CostKind::LnCos: return std::tan(r);
        case CostKind::RelayApprox: return r <= 0.0 ? 0.0 : 1.0 / std::expm1(1.0 / r - 1.0);
    }
    return 0.0;
}

double eta_prime_inverse(CostKind cost, double r) {
    if (!(r >= 0.0)) throw DomainLimit("eta_prime_inverse: negative or NaN argument");
    switch (cost) {
        case CostKind::Quadratic: return r;
        case CostKind::Cosh: return std::asinh(r);
        case CostKind::LnCos: return std::atan(r);
        case CostKind::RelayApprox: return relay_inverse(r);
    }
    return 0.0;
}

double legendre_transform(CostKind cost, double r) {
    if (!(r >= 0.0)) throw DomainLimit("legendre_transform: negative or NaN argument");
    if (r == 0.0) return 0.0;
    if (cost == CostKind::RelayApprox) return relay_legendre(r);
    return r * legendre_ratio(cost, r);
}

double legendre_ratio(CostKind cost, double r) {
    if (!(r >= 0.0)) throw DomainLimit("legendre_ratio: negative or NaN argument");
    if (r < kTinyRatio) return 0.0;
    switch (cost) {
        case CostKind::Quadratic: return 0.5 * r;
        case CostKind::Cosh: return std::asinh(r) - r / (std::sqrt(r * r + 1.0) + 1.0);
        case CostKind::LnCos: return std::atan(r) - std::log1p(r * r) / (2.0 * r);
        case CostKind::RelayApprox: return relay_legendre(r) / r;
    }
    return 0.0;
}

std::pair<EpsilonSchedule, EpsilonSchedule> saturating_schedules(CostKind cost, double vbar, double wbar,
                                                                 double sigma) {
    if (!(vbar > 0.0 && wbar > 0.0 && sigma > 0.0)) {
        throw ValidationError("saturating_schedules: vbar, wbar, sigma must be positive");
    }
    double factor = 0.0;
    if (cost == CostKind::LnCos) {
        factor = 2.0 / kPi;
    } else if (cost == CostKind::RelayApprox) {
        factor = 1.0;
    } else {
        throw ValidationError("saturating_schedules: cost has unbounded (eta')^{-1}");
    }
    return {EpsilonSchedule::rho_dependent(vbar, sigma, factor), EpsilonSchedule::constant(factor * wbar)};
}

IocControllerSpec quadratic_ioc(const ClfSpec& clf, double eps1, double eps2) {
    return {clf, CostKind::Quadratic, CostKind::Quadratic, EpsilonSchedule::constant(eps1),
            EpsilonSchedule::constant(eps2), IocVariant::Optimal};
}

InputPair ioc_control(const IocControllerSpec& spec, const PolarState& state) {
    const LiePair nu = lie_derivatives(spec.clf, state);
    const double e1 = spec.eps1(state.rho);
    const double e2 = spec.eps2(state.rho);
    const double r1 = e1 * std::abs(nu.nu1);
    const double r2 = e2 * std::abs(nu.nu2);
    double g1 = 0.0;
    double g2 = 0.0;
    if (spec.variant == IocVariant::Optimal) {
        g1 = eta_prime_inverse(spec.cost1, r1);
        g2 = eta_prime_inverse(spec.cost2, r2);
    } else {
        g1 = legendre_ratio(spec.cost1, r1);
        g2 = legendre_ratio(spec.cost2, r2);
    }
    return {-state.rho * e1 * g1 * sgn(nu.nu1), -e2 * g2 * sgn(nu.nu2)};
}

double running_cost(const IocControllerSpec& spec, const PolarState& state) {
    const LiePair nu = lie_derivatives(spec.clf, state);
    return legendre_transform(spec.cost1, spec.eps1(state.rho) * std::abs(nu.nu1)) +
           legendre_transform(spec.cost2, spec.eps2(state.rho) * std::abs(nu.nu2));
}

double control_penalty(const IocControllerSpec& spec, const PolarState& state, const InputPair& input) {
    double p1 = 0.0;
    if (input.v != 0.0) p1 = eta_value(spec.cost1, std::abs(input.v) / (spec.eps1(state.rho) * state.rho));
    return p1 + eta_value(spec.cost2, std::abs(input.omega) / spec.eps2(state.rho));
}

double quadratic_integrand_doubled(const IocControllerSpec& spec, const PolarState& state,
                                   const InputPair& input) {
    const LiePair nu = lie_derivatives(spec.clf, state);
    const double e1 = spec.eps1(state.rho);
    const double e2 = spec.eps2(state.rho);
    const double a = e1 * nu.nu1;
    const double b = e2 * nu.nu2;
    const double c = input.v == 0.0 ? 0.0 : input.v / (e1 * state.rho);
    const double d = input.omega / e2;
    return a * a + b * b + c * c + d * d;
}

CostReport evaluate_cost_J(const Trajectory& traj, const IocControllerSpec& spec, double tail_fraction) {
    CostReport report;
    if (traj.samples.empty()) return report;
    report.V0 = clf_value(spec.clf, traj.front().state);
    report.tail_bound = clf_value(spec.clf, traj.back().state);
    if (report.V0 == 0.0) return report;
    if (report.tail_bound >= tail_fraction * report.V0) {
        throw TailNotConverged("evaluate_cost_J: V(end) = " + std::to_string(report.tail_bound) +
                               " not below " + std::to_string(tail_fraction) + " V(0)");
    }
    auto integrand = [&](const Sample& s) {
        if (!(s.state.rho > 0.0)) return 0.0;
        return running_cost(spec, s.state) + control_penalty(spec, s.state, s.input);
    };
    double prev = integrand(traj.samples[0]);
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        const double cur = integrand(traj.samples[i]);
        report.J += 0.5 * (prev + cur) * (traj.samples[i].t - traj.samples[i - 1].t);
        prev = cur;
    }
    return report;
}

const char* to_string(CostKind cost) {
    switch (cost) {
        case CostKind::Quadratic: return "Quadratic";
        case CostKind::Cosh: return "Cosh";
        case CostKind::LnCos: return "LnCos";
        case CostKind::RelayApprox: return "RelayApprox";
    }
    return "?";
}

std::optional<CostKind> parse_cost_kind(std::string_view name) {
    for (CostKind c : {CostKind::Quadratic, CostKind::Cosh, CostKind::LnCos, CostKind::RelayApprox}) {
        if (name == to_string(c)) return c;
    }
    return std::nullopt;
}

}  // namespace park
