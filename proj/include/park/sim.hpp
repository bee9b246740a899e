#pragma once

#include <functional>
#include <string>
#include <variant>

#include "park/adaptive.hpp"
#include "park/controllers.hpp"
#include "park/inverse_optimal.hpp"
#include "park/safety.hpp"
#include "park/timed.hpp"
#include "park/trajectory.hpp"

namespace park {

/// Applies no input; useful for plumbing tests.
struct ZeroController {};

using ControllerSpec =
    std::variant<ZeroController, GesControllerSpec, IocControllerSpec, AdaptiveSpec, PtSpec, FxtSpec, SafetySpec>;

/// Rk4: classical fixed step (default). Dopri5: adaptive Dormand-Prince 5(4).
/// Rosenbrock: adaptive L-stable linearly implicit 2(3) pair for stiff runs.
enum class Scheme { Rk4, Dopri5, Rosenbrock };

struct Scenario {
    std::string name;
    ControllerSpec controller = ZeroController{};
    PolarState initial{};
    AdaptiveState initial_estimates{};
    SlipParams slip{};
    CartesianPose target{};
    double dt = 1e-3;  // fixed step, or initial step for adaptive schemes
    double horizon = 10.0;
    std::size_t sample_every = 1;  // keep every n-th accepted step
    Scheme scheme = Scheme::Rk4;
    double rtol = 1e-9;
    double atol = 1e-12;
    bool stop_when_parked = true;  // otherwise freeze the state with zero input
    double v_dead = kParkedV;
    bool step_halving = false;  // halve while |dV/dt| h > 0.1 V (fixed-time runs)
    // 0 disables. Otherwise, below this rho the law is evaluated at the floor and
    // rho decays proportionally, so the angles keep evolving after rho underflows.
    // Exact for laws with v proportional to rho and omega independent of rho.
    double rho_floor = 0.0;
};

/// The CLF used for the V channel and for parking detection.
ClfSpec scenario_clf(const ControllerSpec& controller);

/// Controller output at time t.
InputPair evaluate_controller(const ControllerSpec& controller, double t, const PolarState& state,
                              const AdaptiveState& estimates);

/// Decay constant of the certifying CLF, or 0 when the family has none.
double controller_decay_constant(const ControllerSpec& controller);

/// Throws ValidationError on nonsensical parameters or an initial state outside the domain.
void validate(const Scenario& scenario);

Trajectory integrate(const Scenario& scenario);

struct LyapunovReport {
    bool passed = true;
    double worst_margin = 0.0;  // max of V(i+1) / (V(i) exp(-c dt)) - 1
    std::size_t worst_index = 0;
};

LyapunovReport verify_lyapunov(const Trajectory& trajectory, double c_underline, double rel_tol = 1e-4);

struct ExponentialFit {
    double K = 0.0;
    double lambda = 0.0;
    std::size_t points = 0;
};

/// Least squares of log|s| against time_map(t) over samples with |s| in [1e-8, 0.5 |s0|].
/// Throws InsufficientDecay with fewer than 10 such samples.
ExponentialFit fit_exponential(const Trajectory& trajectory,
                               const std::function<double(double)>& time_map = nullptr);

/// First time after which |s| <= tol for all later samples; NaN if never.
double settling_time(const Trajectory& trajectory, double tol = 1e-3);

/// First time after which V <= v_dead for all later samples; NaN if never.
double parked_time(const Trajectory& trajectory, double v_dead = kParkedV);

struct Metrics {
    double settling_time = kNaN;
    double lambda_hat = kNaN;
    double K_hat = kNaN;
    double max_v = 0.0;
    double max_omega = 0.0;
    double min_y = 0.0;
    double J = kNaN;
    double final_V = kNaN;
    RunStatus status = RunStatus::Completed;
};

Metrics compute_metrics(const Scenario& scenario, const Trajectory& trajectory);

const char* to_string(Scheme scheme);

}  // namespace park
