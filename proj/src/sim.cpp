#include "park/sim.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint/integrate/integrate.hpp>
#include <boost/numeric/odeint/stepper/generation.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta_dopri5.hpp>
#include <cmath>
#include <limits>
#include <sstream>

namespace park {
namespace {

namespace odeint = boost::numeric::odeint;

using State = std::array<double, 5>;  // rho, delta, gamma, eps1_hat, eps2_hat

PolarState polar_of(const State& x) { return {x[0], x[1], x[2]}; }
AdaptiveState estimates_of(const State& x) { return {x[3], x[4]}; }

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Time at which a prescribed-time run stops; the scaling blows up at t0 + T.
constexpr double kPtStopFraction = 1e-4;

double pt_stop_time(const PtSpec& spec) { return spec.t0 + spec.T * (1.0 - kPtStopFraction); }

// SingularRho with V below this counts as parked.
constexpr double kParkedAtGuardV = 1e-6;

class ClosedLoop {
public:
    explicit ClosedLoop(const Scenario& sc)
        : sc_(sc), clf_(scenario_clf(sc.controller)), adaptive_(std::holds_alternative<AdaptiveSpec>(sc.controller)) {}

    bool adaptive() const { return adaptive_; }
    const ClfSpec& clf() const { return clf_; }
    bool frozen = false;

    // The law sees rho lifted to the floor; `scale` maps floor velocities back.
    struct Evaluation {
        PolarState state;
        InputPair input;
        double scale = 1.0;
    };

    Evaluation evaluate(double t, const State& x) const {
        Evaluation e{polar_of(x), {0.0, 0.0}, 1.0};
        if (sc_.rho_floor > 0.0 && e.state.rho < sc_.rho_floor) {
            e.scale = std::max(e.state.rho, 0.0) / sc_.rho_floor;
            e.state.rho = sc_.rho_floor;
        }
        if (!frozen) e.input = evaluate_controller(sc_.controller, t, e.state, estimates_of(x));
        return e;
    }

    bool evaluable(const State& x) const { return sc_.rho_floor > 0.0 ? x[0] >= 0.0 : x[0] > kRhoMin; }

    // Input actually applied to the vehicle.
    InputPair input(double t, const State& x) const {
        const Evaluation e = evaluate(t, x);
        return {e.input.v * e.scale, e.input.omega};
    }

    void rhs(const State& x, State& dx, double t) const {
        dx.fill(0.0);
        if (frozen) return;
        const Evaluation e = evaluate(t, x);
        const PolarDerivative d = slip_dynamics(e.state, e.input, sc_.slip);
        dx[0] = d.rho_dot * e.scale;
        dx[1] = d.delta_dot;
        dx[2] = d.gamma_dot;
        if (adaptive_) {
            const AdaptiveState a = update_law(std::get<AdaptiveSpec>(sc_.controller), e.state);
            dx[3] = a.eps1_hat;
            dx[4] = a.eps2_hat;
        }
    }

    double value(const State& x) const {
        PolarState s = polar_of(x);
        s.rho = std::max(s.rho, 0.0);
        return clf_value(clf_, s);
    }

    double value_rate(const State& x, double t) const {
        State dx;
        rhs(x, dx, t);
        PolarState s = polar_of(x);
        s.rho = std::max(s.rho, 0.0);
        const Gradient g = clf_gradient(clf_, s);
        return g.d_rho * dx[0] + g.d_delta * dx[1] + g.d_gamma * dx[2];
    }

    double running(const PolarState& s) const {
        if (const auto* ioc = std::get_if<IocControllerSpec>(&sc_.controller)) {
            return s.rho > 0.0 ? running_cost(*ioc, s) : 0.0;
        }
        return kNaN;
    }

private:
    const Scenario& sc_;
    ClfSpec clf_;
    bool adaptive_;
};

void rk4_step(const ClosedLoop& loop, State& x, double t, double h) {
    State k1, k2, k3, k4, tmp;
    loop.rhs(x, k1, t);
    for (int i = 0; i < 5; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    loop.rhs(tmp, k2, t + 0.5 * h);
    for (int i = 0; i < 5; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    loop.rhs(tmp, k3, t + 0.5 * h);
    for (int i = 0; i < 5; ++i) tmp[i] = x[i] + h * k3[i];
    loop.rhs(tmp, k4, t + h);
    for (int i = 0; i < 5; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

bool finite_state(const State& x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

class Recorder {
public:
    Recorder(const Scenario& sc, const ClosedLoop& loop, Trajectory& traj) : sc_(sc), loop_(loop), traj_(traj) {}

    // Updates the step extrema and optionally stores a sample.
    void observe(double t, const State& x, bool store) {
        const PolarState s = polar_of(x);
        InputPair u{0.0, 0.0};
        if (loop_.evaluable(x)) u = loop_.input(t, x);
        const CartesianPose pose = to_cartesian(s, sc_.target);
        StepExtrema& e = traj_.extrema;
        e.min_y = std::min(e.min_y, pose.y);
        e.max_y = std::max(e.max_y, pose.y);
        e.min_delta = std::min(e.min_delta, s.delta);
        e.max_delta = std::max(e.max_delta, s.delta);
        e.min_v = std::min(e.min_v, u.v);
        e.max_abs_v = std::max(e.max_abs_v, std::abs(u.v));
        e.max_abs_omega = std::max(e.max_abs_omega, std::abs(u.omega));
        if (!store) return;
        Sample sample;
        sample.t = t;
        sample.state = s;
        sample.pose = pose;
        sample.input = u;
        sample.V = loop_.value(x);
        sample.running_cost = loop_.frozen ? (std::isnan(loop_.running(s)) ? kNaN : 0.0) : loop_.running(s);
        if (loop_.adaptive()) {
            sample.eps1_hat = x[3];
            sample.eps2_hat = x[4];
        }
        traj_.samples.push_back(sample);
    }

private:
    const Scenario& sc_;
    const ClosedLoop& loop_;
    Trajectory& traj_;
};

// Finite-difference Jacobian and time derivative of the closed loop.
void fd_jacobian(const ClosedLoop& loop, const State& x, double t, std::array<State, 5>& J, State& dfdt) {
    State fp, fm;
    for (int j = 0; j < 5; ++j) {
        // rho is perturbed relatively so the stencil never crosses the singularity
        const double h = j == 0 ? std::max(1e-7 * std::abs(x[0]), 1e-300) : 1e-7 * std::max(1.0, std::abs(x[j]));
        State xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        loop.rhs(xp, fp, t);
        loop.rhs(xm, fm, t);
        for (int i = 0; i < 5; ++i) J[i][j] = (fp[i] - fm[i]) / (2.0 * h);
    }
    const double ht = 1e-7 * std::max(1.0, std::abs(t));
    const double lo = std::max(0.0, t - ht);
    loop.rhs(x, fp, t + ht);
    loop.rhs(x, fm, lo);
    for (int i = 0; i < 5; ++i) dfdt[i] = (fp[i] - fm[i]) / (t + ht - lo);
}

// Dense LU with partial pivoting for the 5x5 stage systems.
class Lu5 {
public:
    explicit Lu5(std::array<State, 5> a) : a_(a) {
        for (int k = 0; k < 5; ++k) {
            int p = k;
            for (int i = k + 1; i < 5; ++i) {
                if (std::abs(a_[i][k]) > std::abs(a_[p][k])) p = i;
            }
            if (a_[p][k] == 0.0) throw Error("rosenbrock: singular stage matrix");
            std::swap(a_[k], a_[p]);
            perm_[k] = p;
            for (int i = k + 1; i < 5; ++i) {
                a_[i][k] /= a_[k][k];
                for (int j = k + 1; j < 5; ++j) a_[i][j] -= a_[i][k] * a_[k][j];
            }
        }
    }

    State solve(State b) const {
        for (int k = 0; k < 5; ++k) std::swap(b[k], b[perm_[k]]);
        for (int i = 0; i < 5; ++i) {
            for (int j = 0; j < i; ++j) b[i] -= a_[i][j] * b[j];
        }
        for (int i = 4; i >= 0; --i) {
            for (int j = i + 1; j < 5; ++j) b[i] -= a_[i][j] * b[j];
            b[i] /= a_[i][i];
        }
        return b;
    }

private:
    std::array<State, 5> a_;
    std::array<int, 5> perm_{};
};

// One attempt of the L-stable Rosenbrock 2(3) pair of Shampine and Reichelt.
// On success advances x, t and proposes the next h; on failure only shrinks h.
bool rosenbrock23_try(const ClosedLoop& loop, State& x, double& t, double& h, double rtol, double atol) {
    const double d = 1.0 / (2.0 + std::sqrt(2.0));
    const double e32 = 6.0 + std::sqrt(2.0);
    std::array<State, 5> J;
    State T, F0, F1, F2, tmp;
    fd_jacobian(loop, x, t, J, T);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) J[i][j] = (i == j ? 1.0 : 0.0) - h * d * J[i][j];
    }
    const Lu5 W(J);
    loop.rhs(x, F0, t);
    for (int i = 0; i < 5; ++i) tmp[i] = F0[i] + h * d * T[i];
    const State k1 = W.solve(tmp);
    for (int i = 0; i < 5; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    loop.rhs(tmp, F1, t + 0.5 * h);
    for (int i = 0; i < 5; ++i) tmp[i] = F1[i] - k1[i];
    State k2 = W.solve(tmp);
    for (int i = 0; i < 5; ++i) k2[i] += k1[i];
    State xn;
    for (int i = 0; i < 5; ++i) xn[i] = x[i] + h * k2[i];
    loop.rhs(xn, F2, t + h);
    for (int i = 0; i < 5; ++i) tmp[i] = F2[i] - e32 * (k2[i] - F1[i]) - 2.0 * (k1[i] - F0[i]) + h * d * T[i];
    const State k3 = W.solve(tmp);
    double err = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double e = h / 6.0 * (k1[i] - 2.0 * k2[i] + k3[i]);
        const double scale = atol + rtol * std::max(std::abs(x[i]), std::abs(xn[i]));
        err = std::max(err, std::abs(e) / scale);
    }
    if (!std::isfinite(err)) {
        h *= 0.25;
        return false;
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.8 * std::cbrt(1.0 / err), 0.1, 5.0);
    if (err > 1.0) {
        h *= factor;
        return false;
    }
    x = xn;
    t += h;
    h *= factor;
    return true;
}

double end_time(const Scenario& sc) {
    if (const auto* pt = std::get_if<PtSpec>(&sc.controller)) {
        return std::min(sc.horizon, pt_stop_time(*pt));
    }
    return sc.horizon;
}

}  // namespace

ClfSpec scenario_clf(const ControllerSpec& controller) {
    return std::visit(
        Overloaded{
            [](const ZeroController&) { return ClfSpec{ClfKind::BidirBackstep, {}}; },
            [](const GesControllerSpec& c) { return ges_clf(c); },
            [](const IocControllerSpec& c) { return c.clf; },
            [](const AdaptiveSpec& c) { return c.clf; },
            [](const PtSpec& c) { return ges_clf(c.base); },
            [](const FxtSpec& c) { return ges_clf(c.base); },
            [](const SafetySpec& c) { return ClfSpec{ClfKind::BarFliSafety, c.gains}; },
        },
        controller);
}

InputPair evaluate_controller(const ControllerSpec& controller, double t, const PolarState& state,
                              const AdaptiveState& estimates) {
    return std::visit(
        Overloaded{
            [](const ZeroController&) { return InputPair{0.0, 0.0}; },
            [&](const GesControllerSpec& c) { return ges_control(c, state); },
            [&](const IocControllerSpec& c) { return ioc_control(c, state); },
            [&](const AdaptiveSpec& c) { return adaptive_control(c, estimates, state); },
            [&](const PtSpec& c) { return pt_control(c, t, state); },
            [&](const FxtSpec& c) { return fxt_control(c, state); },
            [&](const SafetySpec& c) { return nonovershoot_control(c, state); },
        },
        controller);
}

double controller_decay_constant(const ControllerSpec& controller) {
    if (const auto* g = std::get_if<GesControllerSpec>(&controller)) return decay_constant(*g);
    return 0.0;
}

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

void validate_gains(const ClfGains& g, const std::string& who) {
    require(g.k1 > 0.0 && g.k2 > 0.0 && g.k3 > 0.0 && g.k4 > 0.0, who + ": gains must be positive");
}

}  // namespace

void validate(const Scenario& sc) {
    require(sc.dt > 0.0 && std::isfinite(sc.dt), "dt must be positive");
    require(sc.horizon > 0.0 && std::isfinite(sc.horizon), "horizon must be positive");
    require(sc.sample_every >= 1, "sample_every must be >= 1");
    require(sc.rtol > 0.0 && sc.atol > 0.0, "tolerances must be positive");
    require(sc.v_dead >= 0.0, "v_dead must be nonnegative");
    require(sc.rho_floor == 0.0 || sc.rho_floor > kRhoMin, "rho_floor must be 0 or above the singularity guard");
    require(sc.slip.b1 > 0.0 && sc.slip.b2 > 0.0, "slip coefficients must be positive");
    require(is_finite(sc.initial) && sc.initial.rho > kRhoMin, "initial rho must exceed the singularity guard");
    std::visit(Overloaded{
                   [](const ZeroController&) {},
                   [](const GesControllerSpec& c) { validate_gains(c.gains, "controller"); },
                   [](const IocControllerSpec& c) {
                       validate_gains(c.clf.gains, "clf");
                       require(c.eps1.value > 0.0 && c.eps2.value > 0.0, "epsilon must be positive");
                   },
                   [](const AdaptiveSpec& c) {
                       validate_gains(c.clf.gains, "clf");
                       require(c.mu1 > 0.0 && c.mu2 > 0.0 && c.n0 > 0.0, "mu and n0 must be positive");
                   },
                   [&](const PtSpec& c) {
                       validate_gains(c.base.gains, "controller");
                       require(c.T > 0.0, "T must be positive");
                       require(c.t0 == 0.0, "t0 must be 0 (runs start at t = 0)");
                       require(sc.horizon <= c.t0 + c.T, "horizon beyond the prescribed time");
                   },
                   [](const FxtSpec& c) {
                       validate_gains(c.base.gains, "controller");
                       require(c.T > 0.0, "T must be positive");
                       require(c.p > 0.0 && c.p < 0.5, "p must lie in (0, 1/2)");
                   },
                   [](const SafetySpec& c) { validate_gains(c.gains, "controller"); },
               },
               sc.controller);
    const ClfSpec clf = scenario_clf(sc.controller);
    try {
        clf_value(clf, sc.initial);
    } catch (const DomainViolation& e) {
        throw ValidationError(std::string("initial state outside the CLF domain: ") + e.what());
    }
}

Trajectory integrate(const Scenario& sc) {
    validate(sc);
    ClosedLoop loop(sc);
    Trajectory traj;
    traj.adaptive = loop.adaptive();
    Recorder rec(sc, loop, traj);

    State x{sc.initial.rho, sc.initial.delta, sc.initial.gamma, sc.initial_estimates.eps1_hat,
            sc.initial_estimates.eps2_hat};
    double t = 0.0;
    const double t_end = end_time(sc);
    const double t_eps = 1e-12 * std::max(1.0, t_end);
    double h = sc.dt;

    auto sys = [&loop](const State& s, State& ds, double tt) { loop.rhs(s, ds, tt); };
    auto dopri = odeint::make_controlled(sc.atol, sc.rtol, odeint::runge_kutta_dopri5<State>());

    rec.observe(t, x, true);
    while (t < t_end - t_eps) {
        const double V = loop.value(x);
        if (!loop.frozen && V <= sc.v_dead) {
            if (sc.stop_when_parked) {
                traj.status = RunStatus::Parked;
                break;
            }
            loop.frozen = true;
            h = sc.dt;
        }
        if (!loop.evaluable(x)) {
            traj.status = V <= kParkedAtGuardV ? RunStatus::Parked : RunStatus::SingularRho;
            break;
        }
        try {
            if (sc.scheme == Scheme::Rk4 || loop.frozen) {
                h = std::min(sc.dt, t_end - t);
                if (const auto* pt = std::get_if<PtSpec>(&sc.controller); pt && !loop.frozen) {
                    // keep the step fixed in dilated time
                    h = std::min(h, sc.dt / pt_scale(*pt, t));
                }
                if (sc.step_halving && !loop.frozen && V > 0.0) {
                    const double rate = std::abs(loop.value_rate(x, t));
                    while (rate * h > 0.1 * V && h > 1e-14) h *= 0.5;
                }
                rk4_step(loop, x, t, h);
                t += h;
            } else if (sc.scheme == Scheme::Dopri5) {
                h = std::min(h, t_end - t);
                int tries = 0;
                while (dopri.try_step(sys, x, t, h) == odeint::fail) {
                    if (++tries > 500) throw Error("dopri5: step size control failed");
                }
            } else {
                h = std::min(h, t_end - t);
                int tries = 0;
                while (!rosenbrock23_try(loop, x, t, h, sc.rtol, sc.atol)) {
                    if (++tries > 500 || h < 1e-14) throw Error("rosenbrock: step size control failed");
                }
            }
        } catch (const SingularRho&) {
            traj.status = V <= kParkedAtGuardV ? RunStatus::Parked : RunStatus::SingularRho;
            break;
        }
        ++traj.steps;
        if (!finite_state(x)) {
            traj.status = RunStatus::NonFiniteState;
            std::ostringstream msg;
            msg << "non-finite state at t = " << t;
            traj.message = msg.str();
            break;
        }
        rec.observe(t, x, traj.steps % sc.sample_every == 0);
    }
    if (traj.samples.back().t != t && traj.status != RunStatus::NonFiniteState) rec.observe(t, x, true);
    return traj;
}

LyapunovReport verify_lyapunov(const Trajectory& traj, double c, double rel_tol) {
    LyapunovReport report;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
        const Sample& a = traj.samples[i];
        const Sample& b = traj.samples[i + 1];
        const double allowed = a.V * std::exp(-c * (b.t - a.t));
        if (allowed <= 0.0) {
            if (b.V > 0.0) report.passed = false;
            continue;
        }
        const double margin = b.V / allowed - 1.0;
        if (margin > worst) {
            worst = margin;
            report.worst_index = i;
        }
        if (margin > rel_tol) report.passed = false;
    }
    if (std::isfinite(worst)) report.worst_margin = worst;
    return report;
}

ExponentialFit fit_exponential(const Trajectory& traj, const std::function<double(double)>& time_map) {
    if (traj.samples.empty()) throw InsufficientDecay("fit_exponential: empty trajectory");
    const double n0 = norm(traj.front().state);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (const Sample& s : traj.samples) {
        const double r = norm(s.state);
        if (r < 1e-8 || r > 0.5 * n0) continue;
        const double x = time_map ? time_map(s.t) : s.t;
        const double y = std::log(r);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 10) throw InsufficientDecay("fit_exponential: fewer than 10 samples in the fit window");
    const double dn = static_cast<double>(n);
    const double denom = dn * sxx - sx * sx;
    if (!(denom > 0.0)) throw InsufficientDecay("fit_exponential: degenerate time window");
    const double slope = (dn * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / dn;
    return {std::exp(intercept) / n0, -slope, n};
}

namespace {

template <class Pred>
double first_time_holding(const Trajectory& traj, Pred inside) {
    if (traj.samples.empty() || !inside(traj.back())) return kNaN;
    std::size_t i = traj.samples.size();
    while (i > 0 && inside(traj.samples[i - 1])) --i;
    return traj.samples[i].t;
}

}  // namespace

double settling_time(const Trajectory& traj, double tol) {
    return first_time_holding(traj, [tol](const Sample& s) { return norm(s.state) <= tol; });
}

double parked_time(const Trajectory& traj, double v_dead) {
    return first_time_holding(traj, [v_dead](const Sample& s) { return s.V <= v_dead; });
}

Metrics compute_metrics(const Scenario& sc, const Trajectory& traj) {
    Metrics m;
    m.status = traj.status;
    if (traj.samples.empty()) return m;
    m.settling_time = settling_time(traj);
    try {
        ExponentialFit fit;
        if (const auto* pt = std::get_if<PtSpec>(&sc.controller)) {
            const PtSpec spec = *pt;
            fit = fit_exponential(traj, [spec](double t) { return time_dilation(spec, t) - spec.t0; });
        } else {
            fit = fit_exponential(traj);
        }
        m.lambda_hat = fit.lambda;
        m.K_hat = fit.K;
    } catch (const InsufficientDecay&) {
    }
    m.max_v = traj.extrema.max_abs_v;
    m.max_omega = traj.extrema.max_abs_omega;
    m.min_y = traj.extrema.min_y;
    m.final_V = traj.back().V;
    if (const auto* ioc = std::get_if<IocControllerSpec>(&sc.controller)) {
        try {
            m.J = evaluate_cost_J(traj, *ioc).J;
        } catch (const TailNotConverged&) {
        }
    }
    return m;
}

const char* to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::Rk4: return "rk4";
        case Scheme::Dopri5: return "dopri5";
        case Scheme::Rosenbrock: return "rosenbrock";
    }
    return "?";
}

const char* to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Completed: return "Completed";
        case RunStatus::Parked: return "Parked";
        case RunStatus::SingularRho: return "SingularRho";
        case RunStatus::HorizonExceeded: return "HorizonExceeded";
        case RunStatus::NonFiniteState: return "NonFiniteState";
    }
    return "?";
}

}  // namespace park
