#include "park/scenario_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace park {
namespace {

using nlohmann::json;

// Object view that rejects keys outside `allowed`.
class Section {
public:
    Section(const json& j, std::string where, std::initializer_list<const char*> allowed)
        : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) fail("expected an object");
        std::set<std::string> keys(allowed.begin(), allowed.end());
        for (const auto& item : j_.items()) {
            if (!keys.count(item.key())) fail("unknown key '" + item.key() + "'");
        }
    }

    bool has(const char* key) const { return j_.contains(key); }
    const json& raw(const char* key) const { return j_.at(key); }
    std::string path(const char* key) const { return where_ + "." + key; }

    double number(const char* key) const {
        if (!has(key)) fail(std::string("missing key '") + key + "'");
        const json& v = j_.at(key);
        if (!v.is_number()) fail(std::string("'") + key + "' must be a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail(std::string("'") + key + "' must be finite");
        return d;
    }
    double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

    std::string string(const char* key) const {
        if (!has(key) || !j_.at(key).is_string()) fail(std::string("'") + key + "' must be a string");
        return j_.at(key).get<std::string>();
    }
    std::string string(const char* key, const std::string& fallback) const {
        return has(key) ? string(key) : fallback;
    }

    bool boolean(const char* key, bool fallback) const {
        if (!has(key)) return fallback;
        if (!j_.at(key).is_boolean()) fail(std::string("'") + key + "' must be a boolean");
        return j_.at(key).get<bool>();
    }

    [[noreturn]] void fail(const std::string& what) const { throw ValidationError(where_ + ": " + what); }

private:
    const json& j_;
    std::string where_;
};

ClfGains parse_gains(const json& j, const std::string& where, const PolarState* initial_for_midpoint = nullptr) {
    if (!j.is_array() || j.size() != 4) throw ValidationError(where + ": gains must be an array of 4 numbers");
    double k[4];
    for (int i = 0; i < 4; ++i) {
        if (i == 1 && initial_for_midpoint && j[i].is_string() && j[i].get<std::string>() == "midpoint") {
            try {
                k[i] = k2_midpoint(initial_for_midpoint->delta, initial_for_midpoint->gamma);
            } catch (const Error& e) {
                throw ValidationError(where + ": " + e.what());
            }
            continue;
        }
        if (!j[i].is_number()) throw ValidationError(where + ": gains must be numbers");
        k[i] = j[i].get<double>();
    }
    return {k[0], k[1], k[2], k[3]};
}

Direction parse_direction(const Section& s) {
    const std::string d = s.string("direction");
    if (d == "unidirectional") return Direction::Unidirectional;
    if (d == "bidirectional") return Direction::Bidirectional;
    s.fail("direction must be 'unidirectional' or 'bidirectional'");
}

GesControllerSpec parse_ges(const Section& s) {
    return {parse_direction(s), parse_gains(s.raw("gains"), s.path("gains"))};
}

EpsilonSchedule parse_eps(const json& j, const std::string& where) {
    if (j.is_number()) return EpsilonSchedule::constant(j.get<double>());
    Section s(j, where, {"bar", "sigma", "scale"});
    return EpsilonSchedule::rho_dependent(s.number("bar"), s.number("sigma"), s.number("scale", 1.0));
}

CostKind parse_cost(const Section& s, const char* key) {
    const auto c = parse_cost_kind(s.string(key, "Quadratic"));
    if (!c) s.fail(std::string("unknown cost in '") + key + "'");
    return *c;
}

ClfSpec parse_clf(const json& doc) {
    if (!doc.contains("clf")) throw ValidationError("scenario: this controller family needs a 'clf' section");
    Section s(doc.at("clf"), "clf", {"kind", "gains"});
    const auto kind = parse_clf_kind(s.string("kind"));
    if (!kind) s.fail("unknown kind");
    ClfGains g{};
    if (s.has("gains")) g = parse_gains(s.raw("gains"), "clf.gains");
    return {*kind, g};
}

Scheme parse_scheme(const std::string& name) {
    if (name == "rk4") return Scheme::Rk4;
    if (name == "dopri5") return Scheme::Dopri5;
    if (name == "rosenbrock") return Scheme::Rosenbrock;
    throw ValidationError("sim.scheme: expected rk4, dopri5 or rosenbrock");
}

Assertions parse_assertions(const json& j) {
    Section s(j, "assertions",
              {"status", "max_settling_time", "max_final_norm", "max_abs_v", "max_abs_omega", "max_y", "min_v",
               "lyapunov_decay", "min_lambda_ratio", "J_rel_tol"});
    Assertions a;
    if (s.has("status")) {
        const json& st = s.raw("status");
        if (!st.is_array()) s.fail("status must be an array of names");
        for (const auto& v : st) {
            const auto parsed = v.is_string() ? parse_run_status(v.get<std::string>()) : std::nullopt;
            if (!parsed) s.fail("unknown status");
            a.status.push_back(*parsed);
        }
    }
    auto opt = [&](const char* key, std::optional<double>& out) {
        if (s.has(key)) out = s.number(key);
    };
    opt("max_settling_time", a.max_settling_time);
    opt("max_final_norm", a.max_final_norm);
    opt("max_abs_v", a.max_abs_v);
    opt("max_abs_omega", a.max_abs_omega);
    opt("max_y", a.max_y);
    opt("min_v", a.min_v);
    opt("min_lambda_ratio", a.min_lambda_ratio);
    opt("J_rel_tol", a.J_rel_tol);
    if (s.has("lyapunov_decay")) a.lyapunov_decay = s.boolean("lyapunov_decay", false);
    return a;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ScenarioFile parse_scenario(const json& doc) {
    Section top(doc, "scenario",
                {"schema_version", "name", "description", "controller", "clf", "initial", "slip", "sim", "outputs",
                 "assertions", "expect_failure"});
    if (!top.has("schema_version") || !doc.at("schema_version").is_number_integer() ||
        doc.at("schema_version").get<int>() != kSchemaVersion) {
        top.fail("schema_version must be " + std::to_string(kSchemaVersion));
    }
    ScenarioFile file;
    Scenario& sc = file.scenario;
    sc.name = top.string("name");
    file.description = top.string("description", "");
    file.expect_failure = top.boolean("expect_failure", false);

    if (!top.has("initial")) top.fail("missing 'initial'");
    Section init(doc.at("initial"), "initial", {"rho", "delta", "gamma", "target", "eps1_hat", "eps2_hat"});
    sc.initial = {init.number("rho"), init.number("delta"), init.number("gamma")};
    sc.initial_estimates = {init.number("eps1_hat", 0.0), init.number("eps2_hat", 0.0)};
    if (init.has("target")) {
        Section tg(init.raw("target"), "initial.target", {"x", "y", "theta"});
        sc.target = {tg.number("x", 0.0), tg.number("y", 0.0), tg.number("theta", 0.0)};
    }

    if (!top.has("controller")) top.fail("missing 'controller'");
    Section ctrl(doc.at("controller"), "controller", {"family", "params"});
    const std::string family = ctrl.string("family");
    static const json kEmpty = json::object();
    const json& pj = ctrl.has("params") ? ctrl.raw("params") : kEmpty;
    const bool needs_clf = family == "inverse_optimal" || family == "adaptive";
    if (!needs_clf && top.has("clf")) top.fail("'clf' is only used by inverse_optimal and adaptive");

    if (family == "zero") {
        Section p(pj, "controller.params", {});
        sc.controller = ZeroController{};
    } else if (family == "ges") {
        Section p(pj, "controller.params", {"direction", "gains"});
        sc.controller = parse_ges(p);
    } else if (family == "inverse_optimal") {
        Section p(pj, "controller.params", {"cost1", "cost2", "eps1", "eps2", "variant"});
        IocControllerSpec spec;
        spec.clf = parse_clf(doc);
        spec.cost1 = parse_cost(p, "cost1");
        spec.cost2 = parse_cost(p, "cost2");
        if (p.has("eps1")) spec.eps1 = parse_eps(p.raw("eps1"), "controller.params.eps1");
        if (p.has("eps2")) spec.eps2 = parse_eps(p.raw("eps2"), "controller.params.eps2");
        const std::string variant = p.string("variant", "optimal");
        if (variant == "optimal") {
            spec.variant = IocVariant::Optimal;
        } else if (variant == "continuous") {
            spec.variant = IocVariant::Continuous;
        } else {
            p.fail("variant must be 'optimal' or 'continuous'");
        }
        sc.controller = spec;
    } else if (family == "adaptive") {
        Section p(pj, "controller.params", {"mu1", "mu2", "n0"});
        sc.controller = AdaptiveSpec{parse_clf(doc), p.number("mu1"), p.number("mu2"), p.number("n0", 1.0)};
    } else if (family == "prescribed_time") {
        Section p(pj, "controller.params", {"direction", "gains", "T", "t0"});
        sc.controller = PtSpec{parse_ges(p), p.number("T"), p.number("t0", 0.0)};
    } else if (family == "fixed_time") {
        Section p(pj, "controller.params", {"direction", "gains", "T", "p"});
        sc.controller = FxtSpec{parse_ges(p), p.number("T"), p.number("p")};
    } else if (family == "safety") {
        Section p(pj, "controller.params", {"gains"});
        sc.controller = SafetySpec{parse_gains(p.raw("gains"), "controller.params.gains", &sc.initial)};
    } else {
        ctrl.fail("unknown family '" + family + "'");
    }

    if (top.has("slip")) {
        Section s(doc.at("slip"), "slip", {"b1", "b2"});
        sc.slip = {s.number("b1", 1.0), s.number("b2", 1.0)};
    }
    if (top.has("sim")) {
        Section s(doc.at("sim"), "sim",
                  {"dt", "horizon", "sample_every", "scheme", "rtol", "atol", "stop_when_parked", "v_dead",
                   "step_halving", "rho_floor"});
        sc.dt = s.number("dt", sc.dt);
        sc.horizon = s.number("horizon", sc.horizon);
        const double every = s.number("sample_every", 1.0);
        if (every < 1.0 || every != std::floor(every)) s.fail("sample_every must be a positive integer");
        sc.sample_every = static_cast<std::size_t>(every);
        sc.scheme = parse_scheme(s.string("scheme", "rk4"));
        sc.rtol = s.number("rtol", sc.rtol);
        sc.atol = s.number("atol", sc.atol);
        sc.stop_when_parked = s.boolean("stop_when_parked", sc.stop_when_parked);
        sc.v_dead = s.number("v_dead", sc.v_dead);
        sc.step_halving = s.boolean("step_halving", sc.step_halving);
        sc.rho_floor = s.number("rho_floor", sc.rho_floor);
    }
    if (top.has("outputs")) {
        Section o(doc.at("outputs"), "outputs", {"csv", "metrics"});
        file.csv_path = o.string("csv", "");
        file.metrics_path = o.string("metrics", "");
    }
    if (top.has("assertions")) file.assertions = parse_assertions(doc.at("assertions"));

    validate(sc);
    return file;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return parse_scenario(doc);
}

void write_csv(std::ostream& out, const Trajectory& traj) {
    out << kCsvHeader << '\n';
    for (const Sample& s : traj.samples) {
        const double cols[] = {s.t,      s.state.rho,   s.state.delta,   s.state.gamma, s.pose.x,
                               s.pose.y, s.pose.theta,  s.input.v,       s.input.omega, s.V,
                               s.running_cost, s.eps1_hat, s.eps2_hat};
        bool first = true;
        for (double c : cols) {
            if (!first) out << ',';
            out << format_double(c);
            first = false;
        }
        out << '\n';
    }
}

std::vector<Sample> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw ValidationError("read_csv: header mismatch");
    std::vector<Sample> samples;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double v[13];
        std::stringstream row(line);
        std::string cell;
        int n = 0;
        while (n < 13 && std::getline(row, cell, ',')) v[n++] = cell.empty() ? kNaN : std::stod(cell);
        if (n == 12 && !line.empty() && line.back() == ',') v[n++] = kNaN;
        if (n != 13) throw ValidationError("read_csv: expected 13 columns");
        Sample s;
        s.t = v[0];
        s.state = {v[1], v[2], v[3]};
        s.pose = {v[4], v[5], v[6]};
        s.input = {v[7], v[8]};
        s.V = v[9];
        s.running_cost = v[10];
        s.eps1_hat = v[11];
        s.eps2_hat = v[12];
        samples.push_back(s);
    }
    return samples;
}

json metrics_to_json(const Metrics& m) {
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    return json{{"settling_time", num(m.settling_time)},
                {"lambda_hat", num(m.lambda_hat)},
                {"K_hat", num(m.K_hat)},
                {"max_v", num(m.max_v)},
                {"max_omega", num(m.max_omega)},
                {"min_y", num(m.min_y)},
                {"J", num(m.J)},
                {"final_V", num(m.final_V)},
                {"status", to_string(m.status)}};
}

AssertionResult check_assertions(const ScenarioFile& file, const Trajectory& traj, const Metrics& m) {
    AssertionResult r;
    const Assertions& a = file.assertions;
    auto expect = [&r](bool ok, const std::string& what) {
        if (!ok) {
            r.passed = false;
            r.failures.push_back(what);
        }
    };
    auto str = [](double v) { return format_double(v); };
    if (!a.status.empty()) {
        bool ok = false;
        for (RunStatus s : a.status) ok = ok || s == m.status;
        expect(ok, std::string("status ") + to_string(m.status) + " not allowed");
    }
    if (a.max_settling_time) {
        expect(std::isfinite(m.settling_time) && m.settling_time <= *a.max_settling_time,
               "settling_time " + str(m.settling_time) + " > " + str(*a.max_settling_time));
    }
    if (a.max_final_norm && !traj.empty()) {
        const double n = norm(traj.back().state);
        expect(n <= *a.max_final_norm, "final norm " + str(n) + " > " + str(*a.max_final_norm));
    }
    if (a.max_abs_v) expect(m.max_v <= *a.max_abs_v, "max |v| " + str(m.max_v));
    if (a.max_abs_omega) expect(m.max_omega <= *a.max_abs_omega, "max |omega| " + str(m.max_omega));
    if (a.max_y) expect(traj.extrema.max_y <= *a.max_y, "max y " + str(traj.extrema.max_y));
    if (a.min_v) expect(traj.extrema.min_v >= *a.min_v, "min v " + str(traj.extrema.min_v));
    const double c = controller_decay_constant(file.scenario.controller);
    if (a.lyapunov_decay.value_or(false)) {
        const LyapunovReport rep = verify_lyapunov(traj, c);
        expect(rep.passed, "Lyapunov decay margin " + str(rep.worst_margin));
    }
    if (a.min_lambda_ratio) {
        expect(std::isfinite(m.lambda_hat) && m.lambda_hat >= *a.min_lambda_ratio * c / 2.0,
               "lambda_hat " + str(m.lambda_hat) + " below " + str(*a.min_lambda_ratio * c / 2.0));
    }
    if (a.J_rel_tol && !traj.empty()) {
        const double V0 = traj.front().V;
        expect(std::isfinite(m.J) && std::abs(m.J - V0) <= *a.J_rel_tol * V0,
               "J " + str(m.J) + " vs V0 " + str(V0));
    }
    return r;
}

std::optional<RunStatus> parse_run_status(std::string_view name) {
    for (RunStatus s : {RunStatus::Completed, RunStatus::Parked, RunStatus::SingularRho, RunStatus::HorizonExceeded,
                        RunStatus::NonFiniteState}) {
        if (name == to_string(s)) return s;
    }
    return std::nullopt;
}

}  // namespace park
