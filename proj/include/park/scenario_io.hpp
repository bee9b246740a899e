#pragma once

#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "park/sim.hpp"

namespace park {

inline constexpr int kSchemaVersion = 1;

/// Checks embedded in a scenario file; every field is optional.
struct Assertions {
    std::vector<RunStatus> status;  // allowed statuses
    std::optional<double> max_settling_time;
    std::optional<double> max_final_norm;
    std::optional<double> max_abs_v;
    std::optional<double> max_abs_omega;
    std::optional<double> max_y;               // y(t) <= max_y at every step
    std::optional<double> min_v;               // v(t) >= min_v at every step
    std::optional<bool> lyapunov_decay;        // V(i+1) <= V(i) exp(-c dt)(1 + 1e-4)
    std::optional<double> min_lambda_ratio;    // lambda_hat >= ratio * c / 2
    std::optional<double> J_rel_tol;           // |J - V(0)| <= tol V(0)
};

struct ScenarioFile {
    Scenario scenario;
    std::string description;
    std::string csv_path;
    std::string metrics_path;
    Assertions assertions;
    bool expect_failure = false;
};

/// Throws ValidationError on schema violations, unknown keys included.
ScenarioFile parse_scenario(const nlohmann::json& doc);
ScenarioFile load_scenario(const std::filesystem::path& path);

inline constexpr const char* kCsvHeader = "t,rho,delta,gamma,x,y,theta,v,omega,V,l_running,eps1_hat,eps2_hat";

/// One row per sample, 17 significant digits, empty cells for NaN channels.
void write_csv(std::ostream& out, const Trajectory& trajectory);
std::vector<Sample> read_csv(std::istream& in);

nlohmann::json metrics_to_json(const Metrics& metrics);

struct AssertionResult {
    bool passed = true;
    std::vector<std::string> failures;
};

AssertionResult check_assertions(const ScenarioFile& file, const Trajectory& trajectory, const Metrics& metrics);

std::optional<RunStatus> parse_run_status(std::string_view name);

}  // namespace park
