#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include "park/scenario_io.hpp"

namespace park::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path resolve_output(const std::string& configured, const std::string& fallback, const std::string& out_dir) {
    fs::path p = configured.empty() ? fs::path(fallback) : fs::path(configured);
    if (!out_dir.empty() && p.is_relative()) p = fs::path(out_dir) / p;
    return p;
}

void write_outputs(const ScenarioFile& file, const Trajectory& traj, const Metrics& metrics,
                   const fs::path& csv_path, const fs::path& metrics_path) {
    for (const fs::path& p : {csv_path, metrics_path}) {
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
    }
    std::ofstream csv(csv_path);
    if (!csv) throw Error("cannot write " + csv_path.string());
    write_csv(csv, traj);
    std::ofstream mj(metrics_path);
    if (!mj) throw Error("cannot write " + metrics_path.string());
    json doc = metrics_to_json(metrics);
    doc["name"] = file.scenario.name;
    mj << doc.dump(2) << '\n';
}

bool is_runtime_failure(RunStatus status) {
    return status == RunStatus::SingularRho || status == RunStatus::NonFiniteState;
}

int cmd_validate(const std::string& path) {
    try {
        const ScenarioFile file = load_scenario(path);
        std::cout << file.scenario.name << ": valid\n";
        return kExitOk;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitValidation;
    }
}

int cmd_run(const std::string& path, const std::string& csv_override, const std::string& metrics_override,
            const std::string& out_dir) {
    ScenarioFile file;
    try {
        file = load_scenario(path);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitValidation;
    }
    try {
        const Trajectory traj = integrate(file.scenario);
        const Metrics metrics = compute_metrics(file.scenario, traj);
        const std::string name = file.scenario.name;
        const fs::path csv_path =
            resolve_output(csv_override.empty() ? file.csv_path : csv_override, name + ".csv", out_dir);
        const fs::path metrics_path = resolve_output(
            metrics_override.empty() ? file.metrics_path : metrics_override, name + "_metrics.json", out_dir);
        write_outputs(file, traj, metrics, csv_path, metrics_path);
        std::cout << name << ": " << to_string(traj.status) << ", " << traj.samples.size() << " samples -> "
                  << csv_path.string() << '\n';
        const AssertionResult check = check_assertions(file, traj, metrics);
        for (const auto& f : check.failures) std::cerr << "assertion: " << f << '\n';
        if (is_runtime_failure(traj.status)) {
            std::cerr << "runtime error: " << to_string(traj.status) << ' ' << traj.message << '\n';
            return kExitRuntime;
        }
        return kExitOk;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

struct SuiteEntry {
    std::string path;
    std::string name;
    std::string outcome;  // PASS, FAIL, XFAIL, XPASS, ERROR
    std::string status;
    double seconds = 0.0;
    std::vector<std::string> notes;
};

std::vector<std::string> read_list(const fs::path& list_path) {
    std::ifstream in(list_path);
    if (!in) throw ValidationError("cannot open list file " + list_path.string());
    std::vector<std::string> paths;
    std::string line;
    while (std::getline(in, line)) {
        line.erase(0, line.find_first_not_of(" \t\r"));
        const auto end = line.find_last_not_of(" \t\r");
        line = end == std::string::npos ? "" : line.substr(0, end + 1);
        if (line.empty() || line[0] == '#') continue;
        fs::path p(line);
        if (p.is_relative()) p = list_path.parent_path() / p;
        paths.push_back(p.string());
    }
    return paths;
}

SuiteEntry run_entry(const std::string& path, const std::string& out_dir) {
    SuiteEntry entry;
    entry.path = path;
    const auto start = std::chrono::steady_clock::now();
    try {
        const ScenarioFile file = load_scenario(path);
        entry.name = file.scenario.name;
        const Trajectory traj = integrate(file.scenario);
        const Metrics metrics = compute_metrics(file.scenario, traj);
        entry.status = to_string(traj.status);
        if (!out_dir.empty()) {
            write_outputs(file, traj, metrics, resolve_output(file.csv_path, entry.name + ".csv", out_dir),
                          resolve_output(file.metrics_path, entry.name + "_metrics.json", out_dir));
        }
        AssertionResult check = check_assertions(file, traj, metrics);
        if (is_runtime_failure(traj.status)) {
            check.passed = false;
            check.failures.push_back(std::string("runtime status ") + entry.status);
        }
        entry.notes = check.failures;
        if (file.expect_failure) {
            entry.outcome = check.passed ? "XPASS" : "XFAIL";
        } else {
            entry.outcome = check.passed ? "PASS" : "FAIL";
        }
    } catch (const std::exception& e) {
        entry.outcome = "ERROR";
        entry.notes.push_back(e.what());
    }
    entry.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (entry.name.empty()) entry.name = fs::path(path).stem().string();
    return entry;
}

unsigned suite_threads() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PARK_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

int cmd_suite(const std::string& list_path, const std::string& report_path, const std::string& out_dir,
              bool strict) {
    std::vector<std::string> paths;
    try {
        paths = read_list(list_path);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitValidation;
    }
    std::vector<SuiteEntry> entries(paths.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    const unsigned n_threads = std::min<unsigned>(suite_threads(), std::max<std::size_t>(1, paths.size()));
    for (unsigned w = 0; w < n_threads; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < paths.size(); i = next++) entries[i] = run_entry(paths[i], out_dir);
        });
    }
    for (auto& th : workers) th.join();

    bool ok = true;
    json report = json::array();
    for (const SuiteEntry& e : entries) {
        const bool bad = e.outcome == "FAIL" || e.outcome == "ERROR" || e.outcome == "XPASS" ||
                         (strict && e.outcome == "XFAIL");
        ok = ok && !bad;
        std::printf("%-6s %-40s %-16s %8.2fs\n", e.outcome.c_str(), e.name.c_str(), e.status.c_str(), e.seconds);
        for (const auto& note : e.notes) std::printf("       %s\n", note.c_str());
        report.push_back({{"name", e.name},
                          {"path", e.path},
                          {"outcome", e.outcome},
                          {"status", e.status},
                          {"seconds", e.seconds},
                          {"notes", e.notes}});
    }
    std::printf("%zu scenarios, %s\n", entries.size(), ok ? "ok" : "failures");
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        out << report.dump(2) << '\n';
    }
    return ok ? kExitOk : kExitSuiteFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unicycle parking feedback simulator"};
    app.require_subcommand(1);

    std::string scenario_path, csv_path, metrics_path, out_dir, list_path, report_path;
    bool strict = false;

    auto* run = app.add_subcommand("run", "Simulate one scenario, write CSV and metrics JSON");
    run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    run->add_option("--csv", csv_path, "Trajectory CSV path (overrides the scenario)");
    run->add_option("--metrics", metrics_path, "Metrics JSON path (overrides the scenario)");
    run->add_option("--out-dir", out_dir, "Directory for relative output paths");

    auto* suite = app.add_subcommand("suite", "Run every scenario listed in a file");
    suite->add_option("list", list_path, "Text file, one scenario path per line")->required();
    suite->add_option("--report", report_path, "Write a JSON report");
    suite->add_option("--out-dir", out_dir, "Also write each scenario's outputs here");
    suite->add_flag("--strict", strict, "Expected failures also fail the suite");

    auto* val = app.add_subcommand("validate", "Check a scenario file against the schema");
    val->add_option("scenario", scenario_path, "Scenario JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }
    if (*run) return cmd_run(scenario_path, csv_path, metrics_path, out_dir);
    if (*suite) return cmd_suite(list_path, report_path, out_dir, strict);
    return cmd_validate(scenario_path);
}

}  // namespace park::cli
