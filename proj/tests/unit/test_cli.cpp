#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "park");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return park::cli::main(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "park_cli_test";
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
    const fs::path p = scratch_dir() / name;
    std::ofstream(p) << text;
    return p;
}

json good_scenario(const std::string& name) {
    return {{"schema_version", 1},
            {"name", name},
            {"controller", {{"family", "ges"}, {"params", {{"direction", "bidirectional"}, {"gains", {1, 1, 1, 1}}}}}},
            {"initial", {{"rho", 1}, {"delta", 0.5}, {"gamma", 0.2}}},
            {"sim", {{"horizon", 1}, {"dt", 0.01}}}};
}

}  // namespace

TEST_CASE("validate exit codes") {
    const fs::path ok = write_file("ok.json", good_scenario("ok").dump());
    CHECK(run_cli({"validate", ok.string()}) == park::cli::kExitOk);
    const fs::path broken = write_file("broken.json", "{\"schema_version\": 1,");
    CHECK(run_cli({"validate", broken.string()}) == park::cli::kExitValidation);
    CHECK(run_cli({"validate", (scratch_dir() / "missing.json").string()}) == park::cli::kExitValidation);
    CHECK(run_cli({"frobnicate"}) == park::cli::kExitValidation);
}

TEST_CASE("run writes CSV and metrics") {
    const fs::path sc = write_file("run.json", good_scenario("run_ok").dump());
    const fs::path out = scratch_dir() / "out";
    fs::remove_all(out);
    CHECK(run_cli({"run", sc.string(), "--out-dir", out.string()}) == park::cli::kExitOk);
    CHECK(fs::exists(out / "run_ok.csv"));
    std::ifstream mj(out / "run_ok_metrics.json");
    const json metrics = json::parse(mj);
    CHECK(metrics["name"] == "run_ok");
    CHECK(metrics["status"] == "Completed");

    const fs::path csv = scratch_dir() / "explicit.csv";
    CHECK(run_cli({"run", sc.string(), "--csv", csv.string(), "--metrics", (scratch_dir() / "m.json").string()}) ==
          park::cli::kExitOk);
    CHECK(fs::exists(csv));
}

TEST_CASE("run reports a diverging integration as a runtime error") {
    json j = good_scenario("blowup");
    j["controller"]["params"]["gains"] = {200, 50, 1, 200};
    j["sim"] = {{"horizon", 5}, {"dt", 0.5}};
    const fs::path sc = write_file("blowup.json", j.dump());
    CHECK(run_cli({"run", sc.string(), "--out-dir", (scratch_dir() / "out").string()}) == park::cli::kExitRuntime);

    json bad = good_scenario("bad");
    bad["sim"]["dt"] = -1;
    const fs::path bp = write_file("bad.json", bad.dump());
    CHECK(run_cli({"run", bp.string()}) == park::cli::kExitValidation);
}

TEST_CASE("suite outcomes") {
    const fs::path empty = write_file("empty.txt", "# nothing here\n\n");
    CHECK(run_cli({"suite", empty.string()}) == park::cli::kExitOk);

    write_file("pass.json", good_scenario("pass").dump());
    json xfail = good_scenario("xfail");
    xfail["assertions"] = {{"max_final_norm", 1e-12}};
    xfail["expect_failure"] = true;
    write_file("xfail.json", xfail.dump());
    const fs::path list = write_file("list.txt", "pass.json\n# comment\nxfail.json\n");
    const fs::path report = scratch_dir() / "report.json";
    CHECK(run_cli({"suite", list.string(), "--report", report.string()}) == park::cli::kExitOk);
    std::ifstream rj(report);
    const json rep = json::parse(rj);
    REQUIRE(rep.size() == 2);
    CHECK(rep[0]["outcome"] == "PASS");
    CHECK(rep[1]["outcome"] == "XFAIL");
    CHECK(run_cli({"suite", list.string(), "--strict"}) == park::cli::kExitSuiteFailed);

    json fail = good_scenario("fail");
    fail["assertions"] = {{"max_final_norm", 1e-12}};
    write_file("fail.json", fail.dump());
    const fs::path list2 = write_file("list2.txt", "pass.json\nfail.json\n");
    CHECK(run_cli({"suite", list2.string()}) == park::cli::kExitSuiteFailed);

    const fs::path list3 = write_file("list3.txt", "does_not_exist.json\n");
    CHECK(run_cli({"suite", list3.string()}) == park::cli::kExitSuiteFailed);
    CHECK(run_cli({"suite", (scratch_dir() / "nolist.txt").string()}) == park::cli::kExitValidation);
}

TEST_CASE("bundled scenarios validate") {
    int count = 0;
    for (const auto& entry : fs::directory_iterator(PARK_SCENARIO_DIR)) {
        if (entry.path().extension() != ".json") continue;
        CHECK_MESSAGE(run_cli({"validate", entry.path().string()}) == park::cli::kExitOk, entry.path().string());
        ++count;
    }
    CHECK(count >= 8);
}
