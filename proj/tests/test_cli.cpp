#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fraclab/cli/scenario.hpp"

using namespace fraclab::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fraclab_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const char* kSmallRun = R"(
model: {n: 1, sigma: 1, gamma: 0.5, mu: 1, p: 2}
grid: {L: 16, M: 64}
time: {dt: 0.01, t_max: 0.2}
data:
  u0: {profile: gaussian, amplitude: 1, width: 1}
  u1: {profile: bump, amplitude: 1, width: 2}
)";

}  // namespace

TEST(Config, EmptyIsUsageError) {
  EXPECT_THROW(parse_config(""), usage_error);
  EXPECT_THROW(parse_config("{}"), usage_error);
  EXPECT_THROW(parse_config("model: {n: 1}"), usage_error);  // no command
}

TEST(Config, UnknownCommandIsUsageError) { EXPECT_THROW(parse_config("command: frobnicate"), usage_error); }

TEST(Config, RangeErrorsAreValidationErrors) {
  EXPECT_THROW(parse_config("command: classify\nmodel: {sigma: 2.5}"), config_error);
  EXPECT_THROW(parse_config("command: simulate\ngrid: {M: 100}"), config_error);
  EXPECT_THROW(parse_config("command: simulate\ntime: {dt: -1}"), config_error);
  EXPECT_THROW(parse_config("command: sweep"), config_error);
  EXPECT_THROW(parse_config("command: certify\ncertificate: {R: abc}"), config_error);
}

TEST(Config, DefaultsAndOverrides) {
  const auto c = parse_config(kSmallRun, "simulate");
  EXPECT_EQ(c.command, "simulate");
  EXPECT_EQ(c.grid.M, 64u);
  EXPECT_EQ(c.u1.profile, "bump");
  EXPECT_EQ(c.time.threshold, 1e8);
  const auto j = to_json(c);
  EXPECT_EQ(j["model"]["gamma"], "0.5");
  EXPECT_EQ(j["output"]["format"], "all");
}

TEST(RunScenario, ClassifyBulletOne) {
  ScenarioConfig c;
  c.command = "classify";
  c.model = {"1", "1", "0.5", "1", "7"};
  c.output_dir = scratch_dir("classify").string();
  EXPECT_EQ(run_scenario(c), 0);
  const auto j = nlohmann::json::parse(slurp(fs::path(c.output_dir) / "report.json"));
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  EXPECT_EQ(j["verdict"]["tag"], "BlowupAllP");
  EXPECT_EQ(j["config"]["model"]["p"], "7");
}

TEST(RunScenario, ExitCodes) {
  ScenarioConfig c;
  c.command = "nope";
  c.output_dir = scratch_dir("exit").string();
  EXPECT_EQ(run_scenario(c), 2);
  c.command = "classify";
  c.model.gamma = "1.5";
  EXPECT_EQ(run_scenario(c), 3);
  c.command = "simulate";
  c.model.gamma = "0.5";
  c.grid.M = 4096;
  c.grid.L = 1.0;
  c.time.dt = 0.1;  // violates the CFL bound
  EXPECT_EQ(run_scenario(c), 3);
}

TEST(RunScenario, VerifyTimeSuite) {
  ScenarioConfig c;
  c.command = "verify-lemmas";
  c.suite = "time";
  c.output_dir = scratch_dir("verify").string();
  EXPECT_EQ(run_scenario(c), 0);
  const auto j = nlohmann::json::parse(slurp(fs::path(c.output_dir) / "report.json"));
  EXPECT_TRUE(j["passed"].get<bool>());
  ASSERT_GE(j["checks"].size(), 5u);
  for (const auto& k : j["checks"]) {
    EXPECT_TRUE(k.contains("measured"));
    EXPECT_TRUE(k.contains("tolerance"));
  }
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "checks.csv"));
}

TEST(RunScenario, SimulateIsDeterministic) {
  auto c = parse_config(kSmallRun, "simulate");
  c.output_dir = scratch_dir("det").string();
  ASSERT_EQ(run_scenario(c), 0);
  const std::string first = slurp(fs::path(c.output_dir) / "report.json");
  const std::string first_csv = slurp(fs::path(c.output_dir) / "norms.csv");
  ASSERT_EQ(run_scenario(c), 0);
  EXPECT_EQ(first, slurp(fs::path(c.output_dir) / "report.json"));
  EXPECT_EQ(first_csv, slurp(fs::path(c.output_dir) / "norms.csv"));
  EXPECT_NE(first_csv.find("t,sup_norm,l2p_norm"), std::string::npos);
}

TEST(RunScenario, JsonOnlyFormat) {
  auto c = parse_config(kSmallRun, "simulate");
  c.output_dir = scratch_dir("jsononly").string();
  c.output_format = "json";
  ASSERT_EQ(run_scenario(c), 0);
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "report.json"));
  EXPECT_FALSE(fs::exists(fs::path(c.output_dir) / "norms.csv"));
}

TEST(RunScenario, SweepWritesEveryPoint) {
  auto c = parse_config(std::string(kSmallRun) + R"(
sweep:
  mode: simulate
  threads: 3
  axes: {gamma: ["1/4", "1/2", "3/4"], p: [2, 3]}
)",
                        "sweep");
  c.output_dir = scratch_dir("sweep").string();
  ASSERT_EQ(run_scenario(c), 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(fs::path(c.output_dir) / "points")) {
    EXPECT_EQ(e.path().extension(), ".json");
    ++files;
  }
  EXPECT_EQ(files, 6u);
  const std::string csv = slurp(fs::path(c.output_dir) / "sweep.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  const std::string report = slurp(fs::path(c.output_dir) / "report.json");
  c.sweep.threads = 1;
  ASSERT_EQ(run_scenario(c), 0);
  const auto a = nlohmann::json::parse(report), b = nlohmann::json::parse(slurp(fs::path(c.output_dir) / "report.json"));
  EXPECT_EQ(a["points"], b["points"]);
}

TEST(RunScenario, SweepClassifyGrid) {
  auto c = parse_config("sweep: {axes: {n: [1, 2, 3, 4], gamma: [0.2, 0.5]}}", "sweep");
  c.output_dir = scratch_dir("sweepcls").string();
  ASSERT_EQ(run_scenario(c), 0);
  const auto j = nlohmann::json::parse(slurp(fs::path(c.output_dir) / "report.json"));
  ASSERT_EQ(j["points"].size(), 8u);
  EXPECT_EQ(j["points"][0]["verdict"]["tag"], "BlowupAllP");
}
