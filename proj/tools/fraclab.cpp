#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fraclab/cli/scenario.hpp"

using namespace fraclab::cli;

namespace {

ScenarioConfig load(const std::string& path, const std::string& command) {
  std::ifstream f(path);
  if (!f) throw usage_error("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fraclab: fractional damped wave blow-up toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out, format;
  app.add_option("--out", out, "output directory (overrides the config)");
  app.add_option("--format", format, "all | json")->check(CLI::IsMember({"all", "json"}));

  std::string suite = "all";
  auto* verify = app.add_subcommand("verify-lemmas", "run the numerical verification suites");
  verify->add_option("--suite", suite, "all | time | laplacian")->check(CLI::IsMember({"all", "time", "laplacian"}));

  ModelText model;
  auto* cls = app.add_subcommand("classify", "blow-up regime for one parameter tuple (exact arithmetic)");
  cls->add_option("--n", model.n, "space dimension")->required();
  cls->add_option("--sigma", model.sigma, "damping order in (0,2)")->required();
  cls->add_option("--gamma", model.gamma, "memory exponent in (0,1)")->required();
  cls->add_option("--p", model.p, "nonlinearity exponent > 1")->required();
  cls->add_option("--mu", model.mu, "damping coefficient");

  std::string config_path;
  for (const char* name : {"simulate", "certify", "sweep"}) {
    auto* sub = app.add_subcommand(name, std::string(name) + " from a YAML config");
    sub->add_option("--config", config_path, "YAML config file")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  ScenarioConfig cfg;
  try {
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "verify-lemmas" || cmd == "classify") {
      cfg.command = cmd;
      cfg.suite = suite;
      cfg.model = model;
    } else {
      cfg = load(config_path, cmd);
    }
    if (!out.empty()) cfg.output_dir = out;
    if (!format.empty()) cfg.output_format = format;
  } catch (const usage_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const config_error& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kValidation;
  }
  return run_scenario(cfg);
}
