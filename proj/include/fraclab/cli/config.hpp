#pragma once

// Scenario configuration: YAML in, fully resolved JSON echo out.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "fraclab/exponents.hpp"

namespace fraclab::cli {

/// Bad command line or unusable config document (exit 2).
class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Config parsed but a value is out of range (exit 3).
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> c{"verify-lemmas", "classify", "simulate", "certify", "sweep"};
  return c;
}

/// Model parameters kept as text so that classification can use exact rationals.
struct ModelText {
  std::string n = "1";
  std::string sigma = "1";
  std::string gamma = "0.5";
  std::string mu = "1";
  std::string p = "2";
};

struct GridConfig {
  double L = 32.0;
  std::size_t M = 256;
};

struct TimeConfig {
  double dt = 1e-3;
  double t_max = 20.0;
  double threshold = 1e8;
  double growth_limit = 2.0;
  std::size_t store_every = 1;
};

struct ProfileConfig {
  std::string profile = "gaussian";  // gaussian | bump | zero
  double amplitude = 10.0;
  double width = 1.0;
};

struct CertificateConfig {
  std::vector<double> T_fractions{0.25, 0.5};
  std::string R = "coupling";  // "coupling" or a positive number
  double K = 1.0;
  std::optional<double> beta;
};

struct SweepConfig {
  std::string mode = "classify";  // classify | simulate
  unsigned threads = 2;
  std::map<std::string, std::vector<std::string>> axes;  // keys: n, sigma, gamma, mu, p, amplitude
};

struct ScenarioConfig {
  std::string command;
  std::string suite = "all";
  ModelText model;
  GridConfig grid;
  TimeConfig time;
  ProfileConfig u0;
  ProfileConfig u1;
  CertificateConfig certificate;
  SweepConfig sweep;
  std::string output_dir = "out";
  std::string output_format = "all";  // all (JSON + CSV) | json
};

// ---------------------------------------------------------------------------

inline int parse_int_text(const std::string& s, const char* key) {
  const rational r = [&] {
    try {
      return parse_rational(s);
    } catch (const std::exception&) {
      throw config_error(std::string(key) + ": not a number: '" + s + "'");
    }
  }();
  if (denominator(r) != 1) throw config_error(std::string(key) + ": must be an integer");
  return numerator(r).convert_to<int>();
}

inline double parse_double_text(const std::string& s, const char* key) {
  try {
    return parse_rational(s).convert_to<double>();
  } catch (const std::exception&) {
    throw config_error(std::string(key) + ": not a number: '" + s + "'");
  }
}

inline ModelParams to_params(const ModelText& m) {
  try {
    return ModelParams(parse_int_text(m.n, "model.n"), parse_double_text(m.sigma, "model.sigma"),
                       parse_double_text(m.gamma, "model.gamma"), parse_double_text(m.mu, "model.mu"),
                       parse_double_text(m.p, "model.p"));
  } catch (const fraclab::domain_error& e) {
    throw config_error(e.what());
  }
}

inline ExactParams to_exact(const ModelText& m) {
  ExactParams e;
  e.n = parse_int_text(m.n, "model.n");
  auto q = [](const std::string& s, const char* key) {
    try {
      return parse_rational(s);
    } catch (const std::exception&) {
      throw config_error(std::string(key) + ": not a number: '" + s + "'");
    }
  };
  e.sigma = q(m.sigma, "model.sigma");
  e.gamma = q(m.gamma, "model.gamma");
  e.p = q(m.p, "model.p");
  try {
    e.validate();
  } catch (const fraclab::domain_error& err) {
    throw config_error(err.what());
  }
  return e;
}

namespace detail {

template <class T>
T get(const YAML::Node& node, const char* key, const T& fallback) {
  const YAML::Node v = node[key];
  if (!v) return fallback;
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    throw config_error(std::string("config key '") + key + "' has the wrong type");
  }
}

inline void read_profile(const YAML::Node& node, ProfileConfig& p) {
  if (!node) return;
  if (!node.IsMap()) throw config_error("data profile must be a mapping");
  p.profile = get(node, "profile", p.profile);
  p.amplitude = get(node, "amplitude", p.amplitude);
  p.width = get(node, "width", p.width);
}

}  // namespace detail

inline void validate(const ScenarioConfig& c) {
  bool known = false;
  for (const auto& k : known_commands()) known = known || k == c.command;
  if (!known) throw usage_error("unknown command '" + c.command + "'");
  if (c.suite != "all" && c.suite != "time" && c.suite != "laplacian") throw config_error("suite must be all|time|laplacian");
  if (c.command == "classify") {
    to_exact(c.model);
    to_params(c.model);
  }
  if (c.command == "simulate" || c.command == "certify") {
    const auto m = to_params(c.model);
    if (m.n < 1 || m.n > 3) throw config_error("model.n must be 1, 2 or 3 for simulation");
  }
  if (!(c.grid.L > 0.0)) throw config_error("grid.L must be positive");
  if (c.grid.M < 8 || (c.grid.M & (c.grid.M - 1)) != 0 || c.grid.M > 4096) throw config_error("grid.M must be a power of two in [8, 4096]");
  if (!(c.time.dt > 0.0) || !(c.time.t_max > 0.0)) throw config_error("time.dt and time.t_max must be positive");
  if (!(c.time.threshold > 0.0)) throw config_error("time.threshold must be positive");
  if (!(c.time.growth_limit > 1.0)) throw config_error("time.growth_limit must exceed 1");
  if (c.time.store_every < 1) throw config_error("time.store_every must be >= 1");
  for (const auto* p : {&c.u0, &c.u1}) {
    if (p->profile != "gaussian" && p->profile != "bump" && p->profile != "zero")
      throw config_error("data profile must be gaussian|bump|zero");
    if (!(p->width > 0.0)) throw config_error("data width must be positive");
  }
  if (c.certificate.T_fractions.empty()) throw config_error("certificate.T_fractions must be nonempty");
  for (double f : c.certificate.T_fractions)
    if (!(f > 0.0 && f <= 1.0)) throw config_error("certificate.T_fractions must lie in (0,1]");
  if (c.certificate.R != "coupling") {
    try {
      std::size_t used = 0;
      const double r = std::stod(c.certificate.R, &used);
      if (used != c.certificate.R.size()) throw config_error("certificate.R must be 'coupling' or a number");
      if (!(r > 0.0)) throw config_error("certificate.R must be positive");
    } catch (const std::logic_error&) {
      throw config_error("certificate.R must be 'coupling' or a number");
    }
  }
  if (!(c.certificate.K >= 1.0)) throw config_error("certificate.K must be >= 1");
  if (c.sweep.mode != "classify" && c.sweep.mode != "simulate") throw config_error("sweep.mode must be classify|simulate");
  if (c.sweep.threads < 1 || c.sweep.threads > 256) throw config_error("sweep.threads must lie in [1, 256]");
  for (const auto& [k, v] : c.sweep.axes) {
    if (k != "n" && k != "sigma" && k != "gamma" && k != "mu" && k != "p" && k != "amplitude")
      throw config_error("unknown sweep axis '" + k + "'");
    if (v.empty()) throw config_error("sweep axis '" + k + "' is empty");
  }
  if (c.output_format != "all" && c.output_format != "json") throw config_error("output.format must be all|json");
  if (c.output_dir.empty()) throw config_error("output.dir must be nonempty");
  if (c.command == "sweep" && c.sweep.axes.empty()) throw config_error("sweep.axes must name at least one axis");
}

/// Parses a YAML document. The command given on the command line wins over the file's.
inline ScenarioConfig parse_config(const std::string& text, const std::string& command_override = "") {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw usage_error(std::string("config is not valid YAML: ") + e.what());
  }
  if (!root || root.IsNull() || (root.IsMap() && root.size() == 0)) throw usage_error("empty config");
  if (!root.IsMap()) throw usage_error("config must be a mapping");

  ScenarioConfig c;
  c.command = command_override.empty() ? detail::get<std::string>(root, "command", "") : command_override;
  if (c.command.empty()) throw usage_error("config names no command");
  c.suite = detail::get(root, "suite", c.suite);
  if (const auto m = root["model"]) {
    if (!m.IsMap()) throw config_error("model must be a mapping");
    c.model.n = detail::get(m, "n", c.model.n);
    c.model.sigma = detail::get(m, "sigma", c.model.sigma);
    c.model.gamma = detail::get(m, "gamma", c.model.gamma);
    c.model.mu = detail::get(m, "mu", c.model.mu);
    c.model.p = detail::get(m, "p", c.model.p);
  }
  if (const auto g = root["grid"]) {
    c.grid.L = detail::get(g, "L", c.grid.L);
    c.grid.M = detail::get(g, "M", c.grid.M);
  }
  if (const auto t = root["time"]) {
    c.time.dt = detail::get(t, "dt", c.time.dt);
    c.time.t_max = detail::get(t, "t_max", c.time.t_max);
    c.time.threshold = detail::get(t, "threshold", c.time.threshold);
    c.time.growth_limit = detail::get(t, "growth_limit", c.time.growth_limit);
    c.time.store_every = detail::get(t, "store_every", c.time.store_every);
  }
  if (const auto d = root["data"]) {
    detail::read_profile(d["u0"], c.u0);
    detail::read_profile(d["u1"], c.u1);
  }
  if (const auto ce = root["certificate"]) {
    c.certificate.T_fractions = detail::get(ce, "T_fractions", c.certificate.T_fractions);
    c.certificate.R = detail::get(ce, "R", c.certificate.R);
    c.certificate.K = detail::get(ce, "K", c.certificate.K);
    if (ce["beta"] && detail::get<std::string>(ce, "beta", "auto") != "auto") c.certificate.beta = detail::get<double>(ce, "beta", 0.0);
  }
  if (const auto s = root["sweep"]) {
    c.sweep.mode = detail::get(s, "mode", c.sweep.mode);
    c.sweep.threads = detail::get(s, "threads", c.sweep.threads);
    if (const auto axes = s["axes"]) {
      if (!axes.IsMap()) throw config_error("sweep.axes must be a mapping");
      for (const auto& kv : axes) {
        const auto key = kv.first.as<std::string>();
        std::vector<std::string> vals;
        if (kv.second.IsSequence())
          for (const auto& v : kv.second) vals.push_back(v.as<std::string>());
        else
          vals.push_back(kv.second.as<std::string>());
        c.sweep.axes[key] = vals;
      }
    }
  }
  if (const auto o = root["output"]) {
    c.output_dir = detail::get(o, "dir", c.output_dir);
    c.output_format = detail::get(o, "format", c.output_format);
  }
  validate(c);
  return c;
}

inline nlohmann::ordered_json to_json(const ProfileConfig& p) {
  return {{"profile", p.profile}, {"amplitude", p.amplitude}, {"width", p.width}};
}

/// Every field, defaults included.
inline nlohmann::ordered_json to_json(const ScenarioConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = c.command;
  j["suite"] = c.suite;
  j["model"] = {{"n", c.model.n}, {"sigma", c.model.sigma}, {"gamma", c.model.gamma}, {"mu", c.model.mu}, {"p", c.model.p}};
  j["grid"] = {{"L", c.grid.L}, {"M", c.grid.M}};
  j["time"] = {{"dt", c.time.dt},
               {"t_max", c.time.t_max},
               {"threshold", c.time.threshold},
               {"growth_limit", c.time.growth_limit},
               {"store_every", c.time.store_every}};
  j["data"] = {{"u0", to_json(c.u0)}, {"u1", to_json(c.u1)}};
  j["certificate"] = {{"T_fractions", c.certificate.T_fractions},
                      {"R", c.certificate.R},
                      {"K", c.certificate.K},
                      {"beta", c.certificate.beta ? nlohmann::ordered_json(*c.certificate.beta) : nlohmann::ordered_json("auto")}};
  nlohmann::ordered_json axes = nlohmann::ordered_json::object();
  for (const auto& [k, v] : c.sweep.axes) axes[k] = v;
  j["sweep"] = {{"mode", c.sweep.mode}, {"threads", c.sweep.threads}, {"axes", axes}};
  j["output"] = {{"dir", c.output_dir}, {"format", c.output_format}};
  return j;
}

}  // namespace fraclab::cli
