#pragma once

// run_scenario: executes one configured command and writes report.json plus CSV tables.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "fraclab/certificate.hpp"
#include "fraclab/cli/config.hpp"
#include "fraclab/cli/verify.hpp"
#include "fraclab/exponents.hpp"
#include "fraclab/solver.hpp"

namespace fraclab::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode { kOk = 0, kFailed = 1, kUsage = 2, kValidation = 3 };

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Output helpers.

/// Writes to a sibling temporary and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp);
    f << text;
    if (!f.flush()) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

inline std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

/// Non-finite values become strings so the JSON stays valid.
inline json num(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : cols_(std::move(columns)) {}
  void add(const std::vector<std::string>& row) {
    if (row.size() != cols_.size()) throw internal_error("CsvTable: row width mismatch");
    rows_.push_back(row);
  }
  std::string str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
      out += '\n';
    };
    line(cols_);
    for (const auto& r : rows_) line(r);
    return out;
  }

 private:
  std::vector<std::string> cols_;
  std::vector<std::vector<std::string>> rows_;
};

inline json report_header(const ScenarioConfig& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = c.command;
  j["config"] = to_json(c);
  return j;
}

inline void write_report(const ScenarioConfig& c, const json& report) {
  write_atomic(std::filesystem::path(c.output_dir) / "report.json", report.dump(2) + "\n");
}

inline void write_table(const ScenarioConfig& c, const std::string& name, const CsvTable& t) {
  if (c.output_format == "json") return;
  write_atomic(std::filesystem::path(c.output_dir) / name, t.str());
}

// ---------------------------------------------------------------------------
// Commands.

inline json verdict_json(const RegimeVerdict& v) {
  json j;
  j["tag"] = regime_name(v.tag);
  j["bullet"] = v.bullet;
  j["applicable_bullet"] = v.applicable_bullet;
  j["overlap"] = v.overlap;
  j["p_c"] = num(v.p_c);
  j["p_c_exact"] = v.p_c_exact ? rational_to_string(*v.p_c_exact) : "inf";
  return j;
}

inline PeriodicField make_profile(const ProfileConfig& pc, int n, const GridConfig& g) {
  PeriodicField f(n, g.L, g.M);
  if (pc.profile == "gaussian") {
    f.fill_radial([&](double r) { return pc.amplitude * std::exp(-(r * r) / (pc.width * pc.width)); });
  } else if (pc.profile == "bump") {
    f.fill_radial([&](double r) {
      const double q = r / pc.width;
      return q < 1.0 ? pc.amplitude * std::exp(1.0 - 1.0 / (1.0 - q * q)) : 0.0;
    });
  }
  return f;
}

inline SolverOptions solver_options(const TimeConfig& t) {
  SolverOptions o;
  o.dt = t.dt;
  o.t_max = t.t_max;
  o.threshold = t.threshold;
  o.growth_limit = t.growth_limit;
  o.store_every = t.store_every;
  return o;
}

inline json blowup_json(const BlowupReport& r) {
  json j;
  j["blown"] = r.blown;
  j["overflow"] = r.overflow;
  j["t_star"] = num(r.t_star);
  j["t_end"] = r.t_end;
  j["steps"] = r.steps;
  j["rejected"] = r.rejected;
  j["min_dt"] = r.min_dt;
  j["resolution"] = {{"dim", r.dim}, {"L", r.L}, {"M", r.M}, {"dt", r.dt}};
  return j;
}

inline CsvTable norms_table(const BlowupReport& r) {
  CsvTable t({"t", "sup_norm", "l2p_norm"});
  for (const auto& s : r.peak_norms) t.add({fmt(s.t), fmt(s.sup), fmt(s.l2p)});
  return t;
}

inline int run_verify(const ScenarioConfig& c) {
  const auto checks = verify_suite(c.suite);
  json report = report_header(c);
  json arr = json::array();
  CsvTable t({"suite", "check", "measured", "tolerance", "passed"});
  std::vector<std::string> failing;
  for (const auto& k : checks) {
    arr.push_back({{"suite", k.suite},
                   {"check", k.name},
                   {"measured", num(k.measured)},
                   {"tolerance", k.tolerance},
                   {"passed", k.passed},
                   {"detail", k.detail}});
    t.add({k.suite, k.name, fmt(k.measured), fmt(k.tolerance), k.passed ? "1" : "0"});
    if (!k.passed) failing.push_back(k.suite + "." + k.name);
  }
  report["checks"] = arr;
  report["failing"] = failing;
  report["passed"] = failing.empty();
  write_report(c, report);
  write_table(c, "checks.csv", t);
  for (const auto& k : checks)
    std::cout << (k.passed ? "PASS " : "FAIL ") << k.suite << "." << k.name << " measured=" << k.measured
              << " tol=" << k.tolerance << "\n";
  for (const auto& f : failing) std::cerr << "failed check: " << f << "\n";
  return failing.empty() ? kOk : kFailed;
}

inline int run_classify(const ScenarioConfig& c) {
  const RegimeVerdict exact = classify_exact(to_exact(c.model));
  const RegimeVerdict fp = classify(to_params(c.model));
  json report = report_header(c);
  report["verdict"] = verdict_json(exact);
  report["floating_verdict"] = verdict_json(fp);
  report["routes_agree"] = exact.tag == fp.tag;
  write_report(c, report);
  std::cout << regime_name(exact.tag) << " p_c=" << (exact.p_c_exact ? rational_to_string(*exact.p_c_exact) : "inf")
            << " bullet=" << exact.bullet << "\n";
  if (exact.tag != fp.tag) std::cerr << "warning: floating route gives " << regime_name(fp.tag) << "\n";
  return kOk;
}

struct Simulation {
  ModelParams params;
  PeriodicField u0, u1;
  EvolveResult result;
};

inline Simulation simulate(const ScenarioConfig& c) {
  const ModelParams m = to_params(c.model);
  PeriodicField u0 = make_profile(c.u0, m.n, c.grid);
  PeriodicField u1 = make_profile(c.u1, m.n, c.grid);
  auto res = evolve(m, u0, u1, solver_options(c.time));
  return {m, std::move(u0), std::move(u1), std::move(res)};
}

inline int run_simulate(const ScenarioConfig& c) {
  const Simulation sim = simulate(c);
  json report = report_header(c);
  report["verdict"] = verdict_json(classify(sim.params));
  report["result"] = blowup_json(sim.result.report);
  write_report(c, report);
  write_table(c, "norms.csv", norms_table(sim.result.report));
  const auto& r = sim.result.report;
  if (r.blown)
    std::cout << "blow-up at t_star=" << fmt(r.t_star) << (r.overflow ? " (overflow)" : "") << "\n";
  else
    std::cout << "no blow-up up to t=" << fmt(r.t_end) << "\n";
  return kOk;
}

/// Which coupling of R to T applies, given the regime.
inline int coupling_case(const RegimeVerdict& v, const ModelParams& m, double T) {
  if (v.bullet == 3 && T > std::numbers::e) return 3;
  if (v.bullet == 2 && std::isfinite(v.p_c) && std::abs(m.p - v.p_c) <= 1e-12 * v.p_c) return 2;
  return 1;
}

inline int run_certify(const ScenarioConfig& c) {
  const Simulation sim = simulate(c);
  const auto& m = sim.params;
  const auto& rep = sim.result.report;
  const RegimeVerdict verdict = classify(m);
  const double t_ref = rep.blown ? rep.t_star : rep.t_end;

  json report = report_header(c);
  report["verdict"] = verdict_json(verdict);
  report["result"] = blowup_json(rep);

  CsvTable table({"T", "R", "case", "I_R", "I_tilde_R", "data_value", "u0_integral", "lhs", "rhs", "slack", "j1", "j2",
                  "j3", "u0_term", "weak_relative_residual"});
  json records = json::array();
  json checks = json::array();
  std::vector<std::string> failing;
  auto check = [&](const std::string& name, bool ok, double measured, double tol) {
    checks.push_back({{"check", name}, {"measured", num(measured)}, {"tolerance", tol}, {"passed", ok}});
    if (!ok) failing.push_back(name);
  };

  std::vector<double> fractions = c.certificate.T_fractions;
  std::sort(fractions.begin(), fractions.end());
  std::vector<double> slacks;
  for (double f : fractions) {
    const double T = f * t_ref;
    const int case_id = coupling_case(verdict, m, T);
    double R = 0.0;
    if (c.certificate.R == "coupling")
      R = case_coupling(case_id, T, c.certificate.K, m);
    else
      R = std::stod(c.certificate.R);
    if (R > c.grid.L) throw config_error("certificate: R = " + fmt(R) + " exceeds the box half-width");
    const TestPair pair = TestPair::for_model(m, R, T, c.certificate.beta);
    const auto fun = proof_functionals(sim.result.trajectory, pair, m.p);
    const PeriodicField phi = pair.sample_phi(sim.u0);
    BoundInputs in;
    in.I_R = fun.I_R;
    in.I_tilde_R = fun.I_tilde_R;
    in.data_value = data_functional(sim.u0, sim.u1, m.mu, m.sigma, R);
    in.u0_integral = fraclab::detail::weighted_integral(sim.u0, phi);
    const MasterBound b = master_bound(in, m, pair);
    const WeakFormTerms w = weak_form_residual(sim.result.trajectory, pair, m, sim.u0, sim.u1);
    slacks.push_back(b.slack);

    records.push_back({{"T", T},
                       {"R", R},
                       {"case", case_id},
                       {"beta", pair.prof.beta},
                       {"I_R", num(in.I_R)},
                       {"I_tilde_R", num(in.I_tilde_R)},
                       {"data_value", num(in.data_value)},
                       {"u0_integral", num(in.u0_integral)},
                       {"lhs", num(b.lhs)},
                       {"rhs", num(b.rhs)},
                       {"slack", num(b.slack)},
                       {"rhs_terms", {{"j1", num(b.j1)}, {"j2", num(b.j2)}, {"j3", num(b.j3)}, {"u0_term", num(b.u0_term)}}},
                       {"rhs_scaling_form", num(b.rhs_scaling)},
                       {"constants", {{"c_data", b.c_data}, {"c_u0", b.c_u0}, {"k1", b.k1}, {"k2", b.k2}, {"k3", b.k3}}},
                       {"weak_form",
                        {{"lhs", num(w.lhs())}, {"rhs", num(w.rhs())}, {"relative_residual", num(w.relative())}}}});
    table.add({fmt(T), fmt(R), std::to_string(case_id), fmt(in.I_R), fmt(in.I_tilde_R), fmt(in.data_value),
               fmt(in.u0_integral), fmt(b.lhs), fmt(b.rhs), fmt(b.slack), fmt(b.j1), fmt(b.j2), fmt(b.j3), fmt(b.u0_term),
               fmt(w.relative())});
    const std::string tag = "T=" + fmt(T);
    check("bound_holds " + tag, b.lhs <= b.rhs, b.slack, 1.0);
    check("weak_form " + tag, w.relative() <= 1e-2, w.relative(), 1e-2);
  }
  if (slacks.size() > 1) {
    const auto [lo, hi] = std::minmax_element(slacks.begin(), slacks.end());
    const double ratio = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
    check("slack_stability", ratio <= 2.0, ratio, 2.0);
  }

  json exps;
  exps["case1_T_exponent"] = case1_exponent(m);
  const auto c2 = case2_exponents(m);
  exps["case2"] = {{"k_first", c2.k_first}, {"k_second", c2.k_second}, {"sign", c2.sign}};
  exps["case3_sign"] = case3_sign(m);
  report["exponents"] = exps;
  if (verdict.bullet == 3) check("case3_sign_negative", case3_sign(m) < 0.0, case3_sign(m), 0.0);
  if (coupling_case(verdict, m, 1.0) == 2) check("case2_sign_positive", c2.sign > 0.0, c2.sign, 0.0);

  report["certificates"] = records;
  report["checks"] = checks;
  report["failing"] = failing;
  report["passed"] = failing.empty();
  write_report(c, report);
  write_table(c, "certificate.csv", table);
  write_table(c, "norms.csv", norms_table(rep));
  for (const auto& k : checks)
    std::cout << (k["passed"].get<bool>() ? "PASS " : "FAIL ") << k["check"].get<std::string>() << "\n";
  return failing.empty() ? kOk : kFailed;
}

// ---------------------------------------------------------------------------
// Sweep.

struct SweepPoint {
  std::size_t index = 0;
  ScenarioConfig config;
  std::vector<std::pair<std::string, std::string>> coords;
};

inline std::vector<SweepPoint> expand_sweep(const ScenarioConfig& c) {
  std::vector<SweepPoint> pts;
  std::vector<std::pair<std::string, std::vector<std::string>>> axes(c.sweep.axes.begin(), c.sweep.axes.end());
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.second.size();
  if (total > 100000) throw config_error("sweep: more than 100000 points");
  for (std::size_t idx = 0; idx < total; ++idx) {
    SweepPoint p;
    p.index = idx;
    p.config = c;
    p.config.command = c.sweep.mode;
    std::size_t rest = idx;
    for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
      const std::string& v = it->second[rest % it->second.size()];
      rest /= it->second.size();
      p.coords.insert(p.coords.begin(), {it->first, v});
    }
    for (const auto& [k, v] : p.coords) {
      auto& md = p.config.model;
      if (k == "n") md.n = v;
      if (k == "sigma") md.sigma = v;
      if (k == "gamma") md.gamma = v;
      if (k == "mu") md.mu = v;
      if (k == "p") md.p = v;
      if (k == "amplitude") {
        p.config.u0.amplitude = parse_double_text(v, "sweep.axes.amplitude");
        p.config.u1.amplitude = p.config.u0.amplitude;
      }
    }
    validate(p.config);
    pts.push_back(std::move(p));
  }
  return pts;
}

struct SweepRow {
  std::size_t index;
  json record;
  std::vector<std::string> csv;
  bool ok;
};

inline SweepRow run_point(const SweepPoint& pt) {
  json rec;
  rec["index"] = pt.index;
  json coords;
  for (const auto& [k, v] : pt.coords) coords[k] = v;
  rec["coords"] = coords;
  const RegimeVerdict v = classify_exact(to_exact(pt.config.model));
  rec["verdict"] = verdict_json(v);
  std::string blown = "", t_star = "";
  bool ok = true;
  if (pt.config.command == "simulate") {
    try {
      const Simulation sim = simulate(pt.config);
      rec["result"] = blowup_json(sim.result.report);
      blown = sim.result.report.blown ? "1" : "0";
      t_star = fmt(sim.result.report.t_star);
    } catch (const std::exception& e) {
      rec["error"] = e.what();
      ok = false;
    }
  }
  std::vector<std::string> row{std::to_string(pt.index)};
  for (const auto& [k, val] : pt.coords) row.push_back(val);
  row.insert(row.end(), {regime_name(v.tag), std::to_string(v.bullet),
                         v.p_c_exact ? rational_to_string(*v.p_c_exact) : "inf", blown, t_star, ok ? "ok" : "error"});
  return {pt.index, rec, row, ok};
}

/// Collects finished points; the only shared state between workers.
class ResultSink {
 public:
  ResultSink(std::filesystem::path dir) : dir_(std::move(dir)) {}
  void put(SweepRow row) {
    std::lock_guard lock(mu_);
    char name[32];
    std::snprintf(name, sizeof name, "point_%06zu.json", row.index);
    write_atomic(dir_ / "points" / name, row.record.dump(2) + "\n");
    rows_.push_back(std::move(row));
  }
  std::vector<SweepRow> take() {
    std::lock_guard lock(mu_);
    std::sort(rows_.begin(), rows_.end(), [](const SweepRow& a, const SweepRow& b) { return a.index < b.index; });
    return std::move(rows_);
  }

 private:
  std::filesystem::path dir_;
  std::mutex mu_;
  std::vector<SweepRow> rows_;
};

inline int run_sweep(const ScenarioConfig& c) {
  const auto points = expand_sweep(c);
  ResultSink sink(c.output_dir);
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        sink.put(run_point(points[i]));
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  const unsigned nthreads = std::min<unsigned>(c.sweep.threads, unsigned(std::max<std::size_t>(points.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);

  const auto rows = sink.take();
  std::vector<std::string> cols{"index"};
  for (const auto& [k, v] : c.sweep.axes) cols.push_back(k);
  cols.insert(cols.end(), {"tag", "bullet", "p_c", "blown", "t_star", "status"});
  CsvTable table(cols);
  json arr = json::array();
  bool all_ok = true;
  for (const auto& r : rows) {
    table.add(r.csv);
    arr.push_back(r.record);
    all_ok = all_ok && r.ok;
  }
  json report = report_header(c);
  report["points"] = arr;
  report["passed"] = all_ok;
  write_report(c, report);
  write_table(c, "sweep.csv", table);
  std::cout << rows.size() << " sweep points written to " << c.output_dir << "\n";
  return all_ok ? kOk : kFailed;
}

// ---------------------------------------------------------------------------

/// Executes the command and maps errors onto exit codes.
inline int run_scenario(const ScenarioConfig& config) {
  try {
    validate(config);
    if (config.command == "verify-lemmas") return run_verify(config);
    if (config.command == "classify") return run_classify(config);
    if (config.command == "simulate") return run_simulate(config);
    if (config.command == "certify") return run_certify(config);
    if (config.command == "sweep") return run_sweep(config);
    throw usage_error("unknown command '" + config.command + "'");
  } catch (const usage_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const config_error& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kValidation;
  } catch (const fraclab::domain_error& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kValidation;
  } catch (const fraclab::input_error& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kValidation;
  } catch (const fraclab::integrability_error& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kValidation;
  } catch (const fraclab::invalid_profile_error& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
}

}  // namespace fraclab::cli
