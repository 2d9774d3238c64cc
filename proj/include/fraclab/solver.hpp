#pragma once

// Pseudo-spectral integrator for
//   u_tt - Delta u + mu (-Delta)^{sigma/2} u_t = int_0^t (t-s)^{-gamma} |u(s)|^p ds
// on a periodic box. The linear part is propagated exactly per Fourier mode; the
// memory source enters through a trapezoidal Duhamel term.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "fraclab/errors.hpp"
#include "fraclab/exponents.hpp"
#include "fraclab/periodic_field.hpp"

namespace fraclab {

// ---------------------------------------------------------------------------
// Exact single-mode solution.

/// Solution of a'' + mu|k|^sigma a' + |k|^2 a = 0, a(0)=a0, a'(0)=a1, from the
/// characteristic roots (repeated root handled separately).
inline std::complex<double> linear_mode_reference(double k, double mu, double sigma, double t, std::complex<double> a0,
                                                  std::complex<double> a1) {
  using C = std::complex<double>;
  k = std::abs(k);
  if (k == 0.0) return a0 + a1 * t;
  const double damp = mu * std::pow(k, sigma);
  const C disc = std::sqrt(C(damp * damp - 4.0 * k * k, 0.0));
  const C lp = 0.5 * (-damp + disc);
  const C lm = 0.5 * (-damp - disc);
  if (std::abs(lp - lm) <= 1e-12 * (std::abs(lp) + 1.0)) {
    const C lam = -0.5 * damp;
    return (a0 + (a1 - lam * a0) * t) * std::exp(lam * t);
  }
  const C cp = (a1 - lm * a0) / (lp - lm);
  const C cm = (lp * a0 - a1) / (lp - lm);
  return cp * std::exp(lp * t) + cm * std::exp(lm * t);
}

/// Real 2x2 propagator [a(h); a'(h)] = P [a(0); a'(0)] for one mode, written with
/// overflow-safe exponentials so heavily damped modes stay finite.
struct ModePropagator {
  double p00 = 1.0, p01 = 0.0, p10 = 0.0, p11 = 1.0;
};

inline ModePropagator mode_propagator(double k, double mu, double sigma, double h) {
  ModePropagator P;
  if (k == 0.0) {
    P.p01 = h;
    return P;
  }
  const double b = 0.5 * mu * std::pow(k, sigma);
  const double d2 = b * b - k * k;
  double EC, ES;  // e^{-bh} C(h), e^{-bh} S(h)
  if (d2 > 0.0) {
    const double d = std::sqrt(d2);
    const double slow = k * k / (b + d);  // b - d without cancellation
    const double e_slow = std::exp(-slow * h);
    const double e_fast = std::exp(-(b + d) * h);
    EC = 0.5 * (e_slow + e_fast);
    const double x = d * h;
    ES = x < 1e-6 ? std::exp(-b * h) * h * (1.0 + x * x / 6.0) : 0.5 * (e_slow - e_fast) / d;
  } else if (d2 < 0.0) {
    const double w = std::sqrt(-d2);
    const double E = std::exp(-b * h);
    EC = E * std::cos(w * h);
    const double x = w * h;
    ES = x < 1e-6 ? E * h * (1.0 - x * x / 6.0) : E * std::sin(x) / w;
  } else {
    const double E = std::exp(-b * h);
    EC = E;
    ES = E * h;
  }
  P.p00 = EC + b * ES;
  P.p01 = ES;
  P.p10 = -k * k * ES;
  P.p11 = EC - b * ES;
  return P;
}

// ---------------------------------------------------------------------------
// Memory quadrature.

/// Product-integration weights for int_0^{t_n} (t_n - s)^{-gamma} f(s) ds with f
/// piecewise linear on the nodes t_0 = 0 < ... < t_n.
class MemoryQuadrature {
 public:
  explicit MemoryQuadrature(double gamma) : gamma_(gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw domain_error("MemoryQuadrature: gamma must lie in (0,1)");
  }
  double gamma() const { return gamma_; }

  /// Weights w_0..w_n at evaluation time t_n = times.back().
  std::vector<double> weights(std::span<const double> times) const {
    const std::size_t n = times.size() - 1;
    std::vector<double> w(times.size(), 0.0);
    const double tn = times[n];
    for (std::size_t j = 0; j < n; ++j) {
      const double h = times[j + 1] - times[j];
      if (!(h > 0.0)) throw internal_error("MemoryQuadrature: times must be strictly increasing");
      const double A = tn - times[j + 1];
      const auto [left, right] = interval_weights(A, h);
      w[j] += left;
      w[j + 1] += right;
    }
    return w;
  }

  /// Closed-form kernel mass int_0^t (t-s)^{-gamma} ds.
  double unit_mass(double t) const { return std::pow(t, 1.0 - gamma_) / (1.0 - gamma_); }

 private:
  // Coefficients of f(t_j) and f(t_{j+1}) for one interval; A = t_n - t_{j+1}, h its length.
  std::pair<double, double> interval_weights(double A, double h) const {
    const double g = gamma_;
    double m0;  // int_A^{A+h} tau^{-g} d tau
    if (A == 0.0)
      m0 = std::pow(h, 1.0 - g) / (1.0 - g);
    else
      m0 = std::pow(A, 1.0 - g) * std::expm1((1.0 - g) * std::log1p(h / A)) / (1.0 - g);
    double left;  // int_A^{A+h} tau^{-g} (tau - A)/h d tau, the weight of f(t_j)
    if (A < 4.0 * h) {
      const double B = A + h;
      const double m1 = (std::pow(B, 2.0 - g) - std::pow(A, 2.0 - g)) / (2.0 - g);
      left = (m1 - A * m0) / h;
    } else {
      // smooth integrand: 8-point Gauss on xi in [0,1]
      static constexpr double x[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
      static constexpr double wt[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
      double s = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int sgn = -1; sgn <= 1; sgn += 2) {
          const double xi = 0.5 * (1.0 + sgn * x[i]);
          s += 0.5 * wt[i] * xi * std::pow(1.0 + xi * h / A, -g);
        }
      left = h * std::pow(A, -g) * s;
    }
    return {left, m0 - left};
  }

  double gamma_;
};

/// Snapshots of |u|^p at past time levels.
struct History {
  int dim = 1;
  double L = 1.0;
  std::size_t M = 2;
  std::vector<double> times;
  std::vector<std::vector<double>> values;
};

/// int_0^t (t-s)^{-gamma} f(s) ds pointwise in space, f piecewise linear over the history.
inline PeriodicField memory_convolution(const History& hist, const MemoryQuadrature& quad, double t) {
  PeriodicField out(hist.dim, hist.L, hist.M);
  if (hist.times.empty()) {
    if (t != 0.0) throw internal_error("memory_convolution: empty history at t > 0");
    return out;
  }
  if (hist.values.size() != hist.times.size()) throw internal_error("memory_convolution: history size mismatch");
  if (hist.times.front() != 0.0) throw internal_error("memory_convolution: history must start at t = 0");
  if (std::abs(hist.times.back() - t) > 1e-12 * std::max(1.0, t))
    throw internal_error("memory_convolution: history does not end at the evaluation time");
  if (hist.times.size() == 1) return out;
  const auto w = quad.weights(hist.times);
  auto v = out.values();
  for (std::size_t j = 0; j < w.size(); ++j) {
    const auto& f = hist.values[j];
    if (f.size() != v.size()) throw internal_error("memory_convolution: snapshot size mismatch");
    const double wj = w[j];
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += wj * f[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Time stepping.

struct SolverOptions {
  double dt = 1e-3;
  double t_max = 1.0;
  double threshold = 1e8;     // blow-up when sup|u| reaches this
  bool source = true;         // false: pure linear evolution
  double cfl = 1.0;           // dt * max|k| bound
  double growth_limit = 2.0;  // step rejected and halved if sup|u| grows more per step
  int max_halvings = 40;
  std::size_t store_every = 1;  // trajectory keeps every k-th accepted step (and the last)
};

struct NormSample {
  double t;
  double sup;
  double l2p;
};

struct BlowupReport {
  bool blown = false;
  bool overflow = false;  // non-finite values ended the run
  double t_star = std::numeric_limits<double>::infinity();
  double t_end = 0.0;
  std::vector<NormSample> peak_norms;
  // resolution metadata
  int dim = 1;
  double L = 0.0;
  std::size_t M = 0;
  double dt = 0.0;
  double min_dt = 0.0;
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PeriodicField> u;
};

struct EvolveResult {
  Trajectory trajectory;
  BlowupReport report;
};

inline double abs_pow(double u, double p) {
  const double a = std::abs(u);
  return a == 0.0 ? 0.0 : std::exp(p * std::log(a));
}

inline double lp_norm(const PeriodicField& f, double q) {
  double s = 0.0;
  for (double v : f.values()) s += abs_pow(v, q);
  return std::pow(s * f.cell_volume(), 1.0 / q);
}

namespace detail {

class SpectralStepper {
 public:
  using complex = std::complex<double>;

  SpectralStepper(const ModelParams& params, const PeriodicField& shape, bool source)
      : params_(params), plan_(shape), quad_(params.gamma), source_(source), shape_(shape) {
    hist_.dim = shape.dim();
    hist_.L = shape.half_length();
    hist_.M = shape.points();
  }

  SpectralPlan& plan() { return plan_; }

  double max_wavenumber() const {
    double m = 0.0;
    for (double k : plan_.wavenumber_norms()) m = std::max(m, k);
    return m;
  }

  const std::vector<ModePropagator>& propagators(double h) {
    auto it = cache_.find(h);
    if (it != cache_.end()) return it->second;
    if (cache_.size() > 64) cache_.clear();
    std::vector<ModePropagator> P;
    P.reserve(plan_.spectrum_size());
    for (double k : plan_.wavenumber_norms()) P.push_back(mode_propagator(k, params_.mu, params_.sigma, h));
    return cache_.emplace(h, std::move(P)).first->second;
  }

  void record(double t, const PeriodicField& u) {
    hist_.times.push_back(t);
    std::vector<double> f(u.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = abs_pow(u[i], params_.p);
    hist_.values.push_back(std::move(f));
  }

  // Memory source at the last recorded time, in Fourier space.
  std::vector<complex> source_hat(double t) {
    std::vector<complex> out(plan_.spectrum_size(), complex(0.0, 0.0));
    if (!source_) return out;
    const PeriodicField F = memory_convolution(hist_, quad_, t);
    plan_.forward(F.values(), out);
    return out;
  }

  void pop_record() {
    hist_.times.pop_back();
    hist_.values.pop_back();
  }

  // Displacement after a step of length h, in physical space.
  void displacement(const std::vector<complex>& uh, const std::vector<complex>& vh, const std::vector<complex>& Fh,
                    double h, PeriodicField& out) {
    const auto& P = propagators(h);
    std::vector<complex> next(uh.size());
    for (std::size_t i = 0; i < uh.size(); ++i) next[i] = P[i].p00 * uh[i] + P[i].p01 * vh[i] + 0.5 * h * P[i].p01 * Fh[i];
    plan_.inverse(next, out.values());
  }

  void velocity_hat(const std::vector<complex>& uh, const std::vector<complex>& vh, const std::vector<complex>& F0,
                    const std::vector<complex>& F1, double h, std::vector<complex>& out) {
    const auto& P = propagators(h);
    for (std::size_t i = 0; i < uh.size(); ++i)
      out[i] = P[i].p10 * uh[i] + P[i].p11 * vh[i] + 0.5 * h * (P[i].p11 * F0[i] + F1[i]);
  }

  const History& history() const { return hist_; }

 private:
  ModelParams params_;
  SpectralPlan plan_;
  MemoryQuadrature quad_;
  bool source_;
  PeriodicField shape_;
  History hist_;
  std::map<double, std::vector<ModePropagator>> cache_;
};

}  // namespace detail

/// Advance (u0, u1) to opts.t_max or until sup|u| reaches opts.threshold.
inline EvolveResult evolve(const ModelParams& params, const PeriodicField& u0, const PeriodicField& u1,
                           const SolverOptions& opts) {
  params.validate();
  if (!u0.same_grid(u1)) throw domain_error("evolve: u0 and u1 must share a grid");
  if (!u0.all_finite() || !u1.all_finite()) throw domain_error("evolve: initial data must be finite");
  if (!(opts.dt > 0.0) || !(opts.t_max > 0.0)) throw domain_error("evolve: dt and t_max must be positive");
  if (!(opts.threshold > 0.0)) throw domain_error("evolve: threshold must be positive");
  if (opts.store_every == 0) throw domain_error("evolve: store_every must be >= 1");

  using complex = std::complex<double>;
  detail::SpectralStepper st(params, u0, opts.source);
  const double kmax = st.max_wavenumber();
  if (opts.dt * kmax > opts.cfl) throw domain_error("evolve: dt * max|k| exceeds the CFL bound");

  EvolveResult res;
  auto& rep = res.report;
  rep.dim = u0.dim();
  rep.L = u0.half_length();
  rep.M = u0.points();
  rep.dt = opts.dt;
  rep.min_dt = opts.dt;

  const double q = 2.0 * params.p;
  PeriodicField u = u0;
  std::vector<complex> uh(st.plan().spectrum_size()), vh(uh.size()), vnext(uh.size());
  st.plan().forward(u0.values(), uh);
  st.plan().forward(u1.values(), vh);

  double t = 0.0;
  st.record(t, u);
  std::vector<complex> F0 = st.source_hat(t);
  res.trajectory.times.push_back(t);
  res.trajectory.u.push_back(u);
  double sup = u.sup_norm();
  rep.peak_norms.push_back({t, sup, lp_norm(u, q)});
  if (sup >= opts.threshold) {
    rep.blown = true;
    rep.t_star = 0.0;
    return res;
  }

  PeriodicField trial = u0;
  double h = opts.dt;
  std::size_t accepted = 0;
  bool stored_last = true;
  while (t < opts.t_max * (1.0 - 1e-14)) {
    const double step = std::min(h, opts.t_max - t);
    st.displacement(uh, vh, F0, step, trial);
    const bool finite = trial.all_finite();
    const double trial_sup = finite ? trial.sup_norm() : std::numeric_limits<double>::infinity();
    const bool too_fast = !finite || trial_sup > opts.growth_limit * std::max(sup, 1.0);
    const int halvings = int(std::lround(std::log2(opts.dt / h)));
    if (too_fast && halvings < opts.max_halvings) {
      h *= 0.5;
      ++rep.rejected;
      continue;
    }
    if (!finite) {
      if (halvings < opts.max_halvings) {
        h *= 0.5;
        ++rep.rejected;
        continue;
      }
      rep.blown = true;
      rep.overflow = true;
      rep.t_star = t;
      break;
    }
    if (trial_sup >= opts.threshold) {
      // bisect the step length for the first crossing of the threshold
      double lo = 0.0, hi = step;
      for (int it = 0; it < 60 && hi - lo > 1e-12 * std::max(1.0, t); ++it) {
        const double mid = 0.5 * (lo + hi);
        st.displacement(uh, vh, F0, mid, trial);
        const double s = trial.all_finite() ? trial.sup_norm() : std::numeric_limits<double>::infinity();
        (s >= opts.threshold ? hi : lo) = mid;
      }
      rep.blown = true;
      rep.t_star = t + hi;
      break;
    }

    // accept
    t += step;
    u = trial;
    st.record(t, u);
    std::vector<complex> F1 = st.source_hat(t);
    st.velocity_hat(uh, vh, F0, F1, step, vnext);
    st.plan().forward(u.values(), uh);
    vh.swap(vnext);
    F0.swap(F1);
    sup = trial_sup;
    rep.min_dt = std::min(rep.min_dt, step);
    ++accepted;
    rep.peak_norms.push_back({t, sup, lp_norm(u, q)});
    stored_last = false;
    if (accepted % opts.store_every == 0) {
      res.trajectory.times.push_back(t);
      res.trajectory.u.push_back(u);
      stored_last = true;
    }
  }
  if (!stored_last) {
    res.trajectory.times.push_back(t);
    res.trajectory.u.push_back(u);
  }
  rep.steps = accepted;
  rep.t_end = t;
  return res;
}

/// Fourier coefficients of a field, in the layout of SpectralPlan.
inline std::vector<std::complex<double>> spectrum(const PeriodicField& f) {
  SpectralPlan plan(f);
  std::vector<std::complex<double>> out(plan.spectrum_size());
  plan.forward(f.values(), out);
  return out;
}

}  // namespace fraclab
