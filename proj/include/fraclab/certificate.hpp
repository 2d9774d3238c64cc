#pragma once

// Space-time test-function functionals evaluated on discrete data and solver
// trajectories: the data functional, I_R and its exterior part, the weak-form
// identity, the master bound with explicit Hoelder constants, and the scale
// couplings of the three blow-up cases.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "fraclab/errors.hpp"
#include "fraclab/exponents.hpp"
#include "fraclab/frac_laplacian.hpp"
#include "fraclab/frac_time.hpp"
#include "fraclab/periodic_field.hpp"
#include "fraclab/solver.hpp"

namespace fraclab {

/// phi_R(x) D^alpha_{t|T} w(t) with phi of order s = sigma/2.
struct TestPair {
  RadialTestFn fn;
  double R;
  WeightProfile prof;
  double alpha;

  TestPair(RadialTestFn f, double scale, WeightProfile w, double a) : fn(f), R(scale), prof(w), alpha(a) {
    if (!(R > 0.0)) throw domain_error("TestPair: R must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("TestPair: alpha must lie in (0,1)");
    if (!(prof.beta > alpha + 2.0))
      throw invalid_profile_error("TestPair: beta must exceed alpha + 2 for the second time derivative");
  }

  /// Pair used in the blow-up argument for the given model and horizon.
  static TestPair for_model(const ModelParams& m, double R, double T, std::optional<double> beta = std::nullopt) {
    const double a = m.alpha();
    return TestPair(RadialTestFn(m.n, 0.5 * m.sigma), R, WeightProfile(T, beta.value_or(default_beta(a, m.p))), a);
  }

  double T() const { return prof.T; }
  double phi_R(double r) const { return phi_radial(r / R, fn); }
  /// D^{m+alpha}_{t|T} w(t).
  double dw(double t, int m) const { return weight_frac_derivative(t, prof, FracOrder(alpha, m)); }
  /// Time factor of the test function and its first two derivatives.
  double psi(double t) const { return dw(t, 0); }
  double psi_t(double t) const { return -dw(t, 1); }
  double psi_tt(double t) const { return dw(t, 2); }

  PeriodicField sample_phi(const PeriodicField& grid) const {
    PeriodicField out(grid.dim(), grid.half_length(), grid.points());
    out.fill_radial([this](double r) { return phi_R(r); });
    return out;
  }
};

/// int phi dx over R^n (radial quadrature).
inline double phi_mass(const RadialTestFn& fn) {
  const int n = fn.n;
  boost::math::quadrature::exp_sinh<double> es;
  const double outer = es.integrate([&](double u) { return std::pow(1.0 + u, n - 1) * phi_radial(1.0 + u, fn); }, 0.0,
                                    std::numeric_limits<double>::infinity());
  return sphere_area(n) * (1.0 / n + outer);
}

namespace detail {

inline double weighted_integral(const PeriodicField& f, const PeriodicField& g) {
  if (!f.same_grid(g)) throw internal_error("weighted_integral: grid mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return s * f.cell_volume();
}

// Relative weight of the outer shell max|x_i| > 0.9 L in int |f|.
inline double edge_fraction(const PeriodicField& f) {
  double all = 0.0, edge = 0.0;
  const double cut = 0.9 * f.half_length();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto x = f.point(i);
    const double m = std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])});
    all += std::abs(f[i]);
    if (m > cut) edge += std::abs(f[i]);
  }
  return all > 0.0 ? edge / all : 0.0;
}

inline double trapezoid(std::span<const double> t, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) s += 0.5 * (t[i + 1] - t[i]) * (y[i] + y[i + 1]);
  return s;
}

}  // namespace detail

/// int (u1 + mu (-Delta)^{sigma/2} u0) phi_R dx on the box.
inline double data_functional(const PeriodicField& u0, const PeriodicField& u1, double mu, double sigma, double R) {
  if (!u0.same_grid(u1)) throw domain_error("data_functional: u0 and u1 must share a grid");
  if (!(sigma > 0.0 && sigma < 2.0)) throw domain_error("data_functional: sigma must lie in (0,2)");
  if (!(R > 0.0)) throw domain_error("data_functional: R must be positive");
  PeriodicField g = frac_lap_spectral(u0, 0.5 * sigma);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = u1[i] + mu * g[i];
  if (!g.all_finite()) throw integrability_error("data_functional: non-finite integrand");
  if (detail::edge_fraction(u0) > 1e-3 || detail::edge_fraction(u1) > 1e-3)
    throw integrability_error("data_functional: data not decayed at the box edge");
  const RadialTestFn fn(u0.dim(), 0.5 * sigma);
  PeriodicField phi(u0.dim(), u0.half_length(), u0.points());
  phi.fill_radial([&](double r) { return phi_radial(r / R, fn); });
  return detail::weighted_integral(g, phi);
}

/// Trajectory restricted to [0,T]; the last sample is interpolated linearly onto T when needed.
struct TimeSlice {
  std::vector<double> times;
  std::vector<PeriodicField> u;
};

inline TimeSlice truncate(const Trajectory& traj, double T) {
  if (traj.times.empty() || traj.times.front() != 0.0) throw domain_error("truncate: trajectory must start at 0");
  if (traj.times.back() < T * (1.0 - 1e-12)) throw domain_error("truncate: trajectory does not cover [0,T]");
  TimeSlice s;
  std::size_t i = 0;
  for (; i < traj.times.size() && traj.times[i] <= T * (1.0 + 1e-12); ++i) {
    s.times.push_back(traj.times[i]);
    s.u.push_back(traj.u[i]);
  }
  if (s.times.back() < T * (1.0 - 1e-12)) {
    const double t0 = traj.times[i - 1], t1 = traj.times[i];
    const double th = (T - t0) / (t1 - t0);
    PeriodicField v = traj.u[i - 1];
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = (1.0 - th) * traj.u[i - 1][k] + th * traj.u[i][k];
    s.times.push_back(T);
    s.u.push_back(std::move(v));
  } else {
    s.times.back() = T;
  }
  return s;
}

struct ProofFunctionals {
  double I_R;
  double I_tilde_R;
};

/// I_R = int_0^T int |u|^p phi_R w dx dt and its restriction to |x| >= R.
inline ProofFunctionals proof_functionals(const Trajectory& traj, const TestPair& pair, double p) {
  if (traj.u.empty()) throw domain_error("proof_functionals: empty trajectory");
  if (pair.R > traj.u.front().half_length()) throw domain_error("proof_functionals: R exceeds the box");
  const TimeSlice s = truncate(traj, pair.T());
  const PeriodicField phi = pair.sample_phi(s.u.front());
  std::vector<double> full(s.times.size()), outer(s.times.size());
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    const auto& u = s.u[k];
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double v = abs_pow(u[i], p) * phi[i];
      a += v;
      if (u.radius(i) >= pair.R) b += v;
    }
    const double w = weight_value(s.times[k], pair.prof);
    full[k] = a * u.cell_volume() * w;
    outer[k] = b * u.cell_volume() * w;
  }
  return {detail::trapezoid(s.times, full), detail::trapezoid(s.times, outer)};
}

// ---------------------------------------------------------------------------
// Master bound.

struct BoundInputs {
  double I_R = 0.0;
  double I_tilde_R = 0.0;
  double data_value = 0.0;   // int (u1 + mu (-Delta)^{sigma/2} u0) phi_R
  double u0_integral = 0.0;  // int u0 phi_R
};

struct MasterBound {
  double lhs;
  double rhs;
  double slack;  // lhs / rhs; at most 1 when the bound holds with the explicit constants
  // rhs pieces
  double j1, j2, j3, u0_term;
  // the same right side with all constants set to 1 (pure scaling form)
  double rhs_scaling;
  // Hoelder constants
  double c_data, c_u0, k1, k2, k3;
};

/// lhs = Gamma(alpha) I_R + c_data T^{-alpha} data_value
/// rhs = I_R^{1/p} k1 + I~_R^{1/p} k2 + I_R^{1/p} k3 + c_u0 T^{-1-alpha} |u0_integral|
/// with k1, k2, k3 the exact Hoelder factors of the three space-time terms.
inline MasterBound master_bound(const BoundInputs& in, const ModelParams& params, const TestPair& pair) {
  params.validate();
  const double p = params.p, pp = params.p_prime();
  const double a = pair.alpha, T = pair.T(), R = pair.R;
  const int n = params.n;
  const double sigma = params.sigma;
  auto L2 = [&](int m) { return lemma2_closed_form(FracOrder(a, m), p, pair.prof); };

  MasterBound b{};
  b.c_data = weight_gamma_ratio(pair.prof.beta, a);
  b.c_u0 = weight_gamma_ratio(pair.prof.beta, 1.0 + a);
  const double mass_R = std::pow(R, n) * phi_mass(pair.fn);
  b.k1 = std::pow(mass_R * L2(2), 1.0 / pp);
  b.k2 = std::pow(L2(0) * lemma6_integral(pair.fn, p, R, 1.0), 1.0 / pp);
  b.k3 = params.mu * std::pow(L2(1) * lemma6_integral(pair.fn, p, R, 0.5 * sigma), 1.0 / pp);

  const double Ip = std::pow(std::max(in.I_R, 0.0), 1.0 / p);
  const double Itp = std::pow(std::max(in.I_tilde_R, 0.0), 1.0 / p);
  b.j1 = Ip * b.k1;
  b.j2 = Itp * b.k2;
  b.j3 = Ip * b.k3;
  b.u0_term = b.c_u0 * std::pow(T, -1.0 - a) * std::abs(in.u0_integral);
  b.lhs = std::tgamma(a) * in.I_R + b.c_data * std::pow(T, -a) * in.data_value;
  b.rhs = b.j1 + b.j2 + b.j3 + b.u0_term;
  b.slack = b.rhs > 0.0 ? b.lhs / b.rhs : (b.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  const double tp = std::pow(T, 1.0 / pp - a);
  b.rhs_scaling = Ip * std::pow(R, n / pp) * tp * (std::pow(T, -2.0) + std::pow(T, -1.0) * std::pow(R, -sigma)) +
                  Itp * tp * std::pow(R, n / pp - 2.0) + std::pow(T, -1.0 - a) * std::abs(in.u0_integral);
  return b;
}

// ---------------------------------------------------------------------------
// Weak-form identity.

struct WeakFormTerms {
  // left side
  double memory = 0.0;
  double forcing = 0.0;
  double u1_term = 0.0;
  double u0_term = 0.0;
  double damping_data = 0.0;
  // right side
  double inertia = 0.0;
  double diffusion = 0.0;
  double damping = 0.0;

  double lhs() const { return memory + forcing + u1_term + u0_term + damping_data; }
  double rhs() const { return inertia + diffusion + damping; }
  double residual() const { return std::abs(lhs() - rhs()); }
  double scale() const {
    return std::max({std::abs(memory), std::abs(forcing), std::abs(u1_term), std::abs(u0_term), std::abs(damping_data),
                     std::abs(inertia), std::abs(diffusion), std::abs(damping)});
  }
  double relative() const { return scale() > 0.0 ? residual() / scale() : 0.0; }
};

/// Extra right-hand side f(t, x) of a manufactured problem.
using Forcing = std::function<double(double, const std::array<double, 3>&)>;

/// Both sides of the weak formulation with phi(t,x) = phi_R(x) D^alpha_{t|T} w(t).
/// Spatial operators act spectrally on the box, matching the solver; the memory
/// term is Gamma(alpha) I^alpha_{0|t} of int |u|^p phi_R by product integration.
inline WeakFormTerms weak_form_residual(const Trajectory& traj, const TestPair& pair, const ModelParams& params,
                                        const PeriodicField& u0, const PeriodicField& u1, const Forcing& forcing = {},
                                        bool memory = true) {
  params.validate();
  const TimeSlice s = truncate(traj, pair.T());
  if (s.times.size() < 3) throw domain_error("weak_form_residual: need at least two time steps");
  const PeriodicField phi = pair.sample_phi(u0);
  const PeriodicField lap_phi = frac_lap_spectral(phi, 1.0);
  const PeriodicField frac_phi = frac_lap_spectral(phi, 0.5 * params.sigma);
  const double a = pair.alpha;
  const std::size_t N = s.times.size();

  WeakFormTerms w;
  std::vector<double> U(N), ULap(N), UFrac(N), Np(N), Fr(N, 0.0);
  for (std::size_t k = 0; k < N; ++k) {
    const auto& u = s.u[k];
    U[k] = detail::weighted_integral(u, phi);
    ULap[k] = detail::weighted_integral(u, lap_phi);
    UFrac[k] = detail::weighted_integral(u, frac_phi);
    double np = 0.0, fr = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      np += abs_pow(u[i], params.p) * phi[i];
      if (forcing) fr += forcing(s.times[k], u.point(i)) * phi[i];
    }
    Np[k] = np * u.cell_volume();
    Fr[k] = fr * u.cell_volume();
  }

  std::vector<double> psi(N), psi1(N), psi2(N);
  for (std::size_t k = 0; k < N; ++k) {
    psi[k] = pair.psi(s.times[k]);
    psi1[k] = pair.dw(s.times[k], 1);
    psi2[k] = pair.dw(s.times[k], 2);
  }
  auto integrate = [&](const std::vector<double>& f, const std::vector<double>& g) {
    std::vector<double> y(N);
    for (std::size_t k = 0; k < N; ++k) y[k] = f[k] * g[k];
    return detail::trapezoid(s.times, y);
  };

  if (memory) {
    const TimeGrid grid = TimeGrid::from_nodes(s.times);
    const ProductIntegrator pi(grid, Np, Side::left, ProductRule{3});
    auto Ia = pi.integral_at_nodes(a);
    for (double& v : Ia) v *= std::tgamma(a);
    w.memory = integrate(Ia, psi);
  }
  if (forcing) w.forcing = integrate(Fr, psi);
  w.u1_term = pair.psi(0.0) * detail::weighted_integral(u1, phi);
  w.u0_term = pair.dw(0.0, 1) * detail::weighted_integral(u0, phi);
  w.damping_data = params.mu * pair.psi(0.0) * detail::weighted_integral(frac_lap_spectral(u0, 0.5 * params.sigma), phi);
  w.inertia = integrate(U, psi2);
  w.diffusion = integrate(ULap, psi);
  w.damping = params.mu * integrate(UFrac, psi1);
  return w;
}

// ---------------------------------------------------------------------------
// Scale couplings and exponent bookkeeping.

/// R as a function of T in the three cases of the blow-up argument.
inline double case_coupling(int case_id, double T, double K, const ModelParams& params) {
  if (!(T > 0.0)) throw domain_error("case_coupling: T must be positive");
  if (!(K >= 1.0)) throw domain_error("case_coupling: K must be >= 1");
  const double st = params.sigma_tilde();
  switch (case_id) {
    case 1: return std::pow(T, 1.0 / (2.0 - st));
    case 2: return std::pow(T / K, 1.0 / (2.0 - st));
    case 3:
      if (!(T > std::numbers::e)) throw domain_error("case_coupling: case 3 needs T > e");
      return std::log(T);
    default: throw domain_error("case_coupling: case id must be 1, 2 or 3");
  }
}

/// T-exponent 1 - alpha p' + n/(2-st) - 2p'/(2-st) left after the Young split under R = T^{1/(2-st)}.
inline double case1_exponent(const ModelParams& m) {
  const double st = m.sigma_tilde(), pp = m.p_prime();
  return 1.0 - m.alpha() * pp + m.n / (2.0 - st) - 2.0 * pp / (2.0 - st);
}

struct Case2Exponents {
  double k_first;   // -n/(2-st)
  double k_second;  // -(n - sigma p')/(2-st)
  double sign;      // n - sigma p', positive at p = p_c when sigma <= 1
};

inline Case2Exponents case2_exponents(const ModelParams& m) {
  const double st = m.sigma_tilde(), pp = m.p_prime();
  return {-m.n / (2.0 - st), -(m.n - m.sigma * pp) / (2.0 - st), m.n - m.sigma * pp};
}

/// 1/p' - alpha; negative exactly when p < 1/gamma.
inline double case3_sign(const ModelParams& m) { return 1.0 / m.p_prime() - m.alpha(); }

}  // namespace fraclab
