#pragma once

// Verification suites behind `verify-lemmas`. Each check records what was
// measured and the tolerance it was held to.

#include <cmath>
#include <string>
#include <vector>

#include <boost/math/special_functions/hypergeometric_1F1.hpp>

#include "fraclab/frac_laplacian.hpp"
#include "fraclab/frac_time.hpp"

namespace fraclab::cli {

struct Check {
  std::string suite;
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline Check at_most(std::string suite, std::string name, double measured, double tol, std::string detail = {}) {
  return {std::move(suite), std::move(name), measured, tol, std::isfinite(measured) && measured <= tol, std::move(detail)};
}

inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = double(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

inline std::vector<std::size_t> interior_nodes(std::size_t N, std::size_t count) {
  std::vector<std::size_t> ids;
  for (std::size_t k = 1; k <= count; ++k) ids.push_back(std::size_t(std::llround(double(k) * double(N) / double(count + 1))));
  return ids;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Time-fractional calculus.

inline std::vector<Check> verify_time() {
  std::vector<Check> out;
  const std::string S = "time";

  // D^{m+alpha}_{t|T} w by product integration against the closed form
  {
    const std::size_t N = 8192;
    double worst = 0.0;
    for (double a : {0.2, 0.5, 0.8})
      for (int m = 0; m <= 2; ++m) {
        const WeightProfile w(1.0, default_beta(a, 2.0));
        const auto g = TimeGrid::uniform(1.0, N);
        const auto f = weight_signed_derivative_samples(g, w, m);
        const auto ids = detail::interior_nodes(N, 50);
        const auto d = ProductIntegrator(g, f, Side::right).derivative_at_nodes(a, ids);
        for (std::size_t k = 0; k < ids.size(); ++k)
          worst = std::max(worst, std::abs(d[k] / weight_frac_derivative(g[ids[k]], w, FracOrder(a, m)) - 1.0));
      }
    out.push_back(detail::at_most(S, "weight_derivative_closed_form", worst, 1e-6, "max relative error, 50 interior nodes"));
  }

  // T-scaling of the weighted integral and its closed-form constant
  {
    double worst_const = 0.0, worst_closed = 0.0;
    const double p = 2.0, pp = 2.0;
    for (int m = 0; m <= 2; ++m) {
      const double a = 0.5;
      std::vector<double> c;
      for (double T : {10.0, 100.0, 1000.0}) {
        const WeightProfile w(T, default_beta(a, p));
        const auto v = lemma2_integral(FracOrder(a, m), p, w);
        c.push_back(v.numeric_value / std::pow(T, 1.0 - (m + a) * pp));
        worst_closed = std::max(worst_closed, std::abs(v.numeric_value / v.closed_form_value - 1.0));
      }
      for (double v : c) worst_const = std::max(worst_const, std::abs(v / c.front() - 1.0));
    }
    out.push_back(detail::at_most(S, "weight_integral_scaling", worst_const, 1e-4, "spread of I(T)/T^{1-(m+a)p'}"));
    out.push_back(detail::at_most(S, "weight_integral_closed_form", worst_closed, 1e-4, "relative error vs closed form"));
  }

  // D^a I^a f = f on a polynomial
  {
    const std::size_t N = 1024;
    const auto g = TimeGrid::uniform(1.0, N);
    const auto f = g.sample([](double t) { return t * t * t * (1.0 - 2.0 * t + 0.5 * t * t); });
    double worst = 0.0;
    for (double a : {0.1, 0.5, 0.9}) {
      const auto I = ProductIntegrator(g, f, Side::left).integral_at_nodes(a);
      const auto D = ProductIntegrator(g, I, Side::left).derivative_at_nodes(a);
      for (std::size_t i = 1; i < N; ++i) worst = std::max(worst, std::abs(D[i] - f[i]));
    }
    out.push_back(detail::at_most(S, "semigroup_identity", worst, 1e-6, "max |D^a I^a f - f|"));
  }

  // (-1)^m d^m D^a w = D^{m+a} w: analytic derivative of the m = 0 closed form
  {
    double worst = 0.0;
    for (double a : {0.3, 0.7})
      for (int m = 1; m <= 2; ++m) {
        const WeightProfile w(2.0, default_beta(a, 2.0));
        const double c0 = weight_gamma_ratio(w.beta, a) * std::pow(w.T, -a);
        for (double t : {0.1, 0.7, 1.3, 1.9}) {
          double lhs = c0 * std::pow(1.0 - t / w.T, w.beta - a - m);
          for (int j = 0; j < m; ++j) lhs *= (w.beta - a - j) / w.T;
          const double rhs = weight_frac_derivative(t, w, FracOrder(a, m));
          worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
        }
      }
    out.push_back(detail::at_most(S, "composition_identity", worst, 1e-6, "relative residual"));
  }

  // integration by parts
  {
    const std::size_t N = 2048;
    double worst = 0.0;
    for (double a : {0.1, 0.5, 0.9}) {
      const auto g = TimeGrid::uniform(1.0, N);
      const WeightProfile w(1.0, default_beta(a, 2.0));
      const auto f = g.sample([&](double t) { return weight_value(t, w); });
      const auto q = g.sample([](double t) { return t * t; });
      const auto c = g.sample([](double t) { return std::cos(t); });
      worst = std::max({worst, ibp_residual(g, f, q, a), ibp_residual(g, f, f, a), ibp_residual(g, f, c, a)});
    }
    out.push_back(detail::at_most(S, "integration_by_parts", worst, 1e-5, "max residual over three pairs"));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fractional Laplacian.

inline std::vector<Check> verify_laplacian() {
  std::vector<Check> out;
  const std::string S = "laplacian";

  // singular integral on a Gaussian against the 1F1 closed form
  {
    double worst = 0.0;
    for (int n = 1; n <= 3; ++n)
      for (double s : {0.25, 0.75})
        for (double r : {0.0, 0.5, 2.0, 5.0}) {
          const double oracle = std::pow(4.0, s) * std::tgamma(0.5 * n + s) / std::tgamma(0.5 * n) *
                                boost::math::hypergeometric_1F1(0.5 * n + s, 0.5 * n, -r * r);
          const double v = frac_lap_singular_radial(GaussianProfile{1.0}, n, r, s);
          worst = std::max(worst, std::abs(v - oracle) / std::max(std::abs(oracle), 1e-3));
        }
    out.push_back(detail::at_most(S, "gaussian_closed_form", worst, 1e-6, "relative error of the singular integral"));
  }

  // sup ratio |(-Delta)^s phi| / phi under quadrature refinement, and the tail slope
  for (int n = 1; n <= 3; ++n) {
    const double s = 0.5;
    const RadialTestFn fn(n, s);
    double sup = 0.0, sup_ref = 0.0;
    for (double r : {0.0, 0.5, 1.0, 2.0, 8.0, 64.0, 512.0}) {
      const double ph = phi_radial(r, fn);
      sup = std::max(sup, std::abs(frac_lap_singular_radial(PhiProfile{fn, 1.0}, n, r, s)) / ph);
      sup_ref = std::max(sup_ref, std::abs(frac_lap_singular_radial(PhiProfile{fn, 1.0}, n, r, s, SingularQuadrature{}.refined())) / ph);
    }
    out.push_back(detail::at_most(S, "sup_ratio_n" + std::to_string(n), std::abs(sup_ref / sup - 1.0), 0.05,
                                  "relative change of the sup ratio " + std::to_string(sup)));
    std::vector<double> x, y;
    for (double r : {10.0, 31.6, 100.0, 316.0, 1000.0}) {
      x.push_back(std::log(r));
      y.push_back(std::log(std::abs(frac_lap_singular_radial(PhiProfile{fn, 1.0}, n, r, s))));
    }
    const double slope = detail::fit_slope(x, y);
    out.push_back(detail::at_most(S, "tail_slope_n" + std::to_string(n), slope + fn.decay(), 0.1,
                                  "fitted slope " + std::to_string(slope)));
  }

  // rescaling identity on phi and a Gaussian
  {
    double worst = 0.0;
    const RadialTestFn fn(2, 0.5);
    for (double R : {2.0, 8.0}) {
      const auto a = scaling_check(PhiProfile{fn, 1.0}, 2, 0.5, R, 1.7 * R);
      const auto b = scaling_check(GaussianProfile{1.0}, 2, 0.5, R, 0.6 * R);
      worst = std::max({worst, std::abs(a.lhs / a.rhs - 1.0), std::abs(b.lhs / b.rhs - 1.0)});
    }
    out.push_back(detail::at_most(S, "scaling_identity", worst, 1e-6, "relative error"));
  }

  // growth of the weighted integral in R
  {
    const RadialTestFn fn(1, 0.5);
    const double p = 2.0;
    std::vector<double> x, y;
    for (double R : {4.0, 8.0, 16.0, 32.0}) {
      x.push_back(std::log(R));
      y.push_back(std::log(lemma6_integral(fn, p, R)));
    }
    const double expected = -2.0 * fn.s * p / (p - 1.0) + fn.n;
    const double slope = detail::fit_slope(x, y);
    out.push_back(detail::at_most(S, "weighted_integral_slope", std::abs(slope - expected) / std::max(1.0, std::abs(expected)),
                                  0.02, "fitted slope " + std::to_string(slope)));
  }

  // spectral operator on a large box against the singular integral
  {
    const RadialTestFn fn(1, 0.5);
    PeriodicField f(1, 512.0, 1 << 16);
    f.fill_radial([&](double r) { return phi_radial(r, fn); });
    const PeriodicField g = frac_lap_spectral(f, 0.5);
    double worst = 0.0;
    for (double r : {0.0, 0.5, 1.0, 3.0}) {
      const std::size_t i = std::size_t(std::llround((r + f.half_length()) / f.spacing()));
      const double ref = frac_lap_singular_radial(PhiProfile{fn, 1.0}, 1, f.radius(i), 0.5);
      worst = std::max(worst, std::abs(g[i] - ref) / std::abs(ref));
    }
    out.push_back(detail::at_most(S, "spectral_vs_singular", worst, 0.01, "relative difference, box half-width 512"));
  }
  return out;
}

inline std::vector<Check> verify_suite(const std::string& suite) {
  std::vector<Check> out;
  if (suite == "all" || suite == "time") {
    auto t = verify_time();
    out.insert(out.end(), t.begin(), t.end());
  }
  if (suite == "all" || suite == "laplacian") {
    auto l = verify_laplacian();
    out.insert(out.end(), l.begin(), l.end());
  }
  return out;
}

}  // namespace fraclab::cli
