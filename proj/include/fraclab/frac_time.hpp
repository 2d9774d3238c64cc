#pragma once

// Riemann-Liouville fractional integrals and derivatives on [0,T], evaluated by
// product integration: the sampled density is replaced by a piecewise polynomial
// interpolant and the weakly singular kernel is integrated against it exactly
// (monomial moments) on the cells next to the singularity and by Gauss-Legendre
// on the remaining cells, where the kernel is smooth.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "fraclab/errors.hpp"

namespace fraclab {

class TimeGrid {
 public:
  static TimeGrid uniform(double T, std::size_t intervals) {
    if (!(T > 0.0) || !std::isfinite(T)) throw domain_error("TimeGrid: horizon must be positive");
    if (intervals < 2) throw domain_error("TimeGrid: need at least 2 intervals");
    std::vector<double> x(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) x[i] = T * double(i) / double(intervals);
    x.back() = T;
    TimeGrid g;
    g.nodes_ = std::move(x);
    g.uniform_ = true;
    return g;
  }

  static TimeGrid from_nodes(std::vector<double> nodes) {
    if (nodes.size() < 3) throw domain_error("TimeGrid: need at least 2 intervals");
    if (nodes.front() != 0.0) throw domain_error("TimeGrid: first node must be 0");
    for (std::size_t i = 1; i < nodes.size(); ++i)
      if (!(nodes[i] > nodes[i - 1])) throw domain_error("TimeGrid: nodes must be strictly increasing");
    TimeGrid g;
    g.nodes_ = std::move(nodes);
    const double h = g.nodes_.back() / double(g.nodes_.size() - 1);
    g.uniform_ = true;
    for (std::size_t i = 1; i < g.nodes_.size(); ++i)
      if (std::abs(g.nodes_[i] - g.nodes_[i - 1] - h) > 1e-12 * h) g.uniform_ = false;
    return g;
  }

  double horizon() const { return nodes_.back(); }
  std::size_t intervals() const { return nodes_.size() - 1; }
  std::size_t size() const { return nodes_.size(); }
  std::span<const double> nodes() const { return nodes_; }
  double operator[](std::size_t i) const { return nodes_[i]; }
  bool is_uniform() const { return uniform_; }
  double step() const { return horizon() / double(intervals()); }

  template <class F>
  std::vector<double> sample(F&& f) const {
    std::vector<double> v(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) v[i] = f(nodes_[i]);
    return v;
  }

 private:
  TimeGrid() = default;
  std::vector<double> nodes_;
  bool uniform_ = false;
};

/// Temporal cut-off w(t) = (1 - t/T)^beta.
struct WeightProfile {
  double T;
  double beta;

  WeightProfile(double horizon, double exponent) : T(horizon), beta(exponent) {
    if (!(T > 0.0) || !std::isfinite(T)) throw domain_error("WeightProfile: T must be positive");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw invalid_profile_error("WeightProfile: beta must be positive");
  }
};

/// Order m + alpha of a right-sided derivative D^{m+alpha}_{t|T}.
struct FracOrder {
  double alpha;
  int m = 0;

  FracOrder(double a, int shift = 0) : alpha(a), m(shift) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("FracOrder: alpha must lie in (0,1)");
    if (m < 0) throw domain_error("FracOrder: m must be nonnegative");
  }
  double total() const { return double(m) + alpha; }
};

/// ceil(4(2+alpha)p') + 4: clears every (m+alpha)p' with m <= 2 by a wide margin.
inline double default_beta(double alpha, double p) {
  const double pp = p / (p - 1.0);
  return std::ceil(4.0 * (2.0 + alpha) * pp) + 4.0;
}

inline double weight_value(double t, const WeightProfile& prof) {
  if (!(t >= 0.0 && t <= prof.T)) throw domain_error("weight_value: t outside [0,T]");
  return std::pow(1.0 - t / prof.T, prof.beta);
}

/// Gamma(beta+1)/Gamma(beta+1-m-alpha), the constant of D^{m+alpha}_{t|T} w.
inline double weight_gamma_ratio(double beta, double order) {
  return boost::math::tgamma_ratio(beta + 1.0, beta + 1.0 - order);
}

/// Closed form of D^{m+alpha}_{t|T} w(t).
inline double weight_frac_derivative(double t, const WeightProfile& prof, const FracOrder& ord) {
  const double k = ord.total();
  if (!(prof.beta > k)) throw invalid_profile_error("weight_frac_derivative: beta must exceed m+alpha");
  if (!(t >= 0.0 && t <= prof.T)) throw domain_error("weight_frac_derivative: t outside [0,T]");
  return weight_gamma_ratio(prof.beta, k) * std::pow(prof.T, -k) * std::pow(1.0 - t / prof.T, prof.beta - k);
}

/// Local interpolation degree of the product rule. Degree 1 is the classical
/// piecewise-linear product trapezoid.
struct ProductRule {
  int degree = 5;
};

enum class Side { left, right };

namespace detail {

inline constexpr int kFarGauss = 8;

struct UnitGauss {
  std::array<double, kFarGauss> x{};
  std::array<double, kFarGauss> w{};
};

inline const UnitGauss& unit_gauss() {
  static const UnitGauss g = [] {
    using Rule = boost::math::quadrature::gauss<double, kFarGauss>;
    UnitGauss r;
    const auto& a = Rule::abscissa();
    const auto& wt = Rule::weights();
    std::size_t k = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0.0) {
        r.x[k] = 0.5;
        r.w[k++] = 0.5 * wt[i];
        continue;
      }
      r.x[k] = 0.5 * (1.0 - a[i]);
      r.w[k++] = 0.5 * wt[i];
      r.x[k] = 0.5 * (1.0 + a[i]);
      r.w[k++] = 0.5 * wt[i];
    }
    return r;
  }();
  return g;
}

/// Lagrange interpolant through (x_i, y_i) evaluated at z.
inline double extrapolate_to(std::span<const double> x, std::span<const double> y, double z) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double l = 1.0;
    for (std::size_t m = 0; m < x.size(); ++m)
      if (m != i) l *= (z - x[m]) / (x[i] - x[m]);
    sum += l * y[i];
  }
  return sum;
}

inline void check_finite(std::span<const double> v, const char* who) {
  for (double x : v)
    if (!std::isfinite(x)) throw input_error(std::string(who) + ": non-finite sample");
}

}  // namespace detail

/// Product-integration evaluator for one sampled function on one grid.
///
/// Left-sided operators act from 0, right-sided from T; the right side is handled
/// by reflecting s -> T - s so both share one kernel routine.
class ProductIntegrator {
 public:
  ProductIntegrator(const TimeGrid& grid, std::span<const double> values, Side side, ProductRule rule = {})
      : side_(side), T_(grid.horizon()), uniform_(grid.is_uniform()), h_(grid.step()) {
    if (values.size() != grid.size()) throw input_error("ProductIntegrator: sample count does not match grid");
    detail::check_finite(values, "ProductIntegrator");
    if (rule.degree < 1) throw domain_error("ProductIntegrator: degree must be >= 1");
    degree_ = std::min<int>(rule.degree, int(grid.intervals()));
    const std::size_t n = grid.size();
    x_.resize(n);
    f_.resize(n);
    if (side == Side::left) {
      std::copy(grid.nodes().begin(), grid.nodes().end(), x_.begin());
      std::copy(values.begin(), values.end(), f_.begin());
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        x_[i] = T_ - grid[n - 1 - i];
        f_[i] = values[n - 1 - i];
      }
      x_[0] = 0.0;
      x_[n - 1] = T_;
    }
    if (uniform_) build_uniform_basis();
  }

  Side side() const { return side_; }
  double horizon() const { return T_; }

  /// I^alpha f(t), left- or right-sided according to the evaluator's side.
  double integral(double alpha, double t) const {
    check_alpha(alpha);
    const double tl = local_time(t);
    if (!(tl > 0.0)) throw domain_error("integral: evaluation point at the base point of the integral");
    return kernel_sum(alpha - 1.0, false, tl, nullptr, 0) / std::tgamma(alpha);
  }

  /// D^alpha f(t), obtained by differentiating the product-integration
  /// approximation of I^{1-alpha} f analytically.
  double derivative(double alpha, double t) const {
    check_alpha(alpha);
    const double tl = local_time(t);
    if (!(tl > 0.0)) throw domain_error("derivative: evaluation point at the base point of the integral");
    return (f_[0] * std::pow(tl, -alpha) + kernel_sum(-alpha, true, tl, nullptr, 0)) / std::tgamma(1.0 - alpha);
  }

  /// I^alpha f at every grid node (original ordering). The base node (t=0 for
  /// left, t=T for right) holds 0.
  std::vector<double> integral_at_nodes(double alpha) const {
    check_alpha(alpha);
    return at_nodes(alpha - 1.0, false, 1.0 / std::tgamma(alpha), 0.0, all_nodes());
  }

  /// I^alpha f at the listed node indices.
  std::vector<double> integral_at_nodes(double alpha, std::span<const std::size_t> nodes) const {
    check_alpha(alpha);
    return at_nodes(alpha - 1.0, false, 1.0 / std::tgamma(alpha), 0.0, nodes);
  }

  /// D^alpha f at every grid node (original ordering). The base node holds NaN
  /// unless the sample there is zero (the derivative is singular otherwise).
  std::vector<double> derivative_at_nodes(double alpha) const {
    check_alpha(alpha);
    return at_nodes(-alpha, true, 1.0 / std::tgamma(1.0 - alpha), alpha, all_nodes());
  }

  /// D^alpha f at the listed node indices.
  std::vector<double> derivative_at_nodes(double alpha, std::span<const std::size_t> nodes) const {
    check_alpha(alpha);
    return at_nodes(-alpha, true, 1.0 / std::tgamma(1.0 - alpha), alpha, nodes);
  }

  /// Integral of the interpolant over [0,T].
  double total_integral() const { return kernel_sum(0.0, false, T_, nullptr, 0); }

  /// Left side: int_0^T (T-t)^mu f(t) dt.  Right side: int_0^T t^mu f(t) dt.
  double endpoint_moment(double mu) const { return kernel_sum(mu, false, T_, nullptr, 0); }

 private:
  static void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("fractional order must lie in (0,1)");
  }

  double local_time(double t) const {
    if (!(t >= 0.0 && t <= T_)) throw domain_error("evaluation time outside [0,T]");
    return side_ == Side::left ? t : T_ - t;
  }

  std::vector<std::size_t> all_nodes() const {
    std::vector<std::size_t> idx(x_.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return idx;
  }

  std::vector<double> at_nodes(double mu, bool deriv, double scale, double alpha,
                               std::span<const std::size_t> nodes) const {
    const std::size_t n = x_.size();
    std::vector<double> table;
    if (uniform_) table = kernel_table(mu);
    std::vector<double> out(nodes.size());
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      if (nodes[q] >= n) throw domain_error("node index outside grid");
      const std::size_t k = side_ == Side::left ? nodes[q] : n - 1 - nodes[q];
      if (k == 0) {
        out[q] = deriv ? (f_[0] == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN()) : 0.0;
        continue;
      }
      double v = kernel_sum(mu, deriv, x_[k], uniform_ ? table.data() : nullptr, k);
      if (deriv) v += f_[0] * std::pow(x_[k], -alpha);
      out[q] = v * scale;
    }
    return out;
  }

  // table[q*G + g] = (q - x_g)^mu for far cells q >= 1 cells to the left of the node.
  std::vector<double> kernel_table(double mu) const {
    const auto& gq = detail::unit_gauss();
    const std::size_t n = x_.size();
    std::vector<double> t(n * detail::kFarGauss);
    for (std::size_t q = 1; q < n; ++q)
      for (int g = 0; g < detail::kFarGauss; ++g) t[q * detail::kFarGauss + g] = std::pow(double(q) - gq.x[g], mu);
    return t;
  }

  std::size_t stencil_start(std::size_t cell) const {
    const std::ptrdiff_t n = std::ptrdiff_t(x_.size());
    std::ptrdiff_t st = std::ptrdiff_t(cell) - (degree_ - 1) / 2;
    st = std::clamp<std::ptrdiff_t>(st, 0, n - 1 - degree_);
    return std::size_t(st);
  }

  void build_uniform_basis() {
    const auto& gq = detail::unit_gauss();
    const int d = degree_;
    basis_.assign(std::size_t(d + 1) * detail::kFarGauss * (d + 1), 0.0);
    dbasis_.assign(basis_.size(), 0.0);
    for (int o = 0; o <= d; ++o) {
      for (int g = 0; g < detail::kFarGauss; ++g) {
        const double xi = gq.x[g];
        for (int i = 0; i <= d; ++i) {
          const double xi_i = double(i - o);
          double l = 1.0, dl = 0.0;
          for (int m = 0; m <= d; ++m) {
            if (m == i) continue;
            const double xi_m = double(m - o);
            dl = dl * (xi - xi_m) / (xi_i - xi_m) + l / (xi_i - xi_m);
            l *= (xi - xi_m) / (xi_i - xi_m);
          }
          const std::size_t idx = (std::size_t(o) * detail::kFarGauss + g) * (d + 1) + i;
          basis_[idx] = l;
          dbasis_[idx] = dl;
        }
      }
    }
  }

  // integral over [0,t] of (t-s)^mu P(s) ds, or of (t-s)^mu P'(s) ds when deriv.
  double kernel_sum(double mu, bool deriv, double t, const double* table, std::size_t node) const {
    const auto& gq = detail::unit_gauss();
    const int d = degree_;
    const std::size_t jend = std::size_t(std::lower_bound(x_.begin(), x_.end(), t) - x_.begin());
    std::array<double, 16> eta{}, a{}, c{};
    double sum = 0.0;
    const double hmu = uniform_ ? std::pow(h_, mu) : 0.0;
    for (std::size_t j = 0; j < jend; ++j) {
      const double lo = x_[j];
      const double hi_full = x_[j + 1];
      const double hc = hi_full - lo;
      const double hi = std::min(hi_full, t);
      const std::size_t st = stencil_start(j);
      const double* fs = f_.data() + st;
      if (t - hi < 2.0 * hc) {
        // exact moments in eta = (t - s)/hc
        for (int i = 0; i <= d; ++i) {
          eta[i] = (t - x_[st + i]) / hc;
          a[i] = fs[i];
        }
        for (int k = 1; k <= d; ++k)
          for (int i = d; i >= k; --i) a[i] = (a[i] - a[i - 1]) / (eta[i] - eta[i - k]);
        std::fill(c.begin(), c.end(), 0.0);
        c[0] = a[d];
        for (int k = d - 1; k >= 0; --k) {
          for (int i = d - k; i >= 1; --i) c[i] = c[i - 1] - eta[k] * c[i];
          c[0] = a[k] - eta[k] * c[0];
        }
        const double e_lo = (t - hi) / hc, e_hi = (t - lo) / hc;
        double part = 0.0;
        if (!deriv) {
          for (int k = 0; k <= d; ++k) {
            const double ex = k + 1 + mu;
            part += c[k] * (std::pow(e_hi, ex) - std::pow(e_lo, ex)) / ex;
          }
          sum += std::pow(hc, 1.0 + mu) * part;
        } else {
          for (int k = 1; k <= d; ++k) {
            const double ex = k + mu;
            part += k * c[k] * (std::pow(e_hi, ex) - std::pow(e_lo, ex)) / ex;
          }
          sum -= std::pow(hc, mu) * part;
        }
        continue;
      }
      double part = 0.0;
      if (uniform_) {
        const std::size_t o = j - st;
        const double* B = (deriv ? dbasis_.data() : basis_.data()) + o * detail::kFarGauss * (d + 1);
        const double* K = table ? table + (node - j) * detail::kFarGauss : nullptr;
        for (int g = 0; g < detail::kFarGauss; ++g) {
          double pv = 0.0;
          for (int i = 0; i <= d; ++i) pv += B[g * (d + 1) + i] * fs[i];
          const double ker = K ? K[g] * hmu : std::pow(t - (lo + hc * gq.x[g]), mu);
          part += gq.w[g] * ker * pv;
        }
        sum += part * (deriv ? 1.0 : hc);
      } else {
        for (int g = 0; g < detail::kFarGauss; ++g) {
          const double s = lo + hc * gq.x[g];
          double pv = 0.0;
          for (int i = 0; i <= d; ++i) {
            double l = 1.0, dl = 0.0;
            const double xi_i = x_[st + i];
            for (int m = 0; m <= d; ++m) {
              if (m == i) continue;
              const double xi_m = x_[st + m];
              dl = dl * (s - xi_m) / (xi_i - xi_m) + l / (xi_i - xi_m);
              l *= (s - xi_m) / (xi_i - xi_m);
            }
            pv += (deriv ? dl : l) * fs[i];
          }
          part += gq.w[g] * std::pow(t - s, mu) * pv;
        }
        sum += part * hc;
      }
    }
    return sum;
  }

  Side side_;
  double T_;
  bool uniform_;
  double h_;
  int degree_ = 1;
  std::vector<double> x_, f_;
  std::vector<double> basis_, dbasis_;
};

/// Left-sided Riemann-Liouville integral I^alpha_{0|t} f at time t.
inline double rl_integral_left(const TimeGrid& grid, std::span<const double> f, double alpha, double t,
                               ProductRule rule = {}) {
  if (!(t > 0.0)) throw domain_error("rl_integral_left: t must be positive");
  return ProductIntegrator(grid, f, Side::left, rule).integral(alpha, t);
}

/// Right-sided Riemann-Liouville integral I^alpha_{t|T} f at time t.
inline double rl_integral_right(const TimeGrid& grid, std::span<const double> f, double alpha, double t,
                                ProductRule rule = {}) {
  if (!(t < grid.horizon())) throw domain_error("rl_integral_right: t must be below T");
  return ProductIntegrator(grid, f, Side::right, rule).integral(alpha, t);
}

/// Left-sided Riemann-Liouville derivative D^alpha_{0|t} f at time t.
inline double rl_derivative_left(const TimeGrid& grid, std::span<const double> f, double alpha, double t,
                                 ProductRule rule = {}) {
  if (!(t > 0.0)) throw domain_error("rl_derivative_left: t must be positive");
  return ProductIntegrator(grid, f, Side::left, rule).derivative(alpha, t);
}

/// Right-sided Riemann-Liouville derivative D^alpha_{t|T} f at time t. f is
/// assumed absolutely continuous on [0,T].
inline double rl_derivative_right(const TimeGrid& grid, std::span<const double> f, double alpha, double t,
                                  ProductRule rule = {}) {
  if (!(t < grid.horizon())) throw domain_error("rl_derivative_right: t must be below T");
  return ProductIntegrator(grid, f, Side::right, rule).derivative(alpha, t);
}

/// (-1)^m d^m/dt^m w sampled on the grid, the density whose D^alpha is D^{m+alpha} w.
inline std::vector<double> weight_signed_derivative_samples(const TimeGrid& grid, const WeightProfile& prof, int m) {
  double c = 1.0;
  for (int i = 0; i < m; ++i) c *= (prof.beta - i) / prof.T;
  return grid.sample([&](double t) { return c * std::pow(std::max(0.0, 1.0 - t / prof.T), prof.beta - m); });
}

struct Lemma2Value {
  double numeric_value;
  double closed_form_value;
};

/// Closed form of  int_0^T w^{-1/(p-1)} |D^{m+alpha} w|^{p'} dt.
inline double lemma2_closed_form(const FracOrder& ord, double p, const WeightProfile& prof) {
  const double pp = p / (p - 1.0);
  const double k = ord.total();
  const double e = prof.beta - k * pp;
  if (!(e > -1.0)) throw invalid_profile_error("lemma2: beta - (m+alpha)p' must exceed -1");
  return std::pow(weight_gamma_ratio(prof.beta, k), pp) * std::pow(prof.T, 1.0 - k * pp) / (e + 1.0);
}

inline Lemma2Value lemma2_integral(const FracOrder& ord, double p, const WeightProfile& prof) {
  if (!(p > 1.0)) throw domain_error("lemma2_integral: p must exceed 1");
  const double pp = p / (p - 1.0);
  const double k = ord.total();
  if (!(prof.beta > k)) throw invalid_profile_error("lemma2_integral: beta must exceed m+alpha");
  const double closed = lemma2_closed_form(ord, p, prof);
  // integrand in the variable u = 1 - t/T, assembled from log w and log|D w| so
  // that neither factor under/overflows near t = T.
  const double log_c = std::log(weight_gamma_ratio(prof.beta, k)) - k * std::log(prof.T);
  auto integrand = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double lu = std::log(u);
    const double log_w = prof.beta * lu;
    const double log_d = log_c + (prof.beta - k) * lu;
    return std::exp(-log_w / (p - 1.0) + pp * log_d);
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  const double numeric = prof.T * ts.integrate(integrand, 0.0, 1.0);
  return {numeric, closed};
}

/// |int f D^alpha_{0|t} g dt - int g D^alpha_{t|T} f dt| on [0,T].
///
/// Endpoint singular parts g(0) t^{-alpha} and f(T)(T-t)^{-alpha} are split off
/// and integrated against the other factor by product integration; the regular
/// remainders are integrated with the interpolant.
inline double ibp_residual(const TimeGrid& grid, std::span<const double> f, std::span<const double> g, double alpha,
                           ProductRule rule = {}) {
  if (f.size() != grid.size() || g.size() != grid.size()) throw input_error("ibp_residual: sample count mismatch");
  if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("ibp_residual: alpha must lie in (0,1)");
  detail::check_finite(f, "ibp_residual");
  detail::check_finite(g, "ibp_residual");
  const std::size_t n = grid.size();
  const double g0 = g[0];
  const double fT = f[n - 1];
  std::vector<double> g_reg(g.begin(), g.end()), f_reg(f.begin(), f.end());
  for (auto& v : g_reg) v -= g0;
  for (auto& v : f_reg) v -= fT;

  // D^alpha_{0|t}(g - g(0)) = t^{1-alpha} * smooth and D^alpha_{t|T}(f - f(T)) =
  // (T-t)^{1-alpha} * smooth; the power is factored out and integrated exactly.
  const auto dg = ProductIntegrator(grid, g_reg, Side::left, rule).derivative_at_nodes(alpha);
  const auto df = ProductIntegrator(grid, f_reg, Side::right, rule).derivative_at_nodes(alpha);
  const double T = grid.horizon();
  const double mu = 1.0 - alpha;
  std::vector<double> lhs_smooth(n), rhs_smooth(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    lhs_smooth[i] = f[i] * dg[i] / std::pow(grid[i], mu);
    rhs_smooth[i] = g[i] * df[i] / std::pow(T - grid[i], mu);
  }
  lhs_smooth[n - 1] = f[n - 1] * dg[n - 1] / std::pow(T, mu);
  rhs_smooth[0] = g[0] * df[0] / std::pow(T, mu);
  const int d = std::min<int>(rule.degree, int(n) - 3);
  lhs_smooth[0] = detail::extrapolate_to(grid.nodes().subspan(1, d + 1), std::span<const double>(lhs_smooth).subspan(1, d + 1), grid[0]);
  rhs_smooth[n - 1] = detail::extrapolate_to(grid.nodes().subspan(n - 2 - d, d + 1),
                                             std::span<const double>(rhs_smooth).subspan(n - 2 - d, d + 1), T);
  double lhs = ProductIntegrator(grid, lhs_smooth, Side::right, rule).endpoint_moment(mu);
  double rhs = ProductIntegrator(grid, rhs_smooth, Side::left, rule).endpoint_moment(mu);
  const double inv_g = 1.0 / std::tgamma(1.0 - alpha);
  // g(0) int_0^T t^{-alpha} f dt and f(T) int_0^T (T-t)^{-alpha} g dt
  if (g0 != 0.0) lhs += g0 * inv_g * ProductIntegrator(grid, f, Side::right, rule).endpoint_moment(-alpha);
  if (fT != 0.0) rhs += fT * inv_g * ProductIntegrator(grid, g, Side::left, rule).endpoint_moment(-alpha);
  return std::abs(lhs - rhs);
}

}  // namespace fraclab
