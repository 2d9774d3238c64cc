#pragma once

// Radial test function phi, its classical derivatives, and two realizations of
// the fractional Laplacian (-Delta)^s: the second-difference singular integral
// for radial profiles on R^n, and the Fourier multiplier |xi|^{2s} on a periodic box.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include "fraclab/errors.hpp"
#include "fraclab/periodic_field.hpp"

namespace fraclab {

/// phi(x) = 1 for |x| <= 1 and <x>^{-n-2s} outside, <x> = (1+(|x|-1)^4)^{1/4}.
struct RadialTestFn {
  int n;
  double s;

  RadialTestFn(int dim, double order) : n(dim), s(order) {
    if (dim < 1) throw domain_error("RadialTestFn: dimension must be >= 1");
    if (!(order > 0.0 && order <= 1.0)) throw domain_error("RadialTestFn: s must lie in (0,1]");
  }
  double decay() const { return n + 2.0 * s; }
};

inline double bracket(double r) {
  if (!(r >= 0.0)) throw domain_error("bracket: radius must be nonnegative");
  const double d = r - 1.0;
  return std::pow(1.0 + d * d * d * d, 0.25);
}

inline double phi_radial(double r, const RadialTestFn& fn) {
  if (r <= 1.0) return 1.0;
  const double d = r - 1.0;
  return std::pow(1.0 + d * d * d * d, -0.25 * fn.decay());
}

inline double euclidean_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline double phi(std::span<const double> x, const RadialTestFn& fn) { return phi_radial(euclidean_norm(x), fn); }

/// phi'(r) and phi''(r) of the radial profile.
inline std::array<double, 2> phi_radial_derivs(double r, const RadialTestFn& fn) {
  if (r <= 1.0) return {0.0, 0.0};
  const double k = fn.decay();
  const double d = r - 1.0;
  const double b4 = 1.0 + d * d * d * d;
  const double p4 = std::pow(b4, -0.25 * (k + 4.0));
  const double p8 = std::pow(b4, -0.25 * (k + 8.0));
  const double d1 = -k * d * d * d * p4;
  const double d2 = -3.0 * k * d * d * p4 + k * (k + 4.0) * std::pow(d, 6) * p8;
  return {d1, d2};
}

/// Delta phi at radius r in dimension fn.n.
inline double phi_laplacian_radial(double r, const RadialTestFn& fn) {
  if (r <= 1.0) return 0.0;
  const auto [d1, d2] = phi_radial_derivs(r, fn);
  return d2 + double(fn.n - 1) / r * d1;
}

struct GradLaplacian {
  std::vector<double> gradient;
  double laplacian;
};

inline GradLaplacian phi_grad_hess(std::span<const double> x, const RadialTestFn& fn) {
  const double r = euclidean_norm(x);
  GradLaplacian out{std::vector<double>(x.size(), 0.0), 0.0};
  if (r <= 1.0) return out;
  const auto [d1, d2] = phi_radial_derivs(r, fn);
  for (std::size_t i = 0; i < x.size(); ++i) out.gradient[i] = x[i] / r * d1;
  out.laplacian = d2 + double(fn.n - 1) / r * d1;
  return out;
}

/// C_{n,s} = 4^s Gamma(n/2+s) / (pi^{n/2} |Gamma(-s)|).
inline double frac_lap_constant(int n, double s) {
  const double abs_gamma_neg = std::tgamma(1.0 - s) / s;
  return std::pow(4.0, s) * std::tgamma(0.5 * n + s) / (std::pow(std::numbers::pi, 0.5 * n) * abs_gamma_neg);
}

/// Surface area of S^{n-1}.
inline double sphere_area(int n) { return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n); }

// ---------------------------------------------------------------------------
// Radial profiles accepted by the singular-integral evaluator.

template <class P>
concept RadialProfile = requires(const P& p, double r, int n) {
  { p.value(r) } -> std::convertible_to<double>;
  { p.laplacian(r, n) } -> std::convertible_to<double>;
  { p.kinks() } -> std::convertible_to<std::vector<double>>;
  { p.length_scale() } -> std::convertible_to<double>;
  { p.tail_exponent() } -> std::convertible_to<double>;
  { p.tail_coefficient() } -> std::convertible_to<double>;
  { p.rescaled(r) } -> std::same_as<P>;
};

/// phi(x/R).
struct PhiProfile {
  RadialTestFn fn;
  double R = 1.0;

  double value(double r) const { return phi_radial(r / R, fn); }
  double laplacian(double r, int n) const {
    if (r <= R) return 0.0;
    const auto [d1, d2] = phi_radial_derivs(r / R, fn);
    return (d2 + double(n - 1) / (r / R) * d1) / (R * R);
  }
  std::vector<double> kinks() const { return {R}; }
  double length_scale() const { return R; }
  // phi(r/R) ~ (r/R)^{-n-2s}; the leading algebraic tail beyond R_far
  double tail_exponent() const { return fn.decay(); }
  double tail_coefficient() const { return std::pow(R, fn.decay()); }
  PhiProfile rescaled(double k) const { return {fn, R * k}; }
};

/// exp(-|x|^2 / R^2).
struct GaussianProfile {
  double R = 1.0;

  double value(double r) const { return std::exp(-(r * r) / (R * R)); }
  double laplacian(double r, int n) const {
    const double R2 = R * R;
    return (4.0 * r * r / (R2 * R2) - 2.0 * n / R2) * value(r);
  }
  std::vector<double> kinks() const { return {}; }
  double length_scale() const { return R; }
  double tail_exponent() const { return 0.0; }
  double tail_coefficient() const { return 0.0; }
  GaussianProfile rescaled(double k) const { return {R * k}; }
};

/// Resolution of the singular-integral quadrature. Distances are relative to the
/// profile's length scale (or |x| when larger).
struct SingularQuadrature {
  int radial_order = 12;   // Gauss points per radial panel
  int angular_order = 12;  // Gauss points per angular sub-interval (n >= 2)
  double inner = 1e-4;     // Taylor region |y| < inner * scale
  double far = 1e4;        // algebraic tail beyond far * max(scale, |x|)

  SingularQuadrature refined() const { return {radial_order + 8, angular_order + 8, inner * 0.5, far * 2.0}; }
};

namespace detail {

struct GaussRule {
  std::vector<double> x;  // on [0,1]
  std::vector<double> w;
};

inline GaussRule gauss_rule(int order) {
  GaussRule r;
  const auto zeros = boost::math::legendre_p_zeros<double>(order);
  for (double z : zeros) {
    const double dp = boost::math::legendre_p_prime<double>(order, z);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    if (z == 0.0) {
      r.x.push_back(0.5);
      r.w.push_back(0.5 * w);
      continue;
    }
    r.x.push_back(0.5 * (1.0 - z));
    r.w.push_back(0.5 * w);
    r.x.push_back(0.5 * (1.0 + z));
    r.w.push_back(0.5 * w);
  }
  return r;
}

// Panels of [a,b] graded geometrically toward each end, down to widths wa and wb.
inline void graded_panels(double a, double b, double wa, double wb, std::vector<double>& cuts) {
  const double L = b - a;
  if (!(L > 0.0)) return;
  auto depth = [L](double w) {
    int K = 1;
    while (K < 48 && L * std::ldexp(1.0, -(K + 1)) > w) ++K;
    return K;
  };
  const int Ka = depth(wa), Kb = depth(wb);
  cuts.push_back(a);
  for (int k = Ka; k >= 2; --k) cuts.push_back(a + L * std::ldexp(1.0, -k));
  cuts.push_back(a + 0.5 * L);
  for (int k = 2; k <= Kb; ++k) cuts.push_back(b - L * std::ldexp(1.0, -k));
  cuts.push_back(b);
}

}  // namespace detail

/// Angular integral of the second difference phi(x+y)+phi(x-y)-2phi(x) over |y| = rho, |x| = r.
template <RadialProfile P>
double sphere_second_difference(const P& prof, int n, double r, double rho, const detail::GaussRule& ang,
                                const std::vector<double>& kinks) {
  const double Fr = prof.value(r);
  if (n == 1) return 2.0 * (prof.value(r + rho) + prof.value(std::abs(r - rho)) - 2.0 * Fr);
  // variable c = cos(theta) in [0,1]; n=2 integrates d theta, n=3 dc
  auto second_diff = [&](double c) {
    const double base = r * r + rho * rho;
    const double qp = std::sqrt(base + 2.0 * r * rho * c);
    const double qm = std::sqrt(std::max(0.0, base - 2.0 * r * rho * c));
    return prof.value(qp) + prof.value(qm) - 2.0 * Fr;
  };
  std::vector<double> cuts{0.0, 1.0};
  if (r > 0.0 && rho > 0.0) {
    for (double k : kinks) {
      const double c1 = (k * k - r * r - rho * rho) / (2.0 * r * rho);
      const double c2 = -c1;
      if (c1 > 0.0 && c1 < 1.0) cuts.push_back(c1);
      if (c2 > 0.0 && c2 < 1.0) cuts.push_back(c2);
    }
  }
  double sum = 0.0;
  if (n == 2) {
    // in theta; cut points map through acos
    std::vector<double> th;
    for (double c : cuts) th.push_back(std::acos(std::clamp(c, 0.0, 1.0)));
    std::sort(th.begin(), th.end());
    for (std::size_t i = 0; i + 1 < th.size(); ++i) {
      const double a = th[i], b = th[i + 1];
      if (!(b > a)) continue;
      for (std::size_t g = 0; g < ang.x.size(); ++g) sum += ang.w[g] * (b - a) * second_diff(std::cos(a + (b - a) * ang.x[g]));
    }
    return 4.0 * sum;
  }
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (!(b > a)) continue;
    for (std::size_t g = 0; g < ang.x.size(); ++g) sum += ang.w[g] * (b - a) * second_diff(a + (b - a) * ang.x[g]);
  }
  // n >= 3 reduced with the radial formula: |S^{n-2}| * int (1-c^2)^{(n-3)/2} ...
  if (n == 3) return 4.0 * std::numbers::pi * sum;
  throw domain_error("sphere_second_difference: n > 3 handled by caller");
}

/// (-Delta)^s of a radial profile at radius r in R^n, 0 < s < 1, via
///   -(C_{n,s}/2) int (F(x+y)+F(x-y)-2F(x)) / |y|^{n+2s} dy.
template <RadialProfile P>
double frac_lap_singular_radial(const P& prof, int n, double r, double s, const SingularQuadrature& quad = {}) {
  if (s == 1.0) throw domain_error("frac_lap_singular: s = 1 is the classical Laplacian; use phi_grad_hess");
  if (!(s > 0.0 && s < 1.0)) throw domain_error("frac_lap_singular: s must lie in (0,1)");
  if (n < 1 || n > 3) throw domain_error("frac_lap_singular: dimension must be 1, 2 or 3");
  if (!(r >= 0.0)) throw domain_error("frac_lap_singular: radius must be nonnegative");

  const double ell = prof.length_scale();
  const double rho_in = quad.inner * ell;
  const double rho_far = quad.far * std::max(ell, r);
  // kinks plus a ladder of radii around the profile's bulk; cutting the radial and
  // angular ranges where |x +- y| crosses them resolves the bulk seen from far away
  auto kinks = prof.kinks();
  for (int j = -3; j <= 5; ++j) kinks.push_back(ell * std::ldexp(1.0, j));
  const auto radial = detail::gauss_rule(quad.radial_order);
  const auto ang = detail::gauss_rule(quad.angular_order);
  const double area = sphere_area(n);

  std::vector<double> bps{rho_in, rho_far};
  for (double k : kinks) {
    bps.push_back(std::abs(r - k));
    bps.push_back(r + k);
  }
  bps.push_back(r);
  std::sort(bps.begin(), bps.end());
  std::vector<double> pts;
  for (double b : bps)
    if (b >= rho_in && b <= rho_far && (pts.empty() || b - pts.back() > 1e-12 * std::max(1.0, b))) pts.push_back(b);

  double integral = 0.0;
  std::vector<double> cuts;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    cuts.clear();
    const double len = pts[i + 1] - pts[i];
    detail::graded_panels(pts[i], pts[i + 1], i == 0 ? 0.5 * rho_in : std::min(1e-3 * len, 1e-2 * ell),
                          std::min(1e-3 * len, 1e-2 * ell), cuts);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double a = cuts[c], b = cuts[c + 1];
      if (!(b > a)) continue;
      double part = 0.0;
      for (std::size_t g = 0; g < radial.x.size(); ++g) {
        const double rho = a + (b - a) * radial.x[g];
        part += radial.w[g] * std::pow(rho, -1.0 - 2.0 * s) * sphere_second_difference(prof, n, r, rho, ang, kinks);
      }
      integral += part * (b - a);
    }
  }
  // |y| < rho_in: second difference ~ |y|^2 omega.H.omega, sphere average tr(H)/n
  integral += area * prof.laplacian(r, n) / n * std::pow(rho_in, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
  // |y| > rho_far: -2F(x) exactly, F(x +- y) by its algebraic tail
  integral += -2.0 * prof.value(r) * area * std::pow(rho_far, -2.0 * s) / (2.0 * s);
  const double e = prof.tail_exponent();
  if (e > 0.0) integral += 2.0 * area * prof.tail_coefficient() * std::pow(rho_far, -2.0 * s - e) / (2.0 * s + e);
  return -0.5 * frac_lap_constant(n, s) * integral;
}

/// (-Delta)^s phi at the point x (dimension x.size() must equal fn.n).
inline double frac_lap_singular(const RadialTestFn& fn, std::span<const double> x, const SingularQuadrature& quad = {}) {
  if (int(x.size()) != fn.n) throw domain_error("frac_lap_singular: point dimension does not match n");
  return frac_lap_singular_radial(PhiProfile{fn, 1.0}, fn.n, euclidean_norm(x), fn.s, quad);
}

/// (-Delta)^s on a periodic field: multiply every mode by |xi|^{2s}.
inline PeriodicField frac_lap_spectral(const PeriodicField& field, double s) {
  if (!(s > 0.0 && s <= 1.0)) throw domain_error("frac_lap_spectral: s must lie in (0,1]");
  PeriodicField out(field.dim(), field.half_length(), field.points());
  SpectralPlan plan(field);
  plan.apply(field.values(), out.values(), [s](double k) { return k == 0.0 ? 0.0 : std::pow(k, 2.0 * s); });
  return out;
}

/// (-Delta)^s exp(-|x|^2/R^2) at radius r by numerical inverse Fourier transform
/// of |xi|^{2s} times the Gaussian's transform (radial Hankel form), s in (0,1].
inline double gaussian_frac_lap_fourier(int n, double s, double R, double r) {
  if (n < 1 || n > 3) throw domain_error("gaussian_frac_lap_fourier: n must be 1, 2 or 3");
  const double pi = std::numbers::pi;
  const double ghat0 = std::pow(pi, 0.5 * n) * std::pow(R, n);
  const double xi_max = 14.0 / R;
  auto integrand = [&](double xi) {
    const double base = std::pow(xi, 2.0 * s) * ghat0 * std::exp(-0.25 * R * R * xi * xi);
    if (n == 1) return base * std::cos(xi * r) / pi;
    if (n == 2) return base * std::cyl_bessel_j(0.0, xi * r) * xi / (2.0 * pi);
    if (r == 0.0) return base * xi * xi / (2.0 * pi * pi);
    return base * xi * std::sin(xi * r) / (2.0 * pi * pi * r);
  };
  // panels no wider than a quarter oscillation; first panel carries xi^{2s}
  const double width = std::min(xi_max, r > 0.0 ? 0.25 * 2.0 * pi / r : xi_max) / 4.0;
  boost::math::quadrature::tanh_sinh<double> ts;
  double sum = ts.integrate(integrand, 0.0, width);
  for (double a = width; a < xi_max; a += width) {
    const double b = std::min(a + width, xi_max);
    sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, a, b, 0, 0.0);
  }
  return sum;
}

struct ScalingPair {
  double lhs;
  double rhs;
};

/// (-Delta)^s[prof(./R)](r) versus R^{-2s} ((-Delta)^s prof)(r/R), each side at its own resolution.
template <RadialProfile P>
ScalingPair scaling_check(const P& prof, int n, double s, double R, double r, const SingularQuadrature& lhs_quad = {},
                          const SingularQuadrature& rhs_quad = SingularQuadrature{}.refined()) {
  if (!(R > 0.0)) throw domain_error("scaling_check: R must be positive");
  if (R == 1.0) {
    const double v = frac_lap_singular_radial(prof, n, r, s, lhs_quad);
    return {v, v};
  }
  const double lhs = frac_lap_singular_radial(prof.rescaled(R), n, r, s, lhs_quad);
  const double rhs = std::pow(R, -2.0 * s) * frac_lap_singular_radial(prof, n, r / R, s, rhs_quad);
  return {lhs, rhs};
}

/// (-Delta)^{op_order} phi_R at radius r; op_order = 1 is the classical -Delta.
inline double frac_lap_phi_scaled(const RadialTestFn& fn, double op_order, double R, double r,
                                  const SingularQuadrature& quad = {}) {
  if (op_order == 1.0) return -PhiProfile{fn, R}.laplacian(r, fn.n);
  return frac_lap_singular_radial(PhiProfile{fn, R}, fn.n, r, op_order, quad);
}

/// int phi_R^{-1/(p-1)} |(-Delta)^{op_order} phi_R|^{p'} dx by radial quadrature.
/// The test function's own order is fn.s; op_order defaults to it.
inline double lemma6_integral(const RadialTestFn& fn, double p, double R, double op_order = -1.0,
                              const SingularQuadrature& quad = {}) {
  if (op_order < 0.0) op_order = fn.s;
  if (!(op_order > 0.0 && op_order <= 1.0)) throw domain_error("lemma6_integral: operator order must lie in (0,1]");
  if (!(p > 1.0)) throw domain_error("lemma6_integral: p must exceed 1");
  if (!(R > 0.0)) throw domain_error("lemma6_integral: R must be positive");
  const double pp = p / (p - 1.0);
  const int n = fn.n;
  const double area = sphere_area(n);
  const auto rule = detail::gauss_rule(10);
  const double r_max = 100.0 * R;

  auto density = [&](double r) {
    const double L = frac_lap_phi_scaled(fn, op_order, R, r, quad);
    const double ph = phi_radial(r / R, fn);
    return area * std::pow(r, n - 1) * std::pow(ph, -1.0 / (p - 1.0)) * std::pow(std::abs(L), pp);
  };

  std::vector<double> cuts{0.0, 0.5 * R, 0.9 * R, R};
  for (double b = 1.3 * R; b < r_max; b *= 1.3) cuts.push_back(b);
  cuts.push_back(r_max);
  double sum = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double a = cuts[c], b = cuts[c + 1];
    double part = 0.0;
    for (std::size_t g = 0; g < rule.x.size(); ++g) part += rule.w[g] * density(a + (b - a) * rule.x[g]);
    sum += part * (b - a);
    if (!std::isfinite(sum)) throw integrability_error("lemma6_integral: non-finite partial sum");
  }
  // tail beyond r_max: density ~ A r^kappa
  const double tau = op_order < 1.0 ? n + 2.0 * op_order : n + 2.0 * fn.s + 2.0;
  const double kappa = n - 1.0 + fn.decay() / (p - 1.0) - tau * pp;
  if (!(kappa < -1.0)) throw integrability_error("lemma6_integral: integrand tail not integrable");
  const double A = density(r_max) / std::pow(r_max, kappa);
  sum += -A * std::pow(r_max, kappa + 1.0) / (kappa + 1.0);
  if (!std::isfinite(sum)) throw integrability_error("lemma6_integral: non-finite result");
  return sum;
}

}  // namespace fraclab
