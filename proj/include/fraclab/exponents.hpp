#pragma once

// Critical exponent p_c(n, gamma, sigma) and the three-way blow-up classifier.
// Two arithmetic routes: doubles with a small guard band at boundaries, and exact
// rationals parsed from decimal or fraction strings.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "fraclab/errors.hpp"

namespace fraclab {

using rational = boost::multiprecision::cpp_rational;

struct ModelParams {
  int n = 1;
  double sigma = 1.0;
  double gamma = 0.5;
  double mu = 1.0;
  double p = 2.0;

  ModelParams() = default;
  ModelParams(int n_, double sigma_, double gamma_, double mu_, double p_) : n(n_), sigma(sigma_), gamma(gamma_), mu(mu_), p(p_) {
    validate();
  }

  void validate() const {
    if (n < 1) throw domain_error("ModelParams: n must be >= 1");
    if (!(sigma > 0.0 && sigma < 2.0)) throw domain_error("ModelParams: sigma must lie in (0,2)");
    if (!(gamma > 0.0 && gamma < 1.0)) throw domain_error("ModelParams: gamma must lie in (0,1)");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw domain_error("ModelParams: mu must be positive");
    if (!(p > 1.0) || !std::isfinite(p)) throw domain_error("ModelParams: p must exceed 1");
  }

  double alpha() const { return 1.0 - gamma; }
  double p_prime() const { return p / (p - 1.0); }
  double sigma_tilde() const { return std::min(sigma, 1.0); }
};

enum class Regime { BlowupAllP, BlowupUpToCritical, BlowupBelowGammaInverse, NotCovered };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::BlowupAllP: return "BlowupAllP";
    case Regime::BlowupUpToCritical: return "BlowupUpToCritical";
    case Regime::BlowupBelowGammaInverse: return "BlowupBelowGammaInverse";
    case Regime::NotCovered: return "NotCovered";
  }
  return "?";
}

struct RegimeVerdict {
  Regime tag = Regime::NotCovered;
  double p_c = 0.0;                    // +inf when the denominator's positive part vanishes
  std::optional<rational> p_c_exact;   // exact route only; empty means +inf
  int bullet = 0;                      // bullet that fired, 0 for none
  int applicable_bullet = 0;           // bullet whose (n, gamma) condition holds, regardless of p
  bool overlap = false;                // more than one bullet's (n, gamma) condition holds
};

// ---------------------------------------------------------------------------
// Floating route.

namespace detail {
constexpr double kGuard = 1e-12;

inline void check_ranges(int n, double gamma, double sigma) {
  if (n < 1) throw domain_error("p_critical: n must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw domain_error("p_critical: gamma must lie in (0,1)");
  if (!(sigma > 0.0 && sigma < 2.0)) throw domain_error("p_critical: sigma must lie in (0,2)");
}
}  // namespace detail

inline double p_critical(int n, double gamma, double sigma) {
  detail::check_ranges(n, gamma, sigma);
  const double st = std::min(sigma, 1.0);
  const double den = n - 2.0 + gamma * (2.0 - st);
  if (den <= detail::kGuard) return std::numeric_limits<double>::infinity();
  return 1.0 + (2.0 + (1.0 - gamma) * (2.0 - st)) / den;
}

/// p_gamma(n) = 1 + (3-gamma)/(n-2+gamma), the sigma = 1 specialisation.
inline double p_gamma(int n, double gamma) {
  const double den = n - 2.0 + gamma;
  if (den <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 + (3.0 - gamma) / den;
}

inline RegimeVerdict classify(const ModelParams& m) {
  m.validate();
  const double g = detail::kGuard;
  const double st = m.sigma_tilde();
  const double a = 2.0 - m.gamma * (2.0 - st);
  const double fl = std::floor(a + g);
  const int n = m.n;

  RegimeVerdict v;
  v.p_c = p_critical(n, m.gamma, m.sigma);
  const bool b1 = n <= fl;
  const bool b2 = (fl < n && n <= 2) || (n > 2 && m.gamma >= (n - 2.0) / n - g);
  const bool b3 = n >= 3 && m.gamma < (n - 2.0) / n - g;
  v.overlap = int(b1) + int(b2) + int(b3) > 1;
  v.applicable_bullet = b1 ? 1 : b2 ? 2 : b3 ? 3 : 0;

  if (b1) {
    v.tag = Regime::BlowupAllP;
    v.bullet = 1;
  } else if (b2 && m.p <= v.p_c * (1.0 + g)) {
    v.tag = Regime::BlowupUpToCritical;
    v.bullet = 2;
  } else if (b3 && m.p < (1.0 / m.gamma) * (1.0 - g)) {
    v.tag = Regime::BlowupBelowGammaInverse;
    v.bullet = 3;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Exact route.

/// Parses "3", "-0.25", "1.5e-2", or "7/3" into an exact rational.
inline rational parse_rational(std::string_view text) {
  auto fail = [&] { return input_error("parse_rational: not a decimal or fraction: '" + std::string(text) + "'"); };
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; }), s.end());
  if (s.empty()) throw fail();
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    const rational num = parse_rational(s.substr(0, slash));
    const rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw fail();
    return num / den;
  }
  std::size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
  boost::multiprecision::cpp_int digits = 0;
  int frac_digits = 0;
  bool any = false, dot = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (c >= '0' && c <= '9') {
      digits = digits * 10 + (c - '0');
      if (dot) ++frac_digits;
      any = true;
    } else if (c == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  if (!any) throw fail();
  long exp10 = -frac_digits;
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') throw fail();
    const std::string e = s.substr(i + 1);
    if (e.empty()) throw fail();
    std::size_t used = 0;
    long ev = 0;
    try {
      ev = std::stol(e, &used);
    } catch (const std::exception&) {
      throw fail();
    }
    if (used != e.size() || ev > 4000 || ev < -4000) throw fail();
    exp10 += ev;
  }
  rational r(digits);
  const boost::multiprecision::cpp_int ten_pow = boost::multiprecision::pow(boost::multiprecision::cpp_int(10), int(std::labs(exp10)));
  if (exp10 >= 0)
    r *= ten_pow;
  else
    r /= ten_pow;
  return neg ? -r : r;
}

inline std::string rational_to_string(const rational& r) { return r.str(); }

struct ExactParams {
  int n = 1;
  rational sigma{1};
  rational gamma{1, 2};
  rational p{2};

  void validate() const {
    if (n < 1) throw domain_error("ExactParams: n must be >= 1");
    if (!(sigma > 0 && sigma < 2)) throw domain_error("ExactParams: sigma must lie in (0,2)");
    if (!(gamma > 0 && gamma < 1)) throw domain_error("ExactParams: gamma must lie in (0,1)");
    if (!(p > 1)) throw domain_error("ExactParams: p must exceed 1");
  }
};

/// Exact p_c; empty optional means +inf.
inline std::optional<rational> p_critical_exact(int n, const rational& gamma, const rational& sigma) {
  if (n < 1) throw domain_error("p_critical: n must be >= 1");
  if (!(gamma > 0 && gamma < 1)) throw domain_error("p_critical: gamma must lie in (0,1)");
  if (!(sigma > 0 && sigma < 2)) throw domain_error("p_critical: sigma must lie in (0,2)");
  const rational st = sigma < 1 ? sigma : rational(1);
  const rational den = rational(n - 2) + gamma * (2 - st);
  if (den <= 0) return std::nullopt;
  return rational(1) + (2 + (1 - gamma) * (2 - st)) / den;
}

inline RegimeVerdict classify_exact(const ExactParams& m) {
  m.validate();
  const rational st = m.sigma < 1 ? m.sigma : rational(1);
  const rational a = 2 - m.gamma * (2 - st);
  // floor of a value in (0,2)
  const int fl = a >= 1 ? 1 : 0;
  const int n = m.n;
  const rational ratio(n - 2, n);

  RegimeVerdict v;
  v.p_c_exact = p_critical_exact(n, m.gamma, m.sigma);
  v.p_c = v.p_c_exact ? v.p_c_exact->convert_to<double>() : std::numeric_limits<double>::infinity();
  const bool b1 = n <= fl;
  const bool b2 = (fl < n && n <= 2) || (n > 2 && m.gamma >= ratio);
  const bool b3 = n >= 3 && m.gamma < ratio;
  v.overlap = int(b1) + int(b2) + int(b3) > 1;
  v.applicable_bullet = b1 ? 1 : b2 ? 2 : b3 ? 3 : 0;

  if (b1) {
    v.tag = Regime::BlowupAllP;
    v.bullet = 1;
  } else if (b2 && (!v.p_c_exact || m.p <= *v.p_c_exact)) {
    v.tag = Regime::BlowupUpToCritical;
    v.bullet = 2;
  } else if (b3 && m.p * m.gamma < 1) {
    v.tag = Regime::BlowupBelowGammaInverse;
    v.bullet = 3;
  }
  return v;
}

}  // namespace fraclab
