#include <gtest/gtest.h>

#include <boost/math/special_functions/hypergeometric_1F1.hpp>
#include <cmath>
#include <random>

#include "fraclab/frac_laplacian.hpp"

using namespace fraclab;

namespace {

// (-Delta)^s exp(-|x|^2) in closed form
double gaussian_oracle(int n, double s, double r) {
  return std::pow(4.0, s) * std::tgamma(0.5 * n + s) / std::tgamma(0.5 * n) *
         boost::math::hypergeometric_1F1(0.5 * n + s, 0.5 * n, -r * r);
}

}  // namespace

TEST(TestFunction, BracketValues) {
  EXPECT_DOUBLE_EQ(bracket(1.0), 1.0);
  EXPECT_NEAR(bracket(0.0), std::pow(2.0, 0.25), 1e-15);
  EXPECT_NEAR(bracket(3.0), std::pow(17.0, 0.25), 1e-15);
  EXPECT_THROW(bracket(-1.0), fraclab::domain_error);
}

TEST(TestFunction, PhiValues) {
  const RadialTestFn fn(1, 0.5);
  EXPECT_EQ(phi_radial(0.5, fn), 1.0);
  EXPECT_EQ(phi_radial(1.0, fn), 1.0);
  EXPECT_NEAR(phi_radial(1.0 + 1e-9, fn), 1.0, 1e-15);
  EXPECT_NEAR(phi_radial(2.0, fn), std::pow(2.0, -0.5), 1e-15);
  const std::vector<double> x{0.0, 2.0, 0.0};
  EXPECT_NEAR(phi(x, RadialTestFn(3, 0.25)), std::pow(2.0, -0.25 * 3.5), 1e-15);
}

TEST(TestFunction, DerivativesVanishInside) {
  const RadialTestFn fn(2, 0.5);
  for (double r : {0.5, 1.0}) {
    const auto d = phi_radial_derivs(r, fn);
    EXPECT_EQ(d[0], 0.0);
    EXPECT_EQ(d[1], 0.0);
  }
}

TEST(TestFunction, LaplacianAgainstFiniteDifferences) {
  // Richardson-extrapolated central differences of phi
  for (int n = 1; n <= 3; ++n) {
    const RadialTestFn fn(n, 0.5);
    for (double r : {1.3, 2.0, 4.5}) {
      auto fd = [&](double h) {
        const double f0 = phi_radial(r, fn), fp = phi_radial(r + h, fn), fm = phi_radial(r - h, fn);
        return (fp - 2.0 * f0 + fm) / (h * h) + double(n - 1) / r * (fp - fm) / (2.0 * h);
      };
      const double h = 1e-3;
      const double richardson = (4.0 * fd(h / 2.0) - fd(h)) / 3.0;
      EXPECT_NEAR(phi_laplacian_radial(r, fn), richardson, 1e-7) << "n=" << n << " r=" << r;
    }
  }
}

TEST(TestFunction, GradHessMatchesRadial) {
  const RadialTestFn fn(3, 0.75);
  const std::vector<double> x{1.0, 1.5, -0.5};
  const auto gh = phi_grad_hess(x, fn);
  const double r = euclidean_norm(x);
  EXPECT_NEAR(gh.laplacian, phi_laplacian_radial(r, fn), 1e-14);
  const auto d = phi_radial_derivs(r, fn);
  EXPECT_NEAR(gh.gradient[1], 1.5 / r * d[0], 1e-14);
}

TEST(SingularIntegral, GaussianClosedForm) {
  for (int n = 1; n <= 3; ++n)
    for (double s : {0.25, 0.5, 0.75})
      for (double r : {0.0, 0.7, 3.0}) {
        const double o = gaussian_oracle(n, s, r);
        EXPECT_NEAR(frac_lap_singular_radial(GaussianProfile{1.0}, n, r, s), o, 1e-8 * std::max(1.0, std::abs(o)))
            << "n=" << n << " s=" << s << " r=" << r;
      }
}

TEST(SingularIntegral, GaussianFourierRoute) {
  for (int n = 1; n <= 3; ++n)
    for (double r : {0.0, 1.0, 2.5}) EXPECT_NEAR(gaussian_frac_lap_fourier(n, 0.4, 1.0, r), gaussian_oracle(n, 0.4, r), 1e-8);
}

TEST(SingularIntegral, RejectsClassicalOrder) {
  EXPECT_THROW(frac_lap_singular_radial(GaussianProfile{1.0}, 1, 0.5, 1.0), fraclab::domain_error);
  const RadialTestFn fn(2, 0.5);
  const std::vector<double> x{1.0};
  EXPECT_THROW(frac_lap_singular(fn, x), fraclab::domain_error);
}

TEST(SingularIntegral, PhiDecaysAlgebraically) {
  const RadialTestFn fn(1, 0.5);
  const double a = frac_lap_singular_radial(PhiProfile{fn, 1.0}, 1, 100.0, 0.5);
  const double b = frac_lap_singular_radial(PhiProfile{fn, 1.0}, 1, 200.0, 0.5);
  EXPECT_NEAR(std::log2(std::abs(a / b)), fn.decay(), 0.1);
}

TEST(Spectral, CosineEigenfunction) {
  PeriodicField f(2, std::numbers::pi, 32);
  f.fill([](const std::array<double, 3>& x) { return std::cos(2.0 * x[0] + 3.0 * x[1]); });
  const double s = 0.35;
  const PeriodicField g = frac_lap_spectral(f, s);
  const double lam = std::pow(std::sqrt(13.0), 2.0 * s);
  for (std::size_t i = 0; i < f.size(); i += 7) EXPECT_NEAR(g[i], lam * f[i], 1e-12);
}

TEST(Spectral, ConstantIsAnnihilated) {
  PeriodicField f(3, 2.0, 8);
  f.fill([](const std::array<double, 3>&) { return 4.0; });
  EXPECT_LT(frac_lap_spectral(f, 0.5).sup_norm(), 1e-13);
}

TEST(Spectral, PositiveSemidefinite) {
  std::mt19937 rng(7);
  std::normal_distribution<double> nd;
  PeriodicField f(1, 5.0, 128);
  for (auto& v : f.values()) v = nd(rng);
  const PeriodicField g = frac_lap_spectral(f, 0.6);
  double q = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) q += f[i] * g[i];
  EXPECT_GE(q, 0.0);
}

TEST(Spectral, PhiOnLargeBoxMatchesSingular) {
  const RadialTestFn fn(1, 0.5);
  PeriodicField f(1, 512.0, 1 << 16);
  f.fill_radial([&](double r) { return phi_radial(r, fn); });
  const PeriodicField g = frac_lap_spectral(f, 0.5);
  const std::size_t mid = f.points() / 2;  // x = 0
  const double ref = frac_lap_singular_radial(PhiProfile{fn, 1.0}, 1, 0.0, 0.5);
  EXPECT_NEAR(g[mid] / ref, 1.0, 0.01);
}

TEST(Scaling, IdentityAtUnitScale) {
  const auto p = scaling_check(PhiProfile{RadialTestFn(2, 0.5), 1.0}, 2, 0.5, 1.0, 0.3);
  EXPECT_EQ(p.lhs, p.rhs);
}

TEST(Scaling, PhiAtOrigin) {
  const auto p = scaling_check(PhiProfile{RadialTestFn(2, 0.5), 1.0}, 2, 0.5, 8.0, 0.0);
  EXPECT_NEAR(p.lhs / p.rhs, 1.0, 1e-6);
}

TEST(Scaling, GaussianFourierBothSides) {
  for (double R : {2.0, 4.0, 8.0})
    for (double r : {0.0, 1.5 * R}) {
      const double lhs = gaussian_frac_lap_fourier(2, 0.5, R, r);
      const double rhs = std::pow(R, -1.0) * gaussian_frac_lap_fourier(2, 0.5, 1.0, r / R);
      EXPECT_NEAR(lhs / rhs, 1.0, 1e-6) << "R=" << R << " r=" << r;
    }
}

TEST(Scaling, SpectralOperatorOnScaledBox) {
  // a box scaled with R carries exactly the rescaled spectrum
  const double R = 4.0, s = 0.3;
  PeriodicField a(1, 16.0 * R, 512), b(1, 16.0, 512);
  a.fill_radial([&](double r) { return std::exp(-(r * r) / (R * R)); });
  b.fill_radial([&](double r) { return std::exp(-r * r); });
  const PeriodicField la = frac_lap_spectral(a, s), lb = frac_lap_spectral(b, s);
  for (std::size_t i = 0; i < a.size(); i += 17) EXPECT_NEAR(la[i], std::pow(R, -2.0 * s) * lb[i], 1e-12);
}

TEST(WeightedIntegral, DoublingRatio) {
  const RadialTestFn fn(1, 1.0);
  const double p = 2.0;
  const double ratio = lemma6_integral(fn, p, 16.0) / lemma6_integral(fn, p, 8.0);
  EXPECT_NEAR(ratio / std::pow(2.0, -2.0 * fn.s * p / (p - 1.0) + fn.n), 1.0, 0.02);
}

TEST(WeightedIntegral, NearClassicalOrderSlope) {
  const RadialTestFn fn(1, 0.95);
  const double p = 3.0;
  const double slope = std::log2(lemma6_integral(fn, p, 16.0) / lemma6_integral(fn, p, 8.0));
  const double classical = std::log2(lemma6_integral(RadialTestFn(1, 1.0), p, 16.0) / lemma6_integral(RadialTestFn(1, 1.0), p, 8.0));
  EXPECT_NEAR(slope, -2.0 * 0.95 * p / (p - 1.0) + 1.0, 0.02);
  EXPECT_NEAR(classical, -2.0 * p / (p - 1.0) + 1.0, 0.02);
}

TEST(WeightedIntegral, RejectsBadOrder) {
  EXPECT_THROW(lemma6_integral(RadialTestFn(1, 0.5), 2.0, 4.0, 1.5), fraclab::domain_error);
  EXPECT_THROW(lemma6_integral(RadialTestFn(1, 0.5), 1.0, 4.0), fraclab::domain_error);
}
