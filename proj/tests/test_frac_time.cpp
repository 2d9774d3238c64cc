#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "fraclab/frac_time.hpp"

using namespace fraclab;

TEST(WeightProfile, EndpointValues) {
  const WeightProfile w(3.0, 5.0);
  EXPECT_DOUBLE_EQ(weight_value(0.0, w), 1.0);
  EXPECT_DOUBLE_EQ(weight_value(3.0, w), 0.0);
  EXPECT_DOUBLE_EQ(weight_value(1.0, WeightProfile(2.0, 2.0)), 0.25);
}

TEST(WeightProfile, RejectsBadInput) {
  EXPECT_THROW(WeightProfile(0.0, 2.0), fraclab::domain_error);
  EXPECT_THROW(WeightProfile(1.0, -1.0), invalid_profile_error);
  EXPECT_THROW(weight_value(1.5, WeightProfile(1.0, 2.0)), fraclab::domain_error);
}

TEST(WeightDerivative, ClosedFormValues) {
  const WeightProfile w(2.0, 7.0);
  EXPECT_DOUBLE_EQ(weight_frac_derivative(2.0, w, FracOrder(0.4, 1)), 0.0);
  EXPECT_NEAR(weight_frac_derivative(0.0, w, FracOrder(0.4, 0)), std::tgamma(8.0) / std::tgamma(7.6) * std::pow(2.0, -0.4),
              1e-12);
  // Gamma(5)/Gamma(3.5) from the Lanczos-free boost evaluation
  const double oracle = boost::math::tgamma(5.0) / boost::math::tgamma(3.5);
  EXPECT_NEAR(weight_frac_derivative(0.0, WeightProfile(1.0, 4.0), FracOrder(0.5, 1)), oracle, 1e-12);
  EXPECT_NEAR(oracle, 7.2216, 1e-4);
}

TEST(WeightDerivative, NeedsBetaAboveOrder) {
  EXPECT_THROW(weight_frac_derivative(0.1, WeightProfile(1.0, 1.2), FracOrder(0.5, 1)), invalid_profile_error);
}

TEST(RlIntegral, PowerRule) {
  const auto g = TimeGrid::uniform(2.0, 64);
  const auto zero = g.sample([](double) { return 0.0; });
  const auto one = g.sample([](double) { return 1.0; });
  const auto lin = g.sample([](double t) { return t; });
  for (double a : {0.25, 0.5, 0.75}) {
    EXPECT_EQ(rl_integral_left(g, zero, a, 1.3), 0.0);
    EXPECT_NEAR(rl_integral_left(g, one, a, 1.3), std::pow(1.3, a) / std::tgamma(a + 1.0), 1e-12);
    EXPECT_NEAR(rl_integral_left(g, lin, a, 1.3), std::pow(1.3, 1.0 + a) / std::tgamma(a + 2.0), 1e-12);
  }
}

TEST(RlIntegral, ExponentialSeries) {
  // I^a e^t at t=1 is sum_k 1/Gamma(k+1+a)
  for (double a : {0.3, 0.7}) {
    double oracle = 0.0;
    for (int k = 0; k < 60; ++k) oracle += 1.0 / std::tgamma(k + 1 + a);
    const auto g = TimeGrid::uniform(1.0, 256);
    const auto f = g.sample([](double t) { return std::exp(t); });
    EXPECT_NEAR(rl_integral_left(g, f, a, 1.0), oracle, 1e-10);
  }
}

TEST(RlDerivative, ConstantRightSided) {
  const auto g = TimeGrid::uniform(3.0, 32);
  const auto c = g.sample([](double) { return 2.5; });
  const auto zero = g.sample([](double) { return 0.0; });
  for (double a : {0.2, 0.6}) {
    for (double t : {0.0, 1.0, 2.2}) {
      EXPECT_NEAR(rl_derivative_right(g, c, a, t), 2.5 * std::pow(3.0 - t, -a) / std::tgamma(1.0 - a), 1e-12);
      EXPECT_EQ(rl_derivative_right(g, zero, a, t), 0.0);
    }
  }
}

TEST(RlDerivative, WeightMatchesClosedForm) {
  const std::size_t N = 4096;
  const auto g = TimeGrid::uniform(1.0, N);
  for (double a : {0.3, 0.8})
    for (int m = 0; m <= 2; ++m) {
      const WeightProfile w(1.0, default_beta(a, 2.0));
      const auto f = weight_signed_derivative_samples(g, w, m);
      for (double t : {0.1, 0.5, 0.9}) {
        const double exact = weight_frac_derivative(t, w, FracOrder(a, m));
        EXPECT_NEAR(rl_derivative_right(g, f, a, t) / exact, 1.0, 1e-6) << "a=" << a << " m=" << m << " t=" << t;
      }
    }
}

TEST(RlDerivative, NonuniformGrid) {
  std::vector<double> x;
  for (int i = 0; i <= 200; ++i) x.push_back(std::pow(i / 200.0, 1.5));
  const auto g = TimeGrid::from_nodes(x);
  EXPECT_FALSE(g.is_uniform());
  const auto f = g.sample([](double t) { return t * t; });
  // D^a_{0|t} t^2 = 2 t^{2-a} / Gamma(3-a)
  EXPECT_NEAR(rl_derivative_left(g, f, 0.4, 0.7), 2.0 * std::pow(0.7, 1.6) / std::tgamma(2.6), 1e-9);
}

TEST(Identities, SemigroupOnPolynomial) {
  const auto g = TimeGrid::uniform(1.0, 512);
  const auto f = g.sample([](double t) { return t * t * (1.0 - t); });
  for (double a : {0.1, 0.5, 0.9}) {
    const auto I = ProductIntegrator(g, f, Side::left).integral_at_nodes(a);
    const auto D = ProductIntegrator(g, I, Side::left).derivative_at_nodes(a);
    for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(D[i], f[i], 1e-6);
  }
}

TEST(Identities, IntegrationByPartsZero) {
  const auto g = TimeGrid::uniform(1.0, 128);
  const auto zero = g.sample([](double) { return 0.0; });
  const auto c = g.sample([](double t) { return std::cos(t); });
  EXPECT_EQ(ibp_residual(g, zero, c, 0.5), 0.0);
}

TEST(Identities, IntegrationByPartsAgainstQuadrature) {
  // both sides through adaptive quadrature of the closed forms
  const double a = 0.5, T = 1.0;
  const WeightProfile w(T, default_beta(a, 2.0));
  const auto g = TimeGrid::uniform(T, 2048);
  const auto f = g.sample([&](double t) { return weight_value(t, w); });
  const auto q = g.sample([](double t) { return t * t; });
  EXPECT_LT(ibp_residual(g, f, q, a), 1e-5);
  EXPECT_LT(ibp_residual(g, f, f, a), 1e-5);

  // int t^2 D^a_{t|T} w dt, with D^a_{0|t} t^2 = 2 t^{2-a}/Gamma(3-a)
  auto lhs_int = [&](double t) { return weight_value(t, w) * 2.0 * std::pow(t, 2.0 - a) / std::tgamma(3.0 - a); };
  auto rhs_int = [&](double t) { return t * t * weight_frac_derivative(t, w, FracOrder(a, 0)); };
  using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
  EXPECT_NEAR(gk::integrate(lhs_int, 0.0, T, 15, 1e-13), gk::integrate(rhs_int, 0.0, T, 15, 1e-13), 1e-10);
}

TEST(WeightIntegral, ScalingAndClosedForm) {
  const double a = 0.5, p = 2.0, pp = 2.0;
  for (int m = 0; m <= 2; ++m) {
    const auto v10 = lemma2_integral(FracOrder(a, m), p, WeightProfile(10.0, default_beta(a, p)));
    const auto v100 = lemma2_integral(FracOrder(a, m), p, WeightProfile(100.0, default_beta(a, p)));
    EXPECT_NEAR(v100.numeric_value / v10.numeric_value, std::pow(10.0, 1.0 - (m + a) * pp), 1e-8 * v100.numeric_value / v10.numeric_value);
  }
  const auto v = lemma2_integral(FracOrder(0.5, 0), 2.0, WeightProfile(1.0, 6.0));
  const double c = std::tgamma(7.0) / std::tgamma(6.5);
  EXPECT_NEAR(v.closed_form_value, c * c / 6.0, 1e-12 * c * c);
  EXPECT_NEAR(v.numeric_value, c * c / 6.0, 1e-8 * c * c);
}

TEST(WeightIntegral, NonIntegrableEndpoint) {
  EXPECT_THROW(lemma2_integral(FracOrder(0.5, 2), 2.0, WeightProfile(1.0, 3.0)), invalid_profile_error);
}

TEST(ProductRule, FirstOrderConverges) {
  // degree 1 error drops roughly 4x per halving on a smooth input
  double prev = 0.0;
  double oracle = 0.0;
  for (int k = 0; k < 60; ++k) oracle += 1.0 / std::tgamma(k + 1.5);
  for (std::size_t n : {64u, 128u, 256u}) {
    const auto g = TimeGrid::uniform(1.0, n);
    const auto f = g.sample([](double t) { return std::exp(t); });
    const double err = std::abs(rl_integral_left(g, f, 0.5, 1.0, ProductRule{1}) - oracle);
    if (prev > 0.0) EXPECT_GT(prev / err, 3.0);
    prev = err;
  }
}
