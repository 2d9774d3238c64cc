#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "fraclab/solver.hpp"

using namespace fraclab;

namespace {

// RK4 on a'' + mu k^sigma a' + k^2 a = 0
double rk4_mode(double k, double mu, double sigma, double T, double a0, double a1, int steps) {
  const double c = mu * std::pow(k, sigma), k2 = k * k;
  auto rhs = [&](std::array<double, 2> y) { return std::array<double, 2>{y[1], -c * y[1] - k2 * y[0]}; };
  std::array<double, 2> y{a0, a1};
  const double h = T / steps;
  for (int i = 0; i < steps; ++i) {
    const auto k1 = rhs(y);
    const auto k2v = rhs({y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
    const auto k3 = rhs({y[0] + 0.5 * h * k2v[0], y[1] + 0.5 * h * k2v[1]});
    const auto k4 = rhs({y[0] + h * k3[0], y[1] + h * k3[1]});
    for (int j = 0; j < 2; ++j) y[j] += h / 6.0 * (k1[j] + 2.0 * k2v[j] + 2.0 * k3[j] + k4[j]);
  }
  return y[0];
}

}  // namespace

TEST(LinearMode, ZeroWavenumber) {
  const auto a = linear_mode_reference(0.0, 1.0, 1.0, 2.5, {1.5, 0.0}, {-0.4, 0.0});
  EXPECT_NEAR(a.real(), 1.5 - 0.4 * 2.5, 1e-14);
}

TEST(LinearMode, UndampedOscillator) {
  for (double t : {0.3, 1.0, 4.0}) EXPECT_NEAR(linear_mode_reference(1.0, 1e-14, 1.0, t, 1.0, 0.0).real(), std::cos(t), 1e-12);
}

TEST(LinearMode, RepeatedRoot) {
  for (double t : {0.5, 1.0, 3.0}) {
    const double v = linear_mode_reference(1.0, 2.0, 1.0, t, 1.0, 0.0).real();
    EXPECT_NEAR(v, (1.0 + t) * std::exp(-t), 1e-12);
    EXPECT_NEAR(v, rk4_mode(1.0, 2.0, 1.0, t, 1.0, 0.0, 4000), 1e-10);
  }
}

TEST(LinearMode, OverdampedAgainstRk4) {
  EXPECT_NEAR(linear_mode_reference(0.5, 3.0, 1.5, 2.0, 0.7, -0.2).real(), rk4_mode(0.5, 3.0, 1.5, 2.0, 0.7, -0.2, 4000), 1e-10);
}

TEST(Propagator, MatchesReference) {
  for (double k : {0.0, 0.3, 1.0, 4.0})
    for (double mu : {0.1, 2.0}) {
      const double h = 0.05;
      const auto P = mode_propagator(k, mu, 1.0, h);
      const double u = linear_mode_reference(k, mu, 1.0, h, 1.0, 0.0).real();
      const double v = linear_mode_reference(k, mu, 1.0, h, 0.0, 1.0).real();
      EXPECT_NEAR(P.p00, u, 1e-13);
      EXPECT_NEAR(P.p01, v, 1e-13);
    }
}

TEST(Memory, EmptyHistoryIsZero) {
  History h;
  h.dim = 1;
  h.L = 1.0;
  h.M = 8;
  const auto f = memory_convolution(h, MemoryQuadrature(0.5), 0.0);
  EXPECT_EQ(f.sup_norm(), 0.0);
  EXPECT_THROW(memory_convolution(h, MemoryQuadrature(0.5), 0.1), internal_error);
}

TEST(Memory, ConstantAndLinearMoments) {
  const double g = 0.3;
  const MemoryQuadrature q(g);
  std::vector<double> t;
  for (int i = 0; i <= 50; ++i) t.push_back(1.7 * std::pow(i / 50.0, 1.3));
  const auto w = q.weights(t);
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    m0 += w[i];
    m1 += w[i] * t[i];
  }
  const double T = t.back();
  EXPECT_NEAR(m0, std::pow(T, 1.0 - g) / (1.0 - g), 1e-13);
  EXPECT_NEAR(m1, std::pow(T, 2.0 - g) / ((1.0 - g) * (2.0 - g)), 1e-13);
}

TEST(Memory, ConvolutionOfFields) {
  History h;
  h.dim = 1;
  h.L = 1.0;
  h.M = 4;
  for (int i = 0; i <= 10; ++i) {
    h.times.push_back(0.1 * i);
    h.values.push_back(std::vector<double>(4, 1.0));
  }
  const auto f = memory_convolution(h, MemoryQuadrature(0.5), 1.0);
  for (double v : f.values()) EXPECT_NEAR(v, 2.0, 1e-13);
  h.values.pop_back();
  EXPECT_THROW(memory_convolution(h, MemoryQuadrature(0.5), 1.0), internal_error);
}

TEST(Evolve, ZeroDataStaysZero) {
  const ModelParams m(2, 1.0, 0.5, 1.0, 2.0);
  const PeriodicField z(2, 8.0, 32);
  SolverOptions o;
  o.dt = 0.01;
  o.t_max = 0.5;
  const auto r = evolve(m, z, z, o);
  EXPECT_FALSE(r.report.blown);
  for (const auto& u : r.trajectory.u)
    for (double v : u.values()) EXPECT_EQ(v, 0.0);
}

TEST(Evolve, LinearLimitMatchesModes) {
  const ModelParams m(1, 1.0, 0.5, 1.0, 2.0);
  PeriodicField u0(1, 16.0, 128), u1(1, 16.0, 128);
  u0.fill_radial([](double r) { return std::exp(-r * r); });
  u1.fill([](const std::array<double, 3>& x) { return x[0] * std::exp(-0.5 * x[0] * x[0]); });
  SolverOptions o;
  o.dt = 1e-2;
  o.t_max = 1.0;
  o.source = false;
  const auto r = evolve(m, u0, u1, o);
  const auto a0 = spectrum(u0), a1 = spectrum(u1), a = spectrum(r.trajectory.u.back());
  SpectralPlan plan(u0);
  const auto ks = plan.wavenumber_norms();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto ref = linear_mode_reference(ks[i], 1.0, 1.0, 1.0, a0[i], a1[i]);
    EXPECT_NEAR(std::abs(a[i] - ref), 0.0, 1e-9 * (1.0 + std::abs(a0[i]) + std::abs(a1[i])));
  }
}

TEST(Evolve, PreservesReflectionSymmetry) {
  const ModelParams m(2, 0.8, 0.4, 1.0, 2.0);
  PeriodicField u0(2, 8.0, 32), u1(2, 8.0, 32);
  u0.fill([](const std::array<double, 3>& x) { return std::exp(-x[0] * x[0] - 2.0 * x[1] * x[1]); });
  u1 = u0;
  SolverOptions o;
  o.dt = 0.01;
  o.t_max = 0.3;
  const auto r = evolve(m, u0, u1, o);
  const auto& u = r.trajectory.u.back();
  const std::size_t M = u.points();
  // x -> -x maps index j to M - j (mod M) on the grid -L + j h
  for (std::size_t i = 1; i < M; ++i)
    for (std::size_t j = 1; j < M; ++j) EXPECT_NEAR(u[i * M + j], u[(M - i) * M + j], 1e-12);
}

TEST(Evolve, DetectsBlowup) {
  const ModelParams m(1, 1.0, 0.5, 1.0, 2.0);
  PeriodicField u0(1, 32.0, 256);
  u0.fill_radial([](double r) { return 10.0 * std::exp(-r * r); });
  SolverOptions o;
  o.t_max = 20.0;
  const auto r = evolve(m, u0, u0, o);
  EXPECT_TRUE(r.report.blown);
  EXPECT_NEAR(r.report.t_star, 1.289, 5e-3);
  EXPECT_GE(r.report.peak_norms.back().sup, o.threshold / o.growth_limit);
  EXPECT_NEAR(r.report.t_end, r.report.t_star, 1e-2);
}

TEST(Evolve, RejectsCflViolation) {
  const ModelParams m(1, 1.0, 0.5, 1.0, 2.0);
  const PeriodicField z(1, 1.0, 1024);
  SolverOptions o;
  o.dt = 0.1;
  EXPECT_THROW(evolve(m, z, z, o), fraclab::domain_error);
}
