#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "landau/field.hpp"
#include "landau/profiles.hpp"
#include "landau/stencil.hpp"
#include "oracle.hpp"

using namespace landau;

namespace {

RadialField maxwellian_field(const RadialGrid& g, double T = 1.0) {
  return RadialField::sample_radial(g, [T](double r) { return oracle::maxwellian(r, T); });
}

RadialField unit_ball(const RadialGrid& g, double c = 1.0, double R = 1.0) {
  return RadialField::sample_radial(g, [=](double r) { return r <= R ? c : 0.0; });
}

}  // namespace

TEST(Fields, GridInvariants) {
  const RadialGrid g(12.0, 1024);
  EXPECT_DOUBLE_EQ(g.spacing(), 12.0 / 1024);
  EXPECT_GT(g.node(0), 0.0);
  EXPECT_DOUBLE_EQ(g.node(0), 0.5 * g.spacing());
  EXPECT_THROW(RadialGrid(12.0, 7), ParameterError);
  EXPECT_THROW(RadialGrid(0.0, 64), ParameterError);
  EXPECT_THROW(CartesianGrid3(4.0, 15), ParameterError);
  EXPECT_THROW(CartesianGrid3(4.0, 14), ParameterError);
  const CartesianGrid3 c(4.0, 16);
  EXPECT_DOUBLE_EQ(c.spacing(), 0.5);
  EXPECT_DOUBLE_EQ(c.coord(0), -c.coord(15));
}

TEST(Fields, MaxwellianMass) {
  const RadialGrid g(12.0, 2048);
  EXPECT_NEAR(integrate(maxwellian_field(g)), 1.0, 1e-6);
}

TEST(Fields, ZeroFieldIntegratesToZero) {
  const RadialGrid g(12.0, 256);
  const RadialField z(g);
  for (Weight w : {Weight::unit, Weight::gamma, Weight::gamma_cubed}) EXPECT_EQ(integrate(z, w), 0.0);
}

TEST(Fields, UniformBallVolume) {
  const RadialGrid g(2.0, 2048);
  EXPECT_NEAR(integrate(unit_ball(g)), 4.0 * oracle::pi / 3.0, 1e-3);
}

TEST(Fields, NonFiniteRejected) {
  const RadialGrid g(2.0, 64);
  RadialField f = RadialField::sample_radial(g, [](double r) { return r < 1.0 ? NAN : 0.0; });
  EXPECT_THROW(integrate(f), InputError);
}

TEST(Fields, Moments) {
  const RadialGrid g(12.0, 2048);
  const RadialField u = maxwellian_field(g);
  EXPECT_NEAR(std::get<double>(moment(u, 0)), 1.0, 1e-6);
  EXPECT_NEAR(std::get<double>(moment(u, 2)), 1.5, 1e-5);
  const Vec3 m1 = std::get<Vec3>(moment(u, 1));
  EXPECT_EQ(m1[0], 0.0);
  EXPECT_EQ(m1[1], 0.0);
  EXPECT_EQ(m1[2], 0.0);
  EXPECT_THROW(moment(u, 3), ParameterError);

  const RadialGrid gb(2.0, 2048);
  EXPECT_NEAR(second_moment(unit_ball(gb)), 2.0 * oracle::pi / 5.0, 1e-3);
}

TEST(Fields, FirstMomentOfEvenCartesianFieldIsExactlyZero) {
  const CartesianGrid3 g(4.0, 16);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> v(g.size());
  for (auto& x : v) x = d(rng);
  // even copy: every node takes the value of its representative in the first octant
  const std::size_t n = g.n_per_axis();
  auto fold = [n](std::size_t i) { return std::min(i, n - 1 - i); };
  std::vector<double> s(g.size());
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto [i, j, k] = g.unravel(idx);
    s[idx] = v[g.index(fold(i), fold(j), fold(k))];
  }
  const CartesianField f(g, s);
  const Vec3 m = first_moment(f);
  EXPECT_EQ(m[0], 0.0);
  EXPECT_EQ(m[1], 0.0);
  EXPECT_EQ(m[2], 0.0);
}

TEST(Fields, LpNorms) {
  const RadialGrid g(12.0, 2048);
  EXPECT_NEAR(lp_norm(maxwellian_field(g), 2.0), std::pow(8.0 * std::pow(oracle::pi, 1.5), -0.5), 1e-4);
  const RadialGrid gb(2.0, 2048);
  EXPECT_NEAR(lp_norm(unit_ball(gb), 3.0), std::cbrt(4.0 * oracle::pi / 3.0), 1e-3);
  EXPECT_EQ(lp_norm(RadialField(g), 2.0), 0.0);
  EXPECT_THROW(lp_norm(maxwellian_field(g), 0.5), ParameterError);
}

TEST(Fields, WeakNormOfPowerProfile) {
  const double p = 2.0;
  const RadialGrid g(1.0, 4096);
  const RadialField f = RadialField::sample_radial(g, [p](double r) { return std::pow(r, -3.0 / p); });
  EXPECT_NEAR(lp_weak_norm(f, p) / std::pow(4.0 * oracle::pi / 3.0, 1.0 / p), 1.0, 0.05);
}

TEST(Fields, WeakNormOfConstantOnBall) {
  const RadialGrid g(2.0, 2048);
  const double c = 3.0, p = 1.7;
  EXPECT_NEAR(lp_weak_norm(unit_ball(g, c), p), c * std::pow(4.0 * oracle::pi / 3.0, 1.0 / p), 1e-2);
  EXPECT_EQ(lp_weak_norm(RadialField(g), p), 0.0);
}

TEST(Fields, WeightedFisherMaxwellian) {
  const RadialGrid g(12.0, 2048);
  const double expected = oracle::radial([](double r) { return r * r / 4.0 * oracle::maxwellian(r) / (1.0 + r); }, 12.0);
  EXPECT_NEAR(weighted_fisher(maxwellian_field(g)) / expected, 1.0, 0.01);
}

TEST(Fields, WeightedFisherConstantAndScaling) {
  const RadialGrid g(12.0, 512);
  EXPECT_EQ(weighted_fisher(RadialField::sample_radial(g, [](double) { return 2.5; })), 0.0);
  const RadialField u = maxwellian_field(g);
  const double c = 7.0;
  EXPECT_NEAR(weighted_fisher(c * u), c * weighted_fisher(u), 1e-13 * c * weighted_fisher(u));
}

TEST(Fields, LinearityAndMonotonicity) {
  const RadialGrid g(6.0, 256);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(g.size()), b(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      a[i] = d(rng);
      b[i] = a[i] + d(rng);
    }
    const RadialField fa(g, a), fb(g, b);
    const double s = integrate(fa), t = integrate(fb);
    EXPECT_LE(s, t);
    EXPECT_NEAR(integrate(2.0 * fa + fb), 2.0 * s + t, 1e-12 * (2.0 * s + t));
    for (double p : {1.0, 2.0, 3.0}) EXPECT_LE(lp_norm(fa + fb, p), lp_norm(fa, p) + lp_norm(fb, p) * (1 + 1e-14));
  }
}

TEST(Fields, QuadratureIsSecondOrder) {
  // The Maxwellian is even in r, so the midpoint rule is spectrally accurate for it;
  // e^{-r} exposes the algebraic error term.
  auto err = [](std::size_t n) {
    const RadialGrid g(40.0, n);
    return std::abs(integrate(RadialField::sample_radial(g, [](double r) { return std::exp(-r); })) - 8.0 * oracle::pi);
  };
  EXPECT_GE(err(512) / err(1024), 3.5);
  EXPECT_GE(err(1024) / err(2048), 3.5);
}
