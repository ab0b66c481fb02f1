#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "landau/potential.hpp"
#include "oracle.hpp"

using namespace landau;

namespace {

RadialField radial_ball(const RadialGrid& g) {
  return RadialField::sample_radial(g, [](double r) { return r <= 1.0 ? 1.0 : 0.0; });
}

CartesianField cartesian_ball(const CartesianGrid3& g) {
  return CartesianField::sample_radial(g, [](double r) { return r <= 1.0 ? 1.0 : 0.0; });
}

double max_maxwellian_error(std::size_t n) {
  const RadialGrid g(12.0, n);
  const auto sol = solve_poisson_radial(RadialField::sample_radial(g, [](double r) { return oracle::maxwellian(r); }));
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    worst = std::max(worst, std::abs(sol.a[i] - oracle::maxwellian_potential(g.node(i))));
  return worst;
}

}  // namespace

TEST(Potential, RadialUniformBall) {
  const RadialGrid g(4.0, 4096);
  const auto sol = solve_poisson_radial(radial_ball(g));
  EXPECT_EQ(sol.method, PoissonMethod::radial_quadrature);
  EXPECT_NEAR(potential_at_origin(radial_ball(g)), 0.5, 1e-3);
  EXPECT_NEAR(sample_at(sol.a, 0.0), 0.5, 1e-3);
  EXPECT_NEAR(sample_at(sol.a, 1.0), 1.0 / 3.0, 1e-3);
  for (double r : {0.25, 0.5, 0.9, 1.5, 2.0, 3.5}) EXPECT_NEAR(sample_at(sol.a, r), oracle::ball_potential(r), 1e-3) << r;
}

TEST(Potential, RadialMaxwellian) {
  const RadialGrid g(12.0, 2048);
  const RadialField u = RadialField::sample_radial(g, [](double r) { return oracle::maxwellian(r); });
  const auto sol = solve_poisson_radial(u);
  EXPECT_NEAR(potential_at_origin(u), std::pow(2.0 * oracle::pi, -1.5), 1e-4);
  EXPECT_NEAR(oracle::maxwellian_potential(0.0), 0.063494, 1e-6);
  for (std::size_t i = 0; i < g.size(); i += 97) EXPECT_NEAR(sol.a[i], oracle::maxwellian_potential(g.node(i)), 1e-4);
  // the defect is largest at the first nodes next to the origin
  EXPECT_LT(sol.residual, 5e-2);
}

TEST(Potential, ZeroField) {
  const RadialGrid g(4.0, 256);
  const auto sol = solve_poisson_radial(RadialField(g));
  for (double v : sol.a.values()) EXPECT_EQ(v, 0.0);
  const CartesianGrid3 c(2.0, 16);
  const auto s3 = solve_poisson_3d(CartesianField(c));
  for (double v : s3.a.values()) EXPECT_EQ(v, 0.0);
}

TEST(Potential, NegativeDensityRejected) {
  const RadialGrid g(4.0, 64);
  RadialField u(g);
  u[3] = -1.0;
  EXPECT_THROW(solve_poisson_radial(u), InputError);
}

TEST(Potential, RadialSecondOrder) {
  const double e1 = max_maxwellian_error(256), e2 = max_maxwellian_error(512), e3 = max_maxwellian_error(1024);
  EXPECT_GE(e1 / e2, 3.5);
  EXPECT_GE(e2 / e3, 3.5);
}

TEST(Potential, PositiveAndDecaying) {
  for (double R : {6.0, 12.0}) {
    const RadialGrid g(R, 1024);
    const RadialField u = RadialField::sample_radial(g, [](double r) { return oracle::maxwellian(r); });
    const auto sol = solve_poisson_radial(u);
    for (double v : sol.a.values()) EXPECT_GT(v, 0.0);
    EXPECT_LE(sol.a[g.size() - 1], 1.1 * mass(u) / (4.0 * oracle::pi * R));
  }
}

TEST(Potential, CartesianUniformBall) {
  const CartesianGrid3 g(4.0, 64);
  const auto t0 = std::chrono::steady_clock::now();
  const auto sol = solve_poisson_3d(cartesian_ball(g));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(sol.method, PoissonMethod::fft_free_space);
  EXPECT_NEAR(sample_at(sol.a, Vec3{0.0, 0.0, 0.0}) / 0.5, 1.0, 0.02);
  EXPECT_NEAR(sample_at(sol.a, Vec3{2.0, 0.0, 0.0}) / oracle::ball_potential(2.0), 1.0, 0.02);
  EXPECT_LT(secs, 5.0);
}

TEST(Potential, CartesianTooSmall) { EXPECT_THROW(solve_poisson_3d(CartesianField(CartesianGrid3(2.0, 8))), ParameterError); }

TEST(Potential, TwoPointMassesFarField) {
  const CartesianGrid3 g(4.0, 32);
  const double h = g.spacing();
  const std::size_t c = g.n_per_axis() / 2;
  // hot cells mirrored through the origin, each carrying unit mass
  const std::size_t p = g.index(c + 2, c, c), q = g.index(c - 3, c - 1, c - 1);
  CartesianField u(g);
  u[p] = 1.0 / (h * h * h);
  u[q] = 1.0 / (h * h * h);
  const Vec3 xp = g.position(p), xq = g.position(q);
  const double d = norm(xp);
  const auto sol = solve_poisson_3d(u);
  std::size_t checked = 0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const double r = g.radius(idx);
    if (r < 4.0 * d) continue;
    const Vec3 x = g.position(idx);
    const double exact = (1.0 / norm(Vec3{x[0] - xp[0], x[1] - xp[1], x[2] - xp[2]}) +
                          1.0 / norm(Vec3{x[0] - xq[0], x[1] - xq[1], x[2] - xq[2]})) /
                         (4.0 * oracle::pi);
    EXPECT_NEAR(sol.a[idx] / exact, 1.0, 1e-12);
    // the quadrupole term reaches 1/15 of the monopole on the axis at 4d
    EXPECT_NEAR(sol.a[idx] / (2.0 / (4.0 * oracle::pi * r)), 1.0, 0.07);
    ++checked;
  }
  EXPECT_GT(checked, 0u);
}

TEST(Potential, TranslationEquivariance) {
  const CartesianGrid3 g(3.0, 24);
  const std::size_t n = g.n_per_axis();
  CartesianField u(g), v(g);
  for (std::size_t i = 6; i < 12; ++i)
    for (std::size_t j = 8; j < 14; ++j)
      for (std::size_t k = 9; k < 13; ++k) {
        u[g.index(i, j, k)] = 1.0 + 0.1 * static_cast<double>(i + 2 * j + 3 * k);
        v[g.index(i + 1, j, k)] = u[g.index(i, j, k)];
      }
  const auto a = solve_poisson_3d(u).a, b = solve_poisson_3d(v).a;
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        EXPECT_NEAR(b[g.index(i + 1, j, k)], a[g.index(i, j, k)], 1e-12 * a.max());
}

TEST(Potential, SelfCellIntegral) {
  // int over the unit cube of 1/|x|, by nested Simpson on one octant
  const double octant = oracle::integrate(
      [](double x) {
        return oracle::integrate(
            [x](double y) {
              return oracle::integrate([x, y](double z) { return 1.0 / std::sqrt(x * x + y * y + z * z); }, 0.0, 0.5, 1e-9);
            },
            0.0, 0.5, 1e-8);
      },
      1e-6, 0.5, 1e-7);
  EXPECT_NEAR(unit_cube_inverse_distance_integral(), 8.0 * octant, 1e-4);
}

TEST(Potential, LowerBound) {
  EXPECT_NEAR(a_lower_bound(0.0, 1.0, 1.5), 1.0 / (16.0 * oracle::pi * std::sqrt(1.5)), 1e-15);
  EXPECT_NEAR(a_lower_bound(0.0, 1.0, 1.5), 0.016244, 1e-6);
  double prev = a_lower_bound(0.0, 1.0, 1.5);
  for (double x = 0.5; x < 1e6; x *= 2.0) {
    const double v = a_lower_bound(x, 1.0, 1.5);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(prev, 1e-7);
  EXPECT_GE(oracle::maxwellian_potential(0.0), a_lower_bound(0.0, 1.0, 1.5));
  EXPECT_THROW(a_lower_bound(0.0, 0.0, 1.5), ParameterError);
  EXPECT_THROW(a_lower_bound(0.0, 1.0, -1.0), ParameterError);
}

TEST(Potential, UpperBoundLp) {
  const auto b = a_upper_bound_lp(1.0, 1.0, 5.0 / 3.0);
  EXPECT_NEAR(b.bound, 4.0, 1e-14);
  EXPECT_EQ(a_upper_bound_lp(1.0, 0.0, 5.0 / 3.0).bound, 0.0);
  EXPECT_NEAR(a_upper_bound_lp(2.0, 3.0, 5.0 / 3.0).bound, 4.0 * std::pow(2.0, 1.0 / 6.0) * std::pow(3.0, 5.0 / 6.0), 1e-12);
  EXPECT_THROW(a_upper_bound_lp(1.0, 1.0, 1.5), ParameterError);

  const double p = 5.0 / 3.0;
  const double lp = std::pow(oracle::radial([p](double r) { return std::pow(oracle::maxwellian(r), p); }, 12.0), 1.0 / p);
  EXPECT_GE(a_upper_bound_lp(1.0, lp, p).bound, 0.063494);
}
