#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <string>

#include "landau/dynamics.hpp"
#include "oracle.hpp"

using namespace landau;

namespace {

SimConfig radial_config(double t_end, std::size_t n = 1024, double r_max = 12.0) {
  SimConfig c;
  c.grid = {GridKind::radial, r_max, n};
  c.t_end = t_end;
  c.records = false;
  return c;
}

SimState<RadialGrid> maxwellian_state(const RadialGrid& g) {
  return SimState<RadialGrid>::make(RadialField::sample_radial(g, [](double r) { return oracle::maxwellian(r); }));
}

SimState<RadialGrid> advance(SimState<RadialGrid> s, double horizon, std::size_t steps, Form form) {
  const double dt = horizon / static_cast<double>(steps);
  for (std::size_t i = 0; i < steps; ++i) s = step(s, dt, form, 1.0);
  return s;
}

double max_diff(const RadialField& a, const RadialField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST(Dynamics, ZeroStaysZero) {
  const RadialGrid g(4.0, 64);
  const auto s = SimState<RadialGrid>::make(RadialField(g));
  for (Form f : {Form::divergence, Form::nondivergence}) {
    const auto next = step(s, 1e-3, f, 1.0);
    for (double v : next.u.values()) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(next.step, 1u);
  }
}

TEST(Dynamics, MassConservedOverThousandSteps) {
  const RadialGrid g(4.0, 256);
  auto s = SimState<RadialGrid>::make(RadialField::sample_radial(g, [](double r) { return r <= 1.0 ? 1.0 : 0.0; }));
  const double m0 = mass(s.u);
  for (int i = 0; i < 1000; ++i) s = step_divergence(s, 0.9 * admissible_dt(s), 1.0);
  EXPECT_LE(std::abs(mass(s.u) - s.clipped_mass - m0) / m0, 1e-10);
}

TEST(Dynamics, MaxwellianRunConservesMass) {
  const RadialGrid g(12.0, 1024);
  const auto res = run(radial_config(0.1), g);
  ASSERT_FALSE(res.blowup);
  const double m0 = mass(res.slices.front().u);
  for (const auto& s : res.slices) EXPECT_LE(std::abs(mass(s.u) - s.clipped_mass - m0) / m0, 1e-10);
  EXPECT_DOUBLE_EQ(res.slices.back().t, 0.1);
}

TEST(Dynamics, EvenCartesianRunKeepsFirstMomentZero) {
  SimConfig c;
  c.grid = {GridKind::cartesian, 4.0, 48};
  c.t_end = 0.02;
  c.records = false;
  c.init.kind = ProfileKind::uniform_ball;
  const CartesianGrid3 g(4.0, 48);
  const auto res = run(c, g);
  ASSERT_GE(res.steps, 1u);
  const double m0 = mass(res.slices.front().u);
  for (const auto& s : res.slices) {
    const Vec3 m = first_moment(s.u);
    for (int d = 0; d < 3; ++d) EXPECT_LE(std::abs(m[d]), 1e-12);
    EXPECT_LE(std::abs(mass(s.u) - s.clipped_mass - m0) / m0, 1e-10);
  }
}

TEST(Dynamics, StabilityContract) {
  const RadialGrid g(12.0, 256);
  const auto s = maxwellian_state(g);
  const double lim = admissible_dt(s);
  const double h = g.spacing();
  EXPECT_NEAR(lim, h * h / (6.0 * s.a.a.max()), 1e-15);
  try {
    step_divergence(s, 2.0 * lim, 0.9);
    FAIL() << "expected StabilityError";
  } catch (const StabilityError& e) {
    EXPECT_NEAR(e.admissible_dt, 0.9 * lim, 1e-18);
    EXPECT_NE(std::string(e.what()).find("admissible"), std::string::npos);
  }
  EXPECT_THROW(step_nondivergence(s, 2.0 * lim, 1.0, 1.0), StabilityError);
  EXPECT_THROW(step_divergence(s, 0.0, 1.0), ParameterError);
  EXPECT_NO_THROW(step_divergence(s, 0.5 * lim, 1.0));
}

TEST(Dynamics, FirstOrderInTime) {
  // one-step vs refined differences over a fixed horizon shrink by 2 when dt halves
  const RadialGrid g(12.0, 256);
  const auto s = maxwellian_state(g);
  const double horizon = 8.0 * 0.5 * admissible_dt(s);
  const auto u1 = advance(s, horizon, 8, Form::divergence).u;
  const auto u2 = advance(s, horizon, 16, Form::divergence).u;
  const auto u4 = advance(s, horizon, 32, Form::divergence).u;
  const double ratio = max_diff(u1, u2) / max_diff(u2, u4);
  EXPECT_NEAR(ratio, 2.0, 0.2);
}

TEST(Dynamics, FormsAgreeForAlphaOne) {
  auto gap = [](std::size_t n) {
    const RadialGrid g(12.0, n);
    const auto s = maxwellian_state(g);
    const double dt = 0.5 * admissible_dt(s);
    const auto d = advance(s, 10 * dt, 10, Form::divergence);
    const auto nd = advance(s, 10 * dt, 10, Form::nondivergence);
    return max_diff(d.u, nd.u) / s.u.max();
  };
  const double coarse = gap(256), fine = gap(512);
  EXPECT_LT(coarse, 1e-3);
  EXPECT_LT(fine, coarse);
}

TEST(Dynamics, SpatiallyConstantReaction) {
  const RadialGrid g(2.0, 64);
  const double c = 0.3, alpha = 0.7;
  const auto s = SimState<RadialGrid>::make(RadialField::sample_radial(g, [c](double) { return c; }));
  const double dt = 0.5 * admissible_dt(s);
  const auto next = step_nondivergence(s, dt, alpha, 1.0);
  for (double v : next.u.values()) EXPECT_DOUBLE_EQ(v, c + dt * alpha * c * c);
}

TEST(Dynamics, ClippingLedger) {
  RadialGrid g(2.0, 16);
  RadialField u(g);
  u[3] = -0.5;
  u[7] = -0.25;
  u[9] = 2.0;
  const double added = detail::clip_negative(u);
  EXPECT_DOUBLE_EQ(added, 0.5 * g.volume(3) + 0.25 * g.volume(7));
  EXPECT_EQ(u[3], 0.0);
  EXPECT_EQ(u[9], 2.0);
}

TEST(Dynamics, ZeroHorizonGivesInitialStateOnly) {
  const RadialGrid g(12.0, 256);
  const auto res = run(radial_config(0.0, 256), g);
  ASSERT_EQ(res.slices.size(), 1u);
  EXPECT_EQ(res.steps, 0u);
  EXPECT_EQ(res.slices[0].t, 0.0);
}

TEST(Dynamics, OutputStrideAndLanding) {
  const RadialGrid g(12.0, 256);
  SimConfig c = radial_config(0.05, 256);
  c.output_stride = 7;
  const auto res = run(c, g);
  EXPECT_EQ(res.slices.back().t, 0.05);
  for (std::size_t i = 1; i + 1 < res.slices.size(); ++i) EXPECT_EQ(res.slices[i].step % 7, 0u);
  c.output_interval = 0.01;
  const auto timed = run(c, g);
  ASSERT_EQ(timed.slices.size(), 6u);
  for (std::size_t i = 0; i < timed.slices.size(); ++i) EXPECT_NEAR(timed.slices[i].t, 0.01 * static_cast<double>(i), 1e-15);
}

TEST(Dynamics, BlowupHaltsRun) {
  const RadialGrid g(4.0, 32);
  SimConfig c = radial_config(50.0, 32, 4.0);
  c.form = Form::nondivergence;
  c.init.kind = ProfileKind::uniform_ball;
  c.init.density = 20.0;
  c.blowup_factor = 4.0;
  const auto r1 = run(c, g);
  ASSERT_TRUE(r1.blowup);
  EXPECT_GT(r1.blowup->max_u, r1.blowup->ceiling);
  EXPECT_LT(r1.slices.back().t, 50.0);

  c.alpha = 0.5;
  const auto r_half = run(c, g);
  ASSERT_TRUE(r_half.blowup);
  EXPECT_LE(r1.blowup->t, r_half.blowup->t);
}

TEST(Dynamics, AlphaValidation) {
  SimConfig c;
  c.form = Form::nondivergence;
  for (double a : {0.5, 1.0}) {
    c.alpha = a;
    EXPECT_TRUE(c.warnings().empty()) << a;
  }
  c.alpha = 0.99;
  EXPECT_EQ(c.warnings().size(), 1u);
  c.alpha = 0.0;
  EXPECT_THROW(c.validate(), ParameterError);
  c.alpha = -1.0;
  EXPECT_THROW(c.validate(), ParameterError);
  c.form = Form::divergence;
  c.alpha = 0.99;
  EXPECT_TRUE(c.warnings().empty());
  EXPECT_THROW(parse_form("parabolic"), ParameterError);
  EXPECT_THROW(parse_grid_kind("spherical"), ParameterError);
}

TEST(Dynamics, DeterministicAcrossThreadCounts) {
  const CartesianGrid3 g(3.0, 24);
  SimConfig c;
  c.grid = {GridKind::cartesian, 3.0, 24};
  c.t_end = 0.02;
  c.output_stride = 4;
  c.init.kind = ProfileKind::gaussian_mixture;
  c.init.center = {0.3, -0.2, 0.1};
  auto once = [&](const char* threads) {
    setenv("LNDAU_THREADS", threads, 1);
    return run(c, g);
  };
  const auto a = once("1"), b = once("3");
  unsetenv("LNDAU_THREADS");
  ASSERT_EQ(a.slices.size(), b.slices.size());
  for (std::size_t i = 0; i < a.slices.size(); ++i) {
    EXPECT_EQ(a.slices[i].u.data(), b.slices[i].u.data());
    EXPECT_EQ(a.records[i].H, b.records[i].H);
    EXPECT_EQ(a.records[i].D, b.records[i].D);
    EXPECT_EQ(a.records[i].mass, b.records[i].mass);
  }
}
