#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "landau/degiorgi.hpp"
#include "landau/dynamics.hpp"
#include "oracle.hpp"

using namespace landau;

namespace {

Trajectory<RadialGrid> maxwellian_run(std::size_t n) {
  SimConfig c;
  c.grid = {GridKind::radial, 12.0, n};
  c.t_end = 0.1;
  c.records = false;
  return run(c, RadialGrid(12.0, n)).slices;
}

const Trajectory<RadialGrid>& baseline() {
  static const Trajectory<RadialGrid> t = maxwellian_run(1024);
  return t;
}

double sup_u(const Trajectory<RadialGrid>& traj) {
  double m = 0.0;
  for (const auto& s : traj) m = std::max(m, s.u.max());
  return m;
}

/// Root of the unit Maxwellian at level k, by bisection.
double maxwellian_level_radius(double k) {
  double lo = 0.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (oracle::maxwellian(mid) > k ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(DeGiorgi, LadderArithmetic) {
  const DeGiorgiLadder L(0.1, 4.0, 0.3, 20);
  EXPECT_EQ(L.T_n(0), 0.025);
  EXPECT_EQ(L.R_n(0), 4.0);
  EXPECT_EQ(L.k_n(0), 0.0);
  for (int n = 0; n < 20; ++n) {
    const double p2 = std::ldexp(1.0, n);
    EXPECT_NEAR(L.T_n(n + 1) - L.T_n(n), L.T / (8.0 * p2), 1e-17) << n;
    EXPECT_NEAR(L.R_n(n) - L.R_n(n + 1), L.R / (4.0 * p2), 1e-15) << n;
    EXPECT_NEAR(L.k_n(n + 1) - L.k_n(n), L.M / (2.0 * p2), 1e-16) << n;
    EXPECT_LT(L.T_n(n), L.T / 2.0);
    EXPECT_GT(L.R_n(n), L.R / 2.0);
    EXPECT_LT(L.k_n(n), L.M);
  }
  EXPECT_THROW(DeGiorgiLadder(0.0, 4.0, 1.0), ParameterError);
  EXPECT_THROW(DeGiorgiLadder(1.0, 4.0, 1.0, 0), ParameterError);
}

TEST(DeGiorgi, CutoffConstants) {
  const DeGiorgiLadder L(0.1, 4.0, 1.0, 10);
  for (int n = 0; n <= 10; ++n) {
    const auto c = cutoff_constants(L, n);
    EXPECT_LE(c.C_grad, 4.0) << n;
    EXPECT_LE(c.C_hess, 4.0) << n;
    const RadialCutoff eta = L.cutoff(n);
    EXPECT_EQ(eta(L.R_n(n + 1)), 1.0);
    EXPECT_EQ(eta(0.5 * L.R_n(n + 1)), 1.0);
    EXPECT_EQ(eta(L.R_n(n)), 0.0);
    EXPECT_EQ(eta(2.0 * L.R_n(n)), 0.0);
  }
}

TEST(DeGiorgi, Truncation) {
  const RadialGrid g(12.0, 2048);
  const RadialField u = RadialField::sample_radial(g, [](double r) { return oracle::maxwellian(r); });
  EXPECT_EQ(truncation(u, 0.0).data(), u.data());
  for (double v : truncation(u, u.max()).values()) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(truncation(u, -1.0), ParameterError);

  const double k = 0.03;
  const double rk = maxwellian_level_radius(k);
  const double expected =
      oracle::integrate([k](double r) { return 4.0 * oracle::pi * r * r * (oracle::maxwellian(r) - k); }, 0.0, rk);
  EXPECT_NEAR(mass(truncation(u, k)), expected, 1e-3);
  const RadialField uk = truncation(u, k);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(uk[i] > 0.0, g.node(i) < rk) << i;
}

TEST(DeGiorgi, SupportIdentity) {
  const auto& traj = baseline();
  const DeGiorgiLadder L(0.1, 4.0, 0.5 * sup_u(traj), 10);
  for (int n = 1; n <= 10; ++n)
    for (const auto& s : traj) EXPECT_EQ(support_identity_mismatches(s.u, L, n), 0u);
  EXPECT_THROW(support_identity_mismatches(traj[0].u, L, 0), ParameterError);
}

TEST(DeGiorgi, LevelEnergiesOnBoundedRun) {
  const auto& traj = baseline();
  const double M = 2.0 * sup_u(traj);
  const DeGiorgiLadder L(traj.back().t, 4.0, M, 10);
  const auto lv = level_energies(traj, L, 5.0 / 3.0, 0.0, lemma2_constant(5.0 / 3.0));
  ASSERT_EQ(lv.size(), 11u);
  EXPECT_GT(lv[0].U, 0.0);
  for (int n = 1; n <= 10; ++n) {
    EXPECT_LE(lv[n].U, lv[n - 1].U);
    EXPECT_GE(lv[n].U, 0.0);
    if (L.k_n(n) >= sup_u(traj)) EXPECT_EQ(lv[n].U, 0.0) << n;
  }
  EXPECT_LT(lv[8].U, 1e-8);
  EXPECT_NEAR(lv[0].U, lv[0].time_term + lv[0].a_term + lv[0].k_term, 1e-14 * lv[0].U);
}

TEST(DeGiorgi, LevelEnergyOfZeroRun) {
  const RadialGrid g(12.0, 512);
  const Trajectory<RadialGrid> z{SimState<RadialGrid>::make(RadialField(g)), SimState<RadialGrid>::make(RadialField(g), 0.1)};
  const DeGiorgiLadder L(0.1, 4.0, 1.0, 6);
  for (const auto& e : level_energies(z, L, 5.0 / 3.0, 0.0, lemma2_constant(5.0 / 3.0))) EXPECT_EQ(e.U, 0.0);
}

TEST(DeGiorgi, UnderResolvedCutoffRejected) {
  const auto& traj = baseline();
  const DeGiorgiLadder L(traj.back().t, 4.0, 1e-6, 10);
  EXPECT_NO_THROW(level_energy(traj, L, 1, 5.0 / 3.0, 0.0, 1.0));
  EXPECT_THROW(level_energy(traj, L, 8, 5.0 / 3.0, 0.0, 1.0), ParameterError);
}

TEST(DeGiorgi, RecurrenceToySequence) {
  const Rational q(3);
  auto toy = [](double rho) {
    std::vector<double> U;
    for (int n = 0; n <= 8; ++n) U.push_back(std::pow(rho, std::pow(1.5, n)));
    return U;
  };
  const auto ok = recurrence_check(toy(1e-4), q, 1.0);
  EXPECT_EQ(ok.verdict, "decay");
  EXPECT_TRUE(ok.seed_ok);
  EXPECT_DOUBLE_EQ(ok.threshold, 1.0 / 64.0);
  for (bool h : ok.holds) EXPECT_TRUE(h);

  const auto bad = recurrence_check(toy(0.5), q, 1.0);
  EXPECT_FALSE(bad.seed_ok);
  EXPECT_EQ(bad.verdict, "no-decay");

  EXPECT_NEAR(calibrate_recurrence(toy(1e-2), q), 1.0, 1e-12);
  EXPECT_THROW(recurrence_check(toy(0.1), Rational(2), 1.0), ParameterError);
  EXPECT_THROW(calibrate_recurrence(toy(0.1), Rational(3, 2)), ParameterError);
}

TEST(DeGiorgi, MThreshold) {
  const auto m = m_threshold(1.0, 2, Rational(3));
  EXPECT_EQ(m.alpha, Rational(21, 8));
  EXPECT_DOUBLE_EQ(m.threshold, std::pow(2.0, 2.625));
  EXPECT_LT(m_threshold(1.0, 50, Rational(3)).alpha, m_threshold(1.0, 1, Rational(3)).alpha);
  EXPECT_EQ(minimal_admissible_n(Rational(3)), 1);
  try {
    m_threshold(1.0, 0, Rational(3));
    FAIL() << "expected rejection";
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("-1/6"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("minimal admissible n is 1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(m_threshold(1.0, 2, Rational(2)), ParameterError);
}

TEST(DeGiorgi, Lemma2Constant) {
  EXPECT_NEAR(lemma2_constant(5.0 / 3.0), 16.6, 1e-12);
  EXPECT_THROW(lemma2_constant(1.0), ParameterError);
}

TEST(DeGiorgi, EnergyIdentityAtTwoResolutions) {
  const RadialCutoff eta(1.0, 2.0);
  for (std::size_t n : {512u, 1024u}) {
    const auto traj = n == 1024 ? baseline() : maxwellian_run(n);
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
      const auto r = energy_identity_residual(traj[i], traj[i + 1], eta, 0.01, 5.0 / 3.0);
      EXPECT_LE(r.residual, 1e-2 * std::abs(r.lhs)) << n << " " << i;
      EXPECT_NEAR(r.residual, r.lhs - r.rhs, 1e-15);
    }
  }
}

TEST(DeGiorgi, EnergyIdentitySpecialCases) {
  const auto& traj = baseline();
  const RadialCutoff whole(100.0, 200.0);  // eta = 1 on the grid, k = 0
  const auto r = energy_identity_residual(traj[0], traj[1], whole, 0.0, 5.0 / 3.0);
  EXPECT_EQ(r.cutoff_terms, 0.0);
  const double p = 5.0 / 3.0;
  const double react0 = (p - 1.0) * quadrature(traj[0].u.grid(), [&](std::size_t i) { return std::pow(traj[0].u[i], p + 1.0); });
  const double react1 = (p - 1.0) * quadrature(traj[1].u.grid(), [&](std::size_t i) { return std::pow(traj[1].u[i], p + 1.0); });
  EXPECT_NEAR(r.reaction, 0.5 * (react0 + react1), 1e-12 * r.reaction);

  const RadialGrid g(12.0, 512);
  const auto z0 = SimState<RadialGrid>::make(RadialField(g)), z1 = SimState<RadialGrid>::make(RadialField(g), 0.1);
  EXPECT_EQ(energy_identity_residual(z0, z1, RadialCutoff(1.0, 2.0), 0.01, p).residual, 0.0);
  EXPECT_THROW(energy_identity_residual(z0, z1, RadialCutoff(1.0, 1.01), 0.01, p), ParameterError);
  EXPECT_THROW(energy_identity_residual(z1, z0, RadialCutoff(1.0, 2.0), 0.01, p), ParameterError);
}

TEST(DeGiorgi, ReportOnBoundedRun) {
  const auto& traj = baseline();
  const double M = 2.0 * sup_u(traj);
  const DeGiorgiLadder L(traj.back().t, 4.0, M, 10);
  const auto rep = degiorgi_report(traj, L, DeGiorgiParams{});
  EXPECT_EQ(rep.recurrence.verdict, "decay");
  EXPECT_EQ(rep.calibration, "same-run");
  ASSERT_TRUE(rep.threshold);
  EXPECT_EQ(rep.threshold->alpha, Rational(21, 8));
  for (std::size_t n = 1; n < rep.support_mismatches.size(); ++n) EXPECT_EQ(rep.support_mismatches[n], 0u);
  EXPECT_GE(rep.C_eps, 0.0);
  EXPECT_DOUBLE_EQ(rep.C_p, lemma2_constant(5.0 / 3.0));

  DeGiorgiParams bad;
  bad.q = Rational(10, 3);
  EXPECT_THROW(degiorgi_report(traj, L, bad), ParameterError);
  bad.q = Rational(2);
  EXPECT_THROW(degiorgi_report(traj, L, bad), ParameterError);

  const auto fallback = degiorgi_report(traj, L, DeGiorgiParams{}, std::nullopt, 0);
  EXPECT_EQ(fallback.threshold->n, 1);
}
