#pragma once

// De Giorgi ladder: level truncations u_n = (u - k_n)_+ on shrinking
// space-time cylinders, their energies U_n, and the superlinear recurrence
// U_n <= 4^{n-1} C U_{n-1}^{q/2}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "landau/cutoff.hpp"
#include "landau/errors.hpp"
#include "landau/field.hpp"
#include "landau/inequalities.hpp"
#include "landau/rational.hpp"
#include "landau/state.hpp"
#include "landau/stencil.hpp"

namespace landau {

/// T_n = (1/4)(2 - 2^{-n}) T, R_n = (1/2)(1 + 2^{-n}) R, k_n = M (1 - 2^{-n}).
struct DeGiorgiLadder {
  double T;
  double R;
  double M;
  int n_max = 10;

  DeGiorgiLadder(double T_, double R_, double M_, int n = 10) : T(T_), R(R_), M(M_), n_max(n) {
    require(T_ > 0.0, "DeGiorgiLadder: T must be positive");
    require(R_ > 0.0, "DeGiorgiLadder: R must be positive");
    require(M_ > 0.0, "DeGiorgiLadder: M must be positive");
    require(n >= 1 && n <= 60, "DeGiorgiLadder: n_max must lie in [1, 60]");
  }

  static double pow2(int n) { return std::ldexp(1.0, n); }
  double T_n(int n) const { return 0.25 * (2.0 - 1.0 / pow2(n)) * T; }
  double R_n(int n) const { return 0.5 * (1.0 + 1.0 / pow2(n)) * R; }
  double k_n(int n) const { return M * (1.0 - 1.0 / pow2(n)); }
  /// eta_n = 1 on B_{n+1}, supported in B_n.
  RadialCutoff cutoff(int n) const { return RadialCutoff(R_n(n + 1), R_n(n)); }
};

struct CutoffConstants {
  double C_grad;  ///< max |grad eta_n| / 2^{n+1}
  double C_hess;  ///< max ||D^2 eta_n|| / 2^{2n+2}
};

/// Measures the cutoff derivative constants on `samples` points across the annulus.
inline CutoffConstants cutoff_constants(const DeGiorgiLadder& L, int n, std::size_t samples = 20000) {
  const RadialCutoff eta = L.cutoff(n);
  double g = 0.0, hmax = 0.0;
  for (std::size_t i = 0; i <= samples; ++i) {
    const double r = eta.r_in + eta.width() * static_cast<double>(i) / static_cast<double>(samples);
    g = std::max(g, eta.grad_norm(r));
    hmax = std::max(hmax, eta.hessian_norm(r));
  }
  return {g / DeGiorgiLadder::pow2(n + 1), hmax / DeGiorgiLadder::pow2(2 * n + 2)};
}

/// u_k = (u - k)_+; the support is {u > k}.
template <Grid G>
Field<G> truncation(const Field<G>& u, double k) {
  require(k >= 0.0, "truncation: level k must be >= 0");
  return u.map([k](double v) { return v > k ? v - k : 0.0; });
}

/// Number of nodes where {u_n > 0} and {u_{n-1} > M/2^n} disagree.
template <Grid G>
std::size_t support_identity_mismatches(const Field<G>& u, const DeGiorgiLadder& L, int n) {
  require(n >= 1, "support_identity_mismatches: n must be >= 1");
  const Field<G> un = truncation(u, L.k_n(n));
  const Field<G> um = truncation(u, L.k_n(n - 1));
  const double level = L.M / DeGiorgiLadder::pow2(n);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if ((un[i] > 0.0) != (um[i] > level)) ++bad;
  return bad;
}

/// C(p) = 2(p-2)^2/(p(p-1)) + 4/p + 4p/(p-1) + 4, from Young's inequality with
/// weight (p-1)/(2p) on the two cross terms.
inline double lemma2_constant(double p) {
  require(p > 1.0, "lemma2_constant: p must exceed 1");
  return 2.0 * (p - 2.0) * (p - 2.0) / (p * (p - 1.0)) + 4.0 / p + 4.0 * p / (p - 1.0) + 4.0;
}

struct DeGiorgiParams {
  double p = 5.0 / 3.0;
  Rational q{3};
  double C_eps = -1.0;  ///< C(eps, p); negative means measure it with the eps-Poincare probe
  double C_p = -1.0;    ///< C(p); negative means lemma2_constant(p)
};

struct LevelEnergy {
  int n = 0;
  double T_n = 0.0, R_n = 0.0, k_n = 0.0;
  double time_term = 0.0;  ///< (2^{n+2}/T + C(eps,p)) int_{T_n}^T int eta_n^2 u_n^p
  double a_term = 0.0;     ///< (C(p)+1) 2^{2n+2} int_{T_n}^T int_{B_n} a eta_n^2 u_n^p
  double k_term = 0.0;     ///< 2 p k_n^2 int_{T_n}^T int eta_n^2 u_n^{p-1}
  double U = 0.0;
};

namespace detail {

/// int_{t0}^{t1} of a piecewise-linear interpolant through (t_i, v_i).
inline double window_integral(const std::vector<double>& t, const std::vector<double>& v, double t0, double t1) {
  double s = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double a = std::max(t[i - 1], t0), b = std::min(t[i], t1);
    if (!(b > a)) continue;
    const double span = t[i] - t[i - 1];
    auto at = [&](double x) { return v[i - 1] + (v[i] - v[i - 1]) * (x - t[i - 1]) / span; };
    s += 0.5 * (b - a) * (at(a) + at(b));
  }
  return s;
}

}  // namespace detail

/// Measures C(eps, p) with eps = (p-1)/(8p^2) on slices in [T/4, T], test
/// functions restricted to B_R; clamped at 0.
template <Grid G>
double measure_c_eps(const Trajectory<G>& traj, const DeGiorgiLadder& L, double p) {
  const double eps = (p - 1.0) / (8.0 * p * p);
  const auto fam = default_family(traj.front().grid());
  double c = 0.0;
  for (const auto& s : traj)
    if (s.t >= L.T_n(0) && s.t <= L.T) c = std::max(c, eps_poincare_constant(s.u, s.a.a, eps, fam, L.R).C_needed);
  return c;
}

template <Grid G>
LevelEnergy level_energy(const Trajectory<G>& traj, const DeGiorgiLadder& L, int n, double p, double C_eps,
                         double C_p) {
  require(p > 1.0, "level_energy: p must exceed 1");
  require(n >= 0, "level_energy: n must be >= 0");
  require(!traj.empty(), "level_energy: empty trajectory");
  require(traj.back().t >= L.T * (1.0 - 1e-12), "level_energy: trajectory must span [0, T]");
  LevelEnergy e;
  e.n = n;
  e.T_n = L.T_n(n);
  e.R_n = L.R_n(n);
  e.k_n = L.k_n(n);
  const RadialCutoff eta = L.cutoff(n);
  const double h = traj.front().grid().spacing();
  const bool coarse = eta.width() < 4.0 * h;

  std::vector<double> t, i_time, i_a, i_k;
  for (const auto& s : traj) {
    const G& g = s.u.grid();
    const Field<G> un = truncation(s.u, e.k_n);
    if (coarse && s.t >= e.T_n)
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = g.radius(i);
        if (un[i] > 0.0 && r > eta.r_in - h && r < eta.r_out + h)
          throw ParameterError("level_energy: under-resolved cutoff (fewer than 4 cells across B_n \\ B_{n+1}) at n = " +
                               std::to_string(n));
      }
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    s1 = quadrature(g, [&](std::size_t i) {
      const double w = eta(g.radius(i));
      return un[i] > 0.0 ? w * w * std::pow(un[i], p) : 0.0;
    });
    s2 = quadrature(g, [&](std::size_t i) {
      const double r = g.radius(i);
      const double w = eta(r);
      return (un[i] > 0.0 && r < e.R_n) ? s.a.a[i] * w * w * std::pow(un[i], p) : 0.0;
    });
    s3 = quadrature(g, [&](std::size_t i) {
      const double w = eta(g.radius(i));
      return un[i] > 0.0 ? w * w * std::pow(un[i], p - 1.0) : 0.0;
    });
    t.push_back(s.t);
    i_time.push_back(s1);
    i_a.push_back(s2);
    i_k.push_back(s3);
  }
  const double pw = DeGiorgiLadder::pow2(n + 2);
  e.time_term = (pw / L.T + C_eps) * detail::window_integral(t, i_time, e.T_n, L.T);
  e.a_term = (C_p + 1.0) * DeGiorgiLadder::pow2(2 * n + 2) * detail::window_integral(t, i_a, e.T_n, L.T);
  e.k_term = 2.0 * p * e.k_n * e.k_n * detail::window_integral(t, i_k, e.T_n, L.T);
  e.U = e.time_term + e.a_term + e.k_term;
  return e;
}

// ---------------------------------------------------------------------------
// Recurrence

/// Smallest C with U_n <= 4^{n-1} C U_{n-1}^{q/2} for all n >= 1 (0 when no
/// ratio is defined).
inline double calibrate_recurrence(const std::vector<double>& U, Rational q) {
  if (!(q > Rational(2))) throw ParameterError("calibrate_recurrence: q must exceed 2");
  const double e = 0.5 * q.value();
  double C = 0.0;
  for (std::size_t n = 1; n < U.size(); ++n) {
    if (!(U[n - 1] > 0.0)) continue;
    C = std::max(C, U[n] / (std::pow(4.0, static_cast<double>(n) - 1.0) * std::pow(U[n - 1], e)));
  }
  return C;
}

struct RecurrenceCheck {
  double q = 0.0;
  double C = 0.0;
  std::vector<bool> holds;  ///< index n (entry 0 unused, true)
  double seed = 0.0;        ///< U_0^{q/2 - 1}
  double threshold = 0.0;   ///< 1 / (C 8^{1/(q/2 - 1)})
  bool seed_ok = false;
  bool degenerate = false;  ///< C == 0: the threshold is infinite
  std::string verdict;      ///< "decay" or "no-decay"
};

inline RecurrenceCheck recurrence_check(const std::vector<double>& U, Rational q, double C) {
  if (!(q > Rational(2))) throw ParameterError("recurrence_check: q must exceed 2 (q/2 > 1 is needed to close the iteration)");
  require(!U.empty(), "recurrence_check: empty U sequence");
  require(C >= 0.0, "recurrence_check: C must be >= 0");
  RecurrenceCheck r;
  r.q = q.value();
  r.C = C;
  const double e = 0.5 * r.q;
  r.holds.assign(U.size(), true);
  for (std::size_t n = 1; n < U.size(); ++n) {
    const double rhs = std::pow(4.0, static_cast<double>(n) - 1.0) * C * std::pow(U[n - 1], e);
    r.holds[n] = U[n] <= rhs * (1.0 + 1e-12);
  }
  r.seed = std::pow(U[0], e - 1.0);
  r.degenerate = C == 0.0;
  r.threshold = r.degenerate ? std::numeric_limits<double>::infinity() : 1.0 / (C * std::pow(8.0, 1.0 / (e - 1.0)));
  r.seed_ok = r.seed <= r.threshold;
  r.verdict = r.seed_ok ? "decay" : "no-decay";
  return r;
}

// ---------------------------------------------------------------------------
// Level threshold

struct MThreshold {
  std::int64_t n = 0;
  Rational q;
  Rational alpha;      ///< ((7n+5)/(3n+2) + n)(q/2-1) / ((5/3+n)(q/2-1) - 1)
  double threshold = 0.0;  ///< c(n) (1/T + 1)^{alpha}
};

/// Smallest integer n >= 0 with (5/3 + n)(q/2 - 1) > 1.
inline std::int64_t minimal_admissible_n(Rational q) {
  if (!(q > Rational(2))) throw ParameterError("minimal_admissible_n: q must exceed 2");
  const Rational e = q / Rational(2) - Rational(1);
  std::int64_t n = 0;
  while (!((Rational(5, 3) + Rational(n)) * e > Rational(1))) ++n;
  return n;
}

inline MThreshold m_threshold(double T, std::int64_t n, Rational q, double c_n = 1.0) {
  require(T > 0.0, "m_threshold: T must be positive");
  require(n >= 0, "m_threshold: n must be >= 0");
  if (!(q > Rational(2))) throw ParameterError("m_threshold: q must exceed 2");
  const Rational e = q / Rational(2) - Rational(1);
  const Rational den = (Rational(5, 3) + Rational(n)) * e - Rational(1);
  if (!(den > Rational(0))) {
    std::ostringstream msg;
    msg << "m_threshold: denominator (5/3+n)(q/2-1)-1 = " << den << " <= 0; minimal admissible n is "
        << minimal_admissible_n(q);
    throw ParameterError(msg.str());
  }
  const Rational num = (Rational(7 * n + 5, 3 * n + 2) + Rational(n)) * e;
  MThreshold m;
  m.n = n;
  m.q = q;
  m.alpha = num / den;
  m.threshold = c_n * std::pow(1.0 / T + 1.0, m.alpha.value());
  return m;
}

// ---------------------------------------------------------------------------
// Energy inequality for truncated powers

struct EnergyIdentity {
  double d_dt = 0.0;         ///< d/dt int eta^2 u_k^p (finite difference)
  double dissipation = 0.0;  ///< (p-1)/p int a |grad(eta u_k^{p/2})|^2
  double reaction = 0.0;     ///< (p-1) int eta^2 u u_k^p + p k int eta^2 u u_k^{p-1}
  double cutoff_terms = 0.0; ///< C(p) int u_k^p a |grad eta|^2 - int a u_k^p Delta(eta^2)
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;     ///< lhs - rhs; the inequality asks for <= 0
};

namespace detail {

struct EnergySlice {
  double e, diss, react, cut;
};

template <Grid G>
EnergySlice energy_slice(const SimState<G>& s, const RadialCutoff& eta, double k, double p, double C_p) {
  const G& g = s.u.grid();
  const Field<G>& a = s.a.a;
  const Field<G> uk = truncation(s.u, k);
  Field<G> w(g);
  for (std::size_t i = 0; i < g.size(); ++i) w[i] = eta(g.radius(i)) * std::pow(uk[i], 0.5 * p);
  const auto grad = gradient(w);
  EnergySlice out{};
  out.e = quadrature(g, [&](std::size_t i) {
    const double v = eta(g.radius(i));
    return v * v * std::pow(uk[i], p);
  });
  out.diss = (p - 1.0) / p * quadrature(g, [&](std::size_t i) { return a[i] * dot(grad[i], grad[i]); });
  out.react = quadrature(g, [&](std::size_t i) {
    if (!(uk[i] > 0.0)) return 0.0;
    const double v = eta(g.radius(i));
    return v * v * s.u[i] * ((p - 1.0) * std::pow(uk[i], p) + p * k * std::pow(uk[i], p - 1.0));
  });
  out.cut = quadrature(g, [&](std::size_t i) {
    if (!(uk[i] > 0.0)) return 0.0;
    const double r = g.radius(i);
    const RampValue pr = eta.profile(r);
    const double lap_eta2 = 2.0 * pr.v * eta.laplacian(r) + 2.0 * pr.d1 * pr.d1;
    const double ukp = std::pow(uk[i], p);
    return C_p * ukp * a[i] * pr.d1 * pr.d1 - a[i] * ukp * lap_eta2;
  });
  return out;
}

}  // namespace detail

/// Both sides of
///   d/dt int eta^2 u_k^p + (p-1)/p int a |grad(eta u_k^{p/2})|^2
///     <= (p-1) int eta^2 u u_k^p + p k int eta^2 u u_k^{p-1}
///        + C(p) int u_k^p a |grad eta|^2 - int a u_k^p Delta(eta^2)
/// between two slices; space integrals are averaged over the endpoints.
template <Grid G>
EnergyIdentity energy_identity_residual(const SimState<G>& s0, const SimState<G>& s1, const RadialCutoff& eta,
                                        double k, double p, double C_p = -1.0) {
  require(p > 1.0, "energy_identity_residual: p must exceed 1");
  require(k >= 0.0, "energy_identity_residual: k must be >= 0");
  require(s1.t > s0.t, "energy_identity_residual: slices must be strictly ordered in time");
  if (C_p < 0.0) C_p = lemma2_constant(p);
  const double h = s0.grid().spacing();
  if (eta.r_in < s0.grid().extent() && eta.width() < 4.0 * h)
    throw ParameterError("energy_identity_residual: under-resolved cutoff (fewer than 4 cells across the ramp)");
  const auto a = detail::energy_slice(s0, eta, k, p, C_p);
  const auto b = detail::energy_slice(s1, eta, k, p, C_p);
  EnergyIdentity r;
  r.d_dt = (b.e - a.e) / (s1.t - s0.t);
  r.dissipation = 0.5 * (a.diss + b.diss);
  r.reaction = 0.5 * (a.react + b.react);
  r.cutoff_terms = 0.5 * (a.cut + b.cut);
  r.lhs = r.d_dt + r.dissipation;
  r.rhs = r.reaction + r.cutoff_terms;
  r.residual = r.lhs - r.rhs;
  return r;
}

// ---------------------------------------------------------------------------
// Full report

struct DeGiorgiReport {
  DeGiorgiLadder ladder;
  DeGiorgiParams params;
  double C_eps = 0.0;
  double C_p = 0.0;
  std::vector<LevelEnergy> levels;
  std::vector<CutoffConstants> cutoffs;
  std::vector<std::size_t> support_mismatches;  ///< index n >= 1
  RecurrenceCheck recurrence;
  std::string calibration;  ///< "same-run" or "calibration-run"
  std::optional<MThreshold> threshold;
};

template <Grid G>
std::vector<LevelEnergy> level_energies(const Trajectory<G>& traj, const DeGiorgiLadder& L, double p, double C_eps,
                                        double C_p) {
  std::vector<LevelEnergy> out;
  for (int n = 0; n <= L.n_max; ++n) out.push_back(level_energy(traj, L, n, p, C_eps, C_p));
  return out;
}

/// Builds the full ladder report. The recurrence constant is calibrated on
/// `calibration` when given (same trajectory at another level M), else on the
/// run itself.
template <Grid G>
DeGiorgiReport degiorgi_report(const Trajectory<G>& traj, const DeGiorgiLadder& L, const DeGiorgiParams& prm,
                               const std::optional<DeGiorgiLadder>& calibration = std::nullopt,
                               std::int64_t threshold_n = 2) {
  if (!(prm.q > Rational(2))) throw ParameterError("degiorgi: q must exceed 2");
  if (!(prm.q < Rational(10, 3))) throw ParameterError("degiorgi: q must be below 10/3");
  DeGiorgiReport rep{L, prm};
  rep.C_p = prm.C_p < 0.0 ? lemma2_constant(prm.p) : prm.C_p;
  rep.C_eps = prm.C_eps < 0.0 ? measure_c_eps(traj, L, prm.p) : prm.C_eps;
  rep.levels = level_energies(traj, L, prm.p, rep.C_eps, rep.C_p);
  for (int n = 0; n <= L.n_max; ++n) rep.cutoffs.push_back(cutoff_constants(L, n));
  rep.support_mismatches.push_back(0);
  for (int n = 1; n <= L.n_max; ++n) {
    std::size_t bad = 0;
    for (const auto& s : traj) bad += support_identity_mismatches(s.u, L, n);
    rep.support_mismatches.push_back(bad);
  }
  std::vector<double> U;
  for (const auto& e : rep.levels) U.push_back(e.U);
  double C;
  if (calibration) {
    std::vector<double> Uc;
    for (const auto& e : level_energies(traj, *calibration, prm.p, rep.C_eps, rep.C_p)) Uc.push_back(e.U);
    C = calibrate_recurrence(Uc, prm.q);
    rep.calibration = "calibration-run";
  } else {
    C = calibrate_recurrence(U, prm.q);
    rep.calibration = "same-run";
  }
  rep.recurrence = recurrence_check(U, prm.q, C);
  try {
    rep.threshold = m_threshold(L.T, threshold_n, prm.q);
  } catch (const ParameterError&) {
    rep.threshold = m_threshold(L.T, minimal_admissible_n(prm.q), prm.q);
  }
  return rep;
}

}  // namespace landau
