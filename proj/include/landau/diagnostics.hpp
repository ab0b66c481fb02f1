#pragma once

// Conservation laws, entropy structure and a-priori bounds evaluated on
// simulation slices and trajectories.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "landau/errors.hpp"
#include "landau/field.hpp"
#include "landau/rational.hpp"
#include "landau/state.hpp"
#include "landau/stencil.hpp"

namespace landau {

// ---------------------------------------------------------------------------
// Entropy

/// H[u] = int u log u with 0 log 0 = 0.
template <Grid G>
double entropy(const Field<G>& u) {
  require_nonnegative(u, "entropy");
  return quadrature(u.grid(), [&](std::size_t i) { return u[i] > 0.0 ? u[i] * std::log(u[i]) : 0.0; });
}

/// -dH/dt as the pair integral
///   (1/8 pi) iint u(x) u(y) / |x-y| |grad log u(x) - grad log u(y)|^2.
///
/// Radial: the spherical means of 1/|x-y| and cos(theta)/|x-y| are
/// 1/max(r,s) and min(r,s)/(3 max(r,s)^2). Vacuum nodes are skipped.
inline double entropy_production(const RadialField& u) {
  require_nonnegative(u, "entropy_production");
  const RadialGrid& g = u.grid();
  const std::size_t n = g.size();
  const std::vector<Vec3> grad = gradient(u);
  std::vector<double> vol(n), r(n), d(n), q(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    vol[i] = g.volume(i);
    r[i] = g.node(i);
    d[i] = grad[i][0];
    q[i] = u[i] > 0.0 ? d[i] * d[i] / u[i] : 0.0;
    w[i] = u[i] > 0.0 ? 1.0 : 0.0;
  }
  const double total = parallel::sum(
      n,
      [&](std::size_t i) {
        if (w[i] == 0.0) return 0.0;
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (w[j] == 0.0) continue;
          const double rmax = std::max(r[i], r[j]);
          const double rmin = std::min(r[i], r[j]);
          row += vol[j] * (u[j] * q[i] / rmax - d[i] * d[j] * rmin / (3.0 * rmax * rmax));
        }
        return vol[i] * row;
      },
      16);
  return total / (4.0 * std::numbers::pi);
}

/// Cartesian version on a block-averaged coarse grid with at most
/// `max_coarse` cells per axis; the self pair contributes zero.
inline double entropy_production(const CartesianField& u, std::size_t max_coarse = 24) {
  require_nonnegative(u, "entropy_production");
  const CartesianGrid3& g = u.grid();
  const std::size_t n = g.n_per_axis();
  std::size_t s = 1;
  while (n / s > max_coarse || n % s != 0) ++s;
  const std::size_t nc = n / s;
  const std::vector<Vec3> grad = gradient(u);
  const std::size_t Nc = nc * nc * nc;
  std::vector<double> cu(Nc, 0.0);
  std::vector<Vec3> cg(Nc, Vec3{0, 0, 0}), cx(Nc, Vec3{0, 0, 0});
  const double inv = 1.0 / static_cast<double>(s * s * s);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto [i, j, k] = g.unravel(idx);
    const std::size_t c = ((i / s) * nc + j / s) * nc + k / s;
    cu[c] += u[idx] * inv;
    const Vec3 x = g.position(idx);
    for (int a = 0; a < 3; ++a) {
      cg[c][a] += grad[idx][a] * inv;
      cx[c][a] += x[a] * inv;
    }
  }
  const double cvol = std::pow(g.spacing() * static_cast<double>(s), 3);
  // occupied coarse cells with their log-gradients; each unordered pair is summed once
  std::vector<double> pu;
  std::vector<Vec3> pl, px;
  for (std::size_t c = 0; c < Nc; ++c) {
    if (cu[c] <= 0.0) continue;
    pu.push_back(cu[c]);
    pl.push_back(Vec3{cg[c][0] / cu[c], cg[c][1] / cu[c], cg[c][2] / cu[c]});
    px.push_back(cx[c]);
  }
  const std::size_t P = pu.size();
  const double total = 2.0 * parallel::sum(
                                 P,
                                 [&](std::size_t i) {
                                   double row = 0.0;
                                   for (std::size_t j = i + 1; j < P; ++j) {
                                     const Vec3 dx{px[i][0] - px[j][0], px[i][1] - px[j][1], px[i][2] - px[j][2]};
                                     const Vec3 dl{pl[i][0] - pl[j][0], pl[i][1] - pl[j][1], pl[i][2] - pl[j][2]};
                                     row += pu[j] * dot(dl, dl) / norm(dx);
                                   }
                                   return pu[i] * row;
                                 },
                                 16);
  return total * cvol * cvol / (8.0 * std::numbers::pi);
}

// ---------------------------------------------------------------------------
// Mass-dependent lower bounds

/// kappa = (1/8 pi) m^{3/2} / (E^{1/2} + m^{1/2}).
inline double kappa(double mass, double E) {
  require(mass > 0.0, "kappa: mass must be positive");
  require(E > 0.0, "kappa: E must be positive");
  return std::pow(mass, 1.5) / (8.0 * std::numbers::pi * (std::sqrt(E) + std::sqrt(mass)));
}

struct KappaChain {
  double kappa;
  double radius;         ///< R = 2 sqrt(E / m)
  double mass_in_ball;   ///< int_{|x| < R} u
  double weighted_mass;  ///< int u / (1 + |x|)
  bool ball_holds;       ///< mass_in_ball >= m / 2
  bool kappa_holds;      ///< weighted_mass / pi >= kappa
};

template <Grid G>
KappaChain kappa_chain(const Field<G>& u) {
  const double m = mass(u);
  const double E = second_moment(u);
  const double k = kappa(m, E);
  const double R = 2.0 * std::sqrt(E / m);
  const G& g = u.grid();
  const double inside = quadrature(g, [&](std::size_t i) { return g.radius(i) < R ? u[i] : 0.0; });
  const double wm = integrate(u, Weight::gamma);
  return {k, R, inside, wm, inside >= 0.5 * m, wm / std::numbers::pi >= k};
}

/// min over nodes of a(x) - a_lower_bound(|x|, m, E).
template <Grid G>
double a_lower_bound_margin(const Field<G>& u, const Field<G>& a) {
  require_same_grid(u, a, "a_lower_bound_margin");
  const double m = mass(u);
  const double E = second_moment(u);
  const G& g = u.grid();
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i) worst = std::min(worst, a[i] - a_lower_bound(g.radius(i), m, E));
  return worst;
}

// ---------------------------------------------------------------------------
// Entropy-based a upper bound and entropy lower bound

/// theta(eps) = (3/2)(1 + 2 eps)/(3 + 2 eps), 0 < eps <= 3/2.
inline double entropy_theta(double eps) {
  require(eps > 0.0 && eps <= 1.5, "entropy_theta: eps must lie in (0, 3/2]");
  return 1.5 * (1.0 + 2.0 * eps) / (3.0 + 2.0 * eps);
}
/// p = 1 / theta(eps), in [1, 2).
inline double entropy_exponent(double eps) { return 1.0 / entropy_theta(eps); }

/// Right side of a^p <= C/(2-p) (1 + |x|)(1 - dH/dt / kappa), 1 <= p < 2.
inline double a_upper_bound_entropy(double p, double x_abs, double kappa_t, double dH_dt, double C) {
  require(p >= 1.0 && p < 2.0, "a_upper_bound_entropy: p must lie in [1, 2)");
  require(kappa_t > 0.0, "a_upper_bound_entropy: kappa must be positive");
  require(dH_dt <= 0.0, "a_upper_bound_entropy: dH/dt must be <= 0");
  return C / (2.0 - p) * (1.0 + x_abs) * (1.0 - dH_dt / kappa_t);
}

/// C_eps (1 + E)^{(1 - eps)/2}, 0 < eps < 2/5.
inline double entropy_lower_bound(double E, double eps, double C) {
  require(eps > 0.0 && eps < 0.4, "entropy_lower_bound: eps must lie in the open interval (0, 2/5)");
  return C * std::pow(1.0 + E, 0.5 * (1.0 - eps));
}

// ---------------------------------------------------------------------------
// Second-moment growth exponent

struct GrowthExponent {
  Rational exponent;  ///< 2p / (2p - 4 + eps)
  Rational xi;        ///< (2p - 3) / (2p - 4 + eps)
};

/// Exact exponents for 9/5 < p < 2 and 4 - 2p < eps < 2/5.
inline GrowthExponent moment_growth_exponent(Rational p, Rational eps) {
  if (!(Rational(9, 5) < p && p < Rational(2)))
    throw ParameterError("moment_growth_exponent: p must satisfy 9/5 < p < 2");
  if (!(Rational(4) - Rational(2) * p < eps && eps < Rational(2, 5)))
    throw ParameterError("moment_growth_exponent: eps must satisfy 4 - 2p < eps < 2/5");
  const Rational den = Rational(2) * p - Rational(4) + eps;
  return {Rational(2) * p / den, (Rational(2) * p - Rational(3)) / den};
}

struct GrowthExponentValue {
  double exponent;
  double xi;
};

inline GrowthExponentValue moment_growth_exponent(double p, double eps) {
  if (!(p > 1.8 && p < 2.0)) throw ParameterError("moment_growth_exponent: p must satisfy 9/5 < p < 2");
  if (!(eps > 4.0 - 2.0 * p && eps < 0.4))
    throw ParameterError("moment_growth_exponent: eps must satisfy 4 - 2p < eps < 2/5");
  const double den = 2.0 * p - 4.0 + eps;
  return {2.0 * p / den, (2.0 * p - 3.0) / den};
}

// ---------------------------------------------------------------------------
// Records

/// Constants for the bounds that are only known to exist. Defaults are the
/// suite maxima (rounded up to 3 digits) measured with `lndau calibrate` on
/// unit-mass radial Maxwellians, T in {0.5, 1, 2, 4}, n = 1024, t_end = 0.1.
struct BoundConstants {
  double a_ub_p = 1.5;   ///< exponent p in a^p <= C/(2-p)(1+|x|)(1 - dH/dt / kappa)
  double a_ub_C = 1.49e-3;
  double h_lb_eps = 0.3; ///< eps in -H <= C_eps (1+E)^{(1-eps)/2}
  double h_lb_C = 3.27;
  double e_ub_p = 1.9;   ///< (p, eps) of E <= C (1 + t^{2p/(2p-4+eps)})
  double e_ub_eps = 0.3;
  double e_ub_C = 6.01;
};

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  Vec3 first_moment{0.0, 0.0, 0.0};
  double E = 0.0;
  double H = 0.0;
  double D = 0.0;  ///< entropy production, -dH/dt
  double kappa = 0.0;
  double fisher = 0.0;  ///< int |grad sqrt u|^2 / (1 + |x|)
  double a_lb_margin = 0.0;
  double a_ub_margin = 0.0;
  double H_lb_margin = 0.0;
  double E_ub_margin = 0.0;
  double clipped_mass = 0.0;
  double two_int_ua = 0.0;  ///< 2 int u a, the instantaneous dE/dt
};

/// Evaluates every per-slice scalar. dH/dt inside the a-bound margin uses -D;
/// trajectory passes refine it with time differences.
template <Grid G>
DiagnosticsRecord compute_record(const SimState<G>& s, const BoundConstants& c) {
  DiagnosticsRecord r;
  const Field<G>& u = s.u;
  const Field<G>& a = s.a.a;
  const G& g = u.grid();
  r.t = s.t;
  r.mass = mass(u);
  r.first_moment = first_moment(u);
  r.E = second_moment(u);
  r.H = entropy(u);
  r.D = entropy_production(u);
  r.fisher = weighted_fisher(u);
  r.clipped_mass = s.clipped_mass;
  r.two_int_ua = 2.0 * quadrature(g, [&](std::size_t i) { return u[i] * a[i]; });
  if (r.mass > 0.0 && r.E > 0.0) {
    r.kappa = kappa(r.mass, r.E);
    r.a_lb_margin = a_lower_bound_margin(u, a);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double rhs = a_upper_bound_entropy(c.a_ub_p, g.radius(i), r.kappa, std::min(0.0, -r.D), c.a_ub_C);
      worst = std::min(worst, rhs - std::pow(a[i], c.a_ub_p));
    }
    r.a_ub_margin = worst;
    r.H_lb_margin = entropy_lower_bound(r.E, c.h_lb_eps, c.h_lb_C) + r.H;
    const double beta = moment_growth_exponent(c.e_ub_p, c.e_ub_eps).exponent;
    r.E_ub_margin = c.e_ub_C * (1.0 + std::pow(r.t, beta)) - r.E;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Evenness

/// True when u is even in each coordinate separately (to 1e-12 relative).
inline bool is_even(const CartesianField& u) {
  const CartesianGrid3& g = u.grid();
  const std::size_t n = g.n_per_axis();
  const double tol = 1e-12 * std::max(u.max(), 0.0);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto [i, j, k] = g.unravel(idx);
    if (std::abs(u[idx] - u[g.index(n - 1 - i, j, k)]) > tol) return false;
    if (std::abs(u[idx] - u[g.index(i, n - 1 - j, k)]) > tol) return false;
    if (std::abs(u[idx] - u[g.index(i, j, n - 1 - k)]) > tol) return false;
  }
  return true;
}
inline bool is_even(const RadialField&) { return true; }

// ---------------------------------------------------------------------------
// Trajectory-level checks

/// Delta H / Delta t + kappa * fisher between two consecutive slices
/// (kappa * fisher averaged over the endpoints). Must be <= tol.
template <Grid G>
double entropy_inequality_residual(const SimState<G>& s0, const SimState<G>& s1) {
  if (!is_even(s0.u) || !is_even(s1.u))
    throw ParameterError("entropy_inequality_residual: requires even data (the cross term only vanishes for even u)");
  const double dt = s1.t - s0.t;
  require(dt > 0.0, "entropy_inequality_residual: slices must be strictly ordered in time");
  auto kf = [](const Field<G>& u) {
    const double m = mass(u);
    if (m <= 0.0) return 0.0;
    return kappa(m, second_moment(u)) * weighted_fisher(u);
  };
  return (entropy(s1.u) - entropy(s0.u)) / dt + 0.5 * (kf(s0.u) + kf(s1.u));
}

/// dH/dt at each slice: centered differences inside, one-sided at the ends.
inline std::vector<double> time_derivative(const std::vector<double>& t, const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
    d[i] = (v[hi] - v[lo]) / (t[hi] - t[lo]);
  }
  return d;
}

template <Grid G>
std::vector<double> entropy_rate(const Trajectory<G>& traj) {
  std::vector<double> t, h;
  for (const auto& s : traj) {
    t.push_back(s.t);
    h.push_back(entropy(s.u));
  }
  return time_derivative(t, h);
}

struct CalibrationResult {
  double C = 0.0;  ///< smallest constant that makes the bound hold on the suite
  std::size_t samples = 0;
};

/// Smallest C with a^p <= C/(2-p)(1+|x|)(1 - dH/dt/kappa) over all nodes and slices.
template <Grid G>
CalibrationResult calibrate_a_upper(const std::vector<Trajectory<G>>& suite, double p) {
  CalibrationResult out;
  for (const auto& traj : suite) {
    const auto rate = entropy_rate(traj);
    for (std::size_t s = 0; s < traj.size(); ++s) {
      const auto& st = traj[s];
      const double k = kappa(mass(st.u), second_moment(st.u));
      const double unit = a_upper_bound_entropy(p, 0.0, k, std::min(0.0, rate[s]), 1.0);  // (1 - dH/dt/kappa)/(2-p)
      const G& g = st.u.grid();
      for (std::size_t i = 0; i < g.size(); ++i) {
        out.C = std::max(out.C, std::pow(st.a.a[i], p) / (unit * (1.0 + g.radius(i))));
        ++out.samples;
      }
    }
  }
  return out;
}

/// Smallest C_eps with -H <= C_eps (1 + E)^{(1-eps)/2} over all slices.
template <Grid G>
CalibrationResult calibrate_h_lower(const std::vector<Trajectory<G>>& suite, double eps) {
  CalibrationResult out;
  for (const auto& traj : suite)
    for (const auto& st : traj) {
      out.C = std::max(out.C, -entropy(st.u) / entropy_lower_bound(second_moment(st.u), eps, 1.0));
      ++out.samples;
    }
  return out;
}

/// Smallest C with E(t) <= C (1 + t^beta) over all slices.
template <Grid G>
CalibrationResult calibrate_e_upper(const std::vector<Trajectory<G>>& suite, double p, double eps) {
  CalibrationResult out;
  const double beta = moment_growth_exponent(p, eps).exponent;
  for (const auto& traj : suite)
    for (const auto& st : traj) {
      out.C = std::max(out.C, second_moment(st.u) / (1.0 + std::pow(st.t, beta)));
      ++out.samples;
    }
  return out;
}

struct BoundViolations {
  std::size_t a_lower = 0;
  std::size_t kappa_chain = 0;
  std::size_t a_upper = 0;
  std::size_t h_lower = 0;
  std::size_t checked_slices = 0;
  double worst_a_lower_margin = std::numeric_limits<double>::infinity();
  double worst_a_upper_margin = std::numeric_limits<double>::infinity();
  double worst_h_lower_margin = std::numeric_limits<double>::infinity();
};

/// Counts slices where a bound fails, using frozen constants.
template <Grid G>
BoundViolations check_bounds(const Trajectory<G>& traj, const BoundConstants& c) {
  BoundViolations v;
  const auto rate = entropy_rate(traj);
  for (std::size_t s = 0; s < traj.size(); ++s) {
    const auto& st = traj[s];
    const auto chain = kappa_chain(st.u);
    if (!chain.ball_holds || !chain.kappa_holds) ++v.kappa_chain;
    const double lb = a_lower_bound_margin(st.u, st.a.a);
    v.worst_a_lower_margin = std::min(v.worst_a_lower_margin, lb);
    if (lb < 0.0) ++v.a_lower;
    const G& g = st.u.grid();
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double rhs = a_upper_bound_entropy(c.a_ub_p, g.radius(i), chain.kappa, std::min(0.0, rate[s]), c.a_ub_C);
      worst = std::min(worst, rhs - std::pow(st.a.a[i], c.a_ub_p));
    }
    v.worst_a_upper_margin = std::min(v.worst_a_upper_margin, worst);
    if (worst < 0.0) ++v.a_upper;
    const double hm = entropy_lower_bound(second_moment(st.u), c.h_lb_eps, c.h_lb_C) + entropy(st.u);
    v.worst_h_lower_margin = std::min(v.worst_h_lower_margin, hm);
    if (hm < 0.0) ++v.h_lower;
    ++v.checked_slices;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Conditional decay-rate monitor

struct RateMonitorReport {
  double s1 = 0.0, s2 = 0.0, R = 0.0;
  double C_u = 0.0;  ///< smallest C with sup_{B_R} u <= C (1/t + 1)^{s1}
  double C_a = 0.0;  ///< smallest C with sup a <= C (1/t + 1)^{s2}
  bool consistent = false;
  std::size_t slices = 0;
};

template <Grid G>
RateMonitorReport conditional_rate_monitor(const Trajectory<G>& traj, double s1, double s2, double R) {
  require(s1 > 1.0, "conditional_rate_monitor: s1 must exceed 1");
  require(s2 > 1.0 / 3.0, "conditional_rate_monitor: s2 must exceed 1/3");
  require(R > 0.0, "conditional_rate_monitor: R must be positive");
  if (traj.size() < 4) throw ParameterError("conditional_rate_monitor: need at least 4 slices");
  RateMonitorReport rep{s1, s2, R};
  for (const auto& st : traj) {
    const G& g = st.u.grid();
    double su = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g.radius(i) <= R) su = std::max(su, st.u[i]);
    const double sa = st.a.a.max();
    if (st.t <= 0.0) {
      // (1/t + 1)^s is infinite at t = 0: any finite value is admissible.
      if (!std::isfinite(su) || !std::isfinite(sa)) return rep;
      continue;
    }
    const double base = 1.0 / st.t + 1.0;
    rep.C_u = std::max(rep.C_u, su / std::pow(base, s1));
    rep.C_a = std::max(rep.C_a, sa / std::pow(base, s2));
  }
  rep.slices = traj.size();
  rep.consistent = std::isfinite(rep.C_u) && std::isfinite(rep.C_a);
  return rep;
}

}  // namespace landau
