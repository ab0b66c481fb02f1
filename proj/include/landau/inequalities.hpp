#pragma once

// Numerical probes of the functional inequalities behind the conditional
// regularity theory: eps-Poincare, the nonlocal weighted Poincare (GKS)
// inequality, a weighted Sobolev inequality and the global L^p L^p estimates.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <sstream>
#include <limits>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "landau/cutoff.hpp"
#include "landau/diagnostics.hpp"
#include "landau/field.hpp"
#include "landau/potential.hpp"
#include "landau/rational.hpp"
#include "landau/state.hpp"
#include "landau/stencil.hpp"

namespace landau {

/// One probe result; serializes as {name, params, lhs, rhs, ratio, verdict}.
struct InequalityReport {
  std::string name;
  std::vector<std::pair<std::string, double>> params;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  std::string verdict;  ///< PASS, FAIL or RECORD (no contract, value recorded)
};

/// Trapezoid rule over (t_i, v_i).
inline double trapezoid(const std::vector<double>& t, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) s += 0.5 * (t[i] - t[i - 1]) * (v[i] + v[i - 1]);
  return s;
}

template <Grid G>
std::vector<double> slice_times(const Trajectory<G>& traj) {
  std::vector<double> t;
  t.reserve(traj.size());
  for (const auto& s : traj) t.push_back(s.t);
  return t;
}

// ---------------------------------------------------------------------------
// Test functions

namespace detail {
inline std::string short_num(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}
}  // namespace detail

template <Grid G>
struct TestFunction {
  std::string name;
  Field<G> phi;
  double extent;  ///< radius of the ball outside which phi is negligible
};

template <Grid G>
using TestFunctionFamily = std::vector<TestFunction<G>>;

/// Gaussians of several widths, smooth bumps, shells and polynomial-times-cutoff
/// members. Cartesian grids also get off-center Gaussians and tensor products.
template <Grid G>
TestFunctionFamily<G> default_family(const G& grid) {
  TestFunctionFamily<G> fam;
  auto add = [&](std::string name, double extent, auto fn) {
    fam.push_back({std::move(name), Field<G>::sample(grid, fn), extent});
  };
  for (double w : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0})
    add("gaussian_w" + detail::short_num(w), 4.0 * w, [w](const Vec3& x) { return std::exp(-dot(x, x) / (2.0 * w * w)); });
  for (double R : {0.5, 1.0, 2.0, 4.0}) {
    const RadialCutoff eta(0.5 * R, R);
    add("bump_R" + detail::short_num(R), R, [eta](const Vec3& x) { return eta(norm(x)); });
  }
  for (double r0 : {1.0, 2.0, 3.0})
    add("shell_r" + detail::short_num(r0), r0 + 2.0, [r0](const Vec3& x) {
      const double d = norm(x) - r0;
      return std::exp(-d * d / 0.5);
    });
  {
    const RadialCutoff eta(1.5, 3.0);
    add("poly_1+r2_bump3", 3.0, [eta](const Vec3& x) { return (1.0 + dot(x, x)) * eta(norm(x)); });
    const RadialCutoff eta2(1.0, 2.0);
    add("poly_r2_bump2", 2.0, [eta2](const Vec3& x) { return dot(x, x) * eta2(norm(x)); });
  }
  if constexpr (std::is_same_v<G, CartesianGrid3>) {
    for (const Vec3 c : {Vec3{1.0, 0.0, 0.0}, Vec3{0.0, -1.0, 1.0}, Vec3{1.5, 1.5, 0.0}})
      add("gaussian_offcenter", norm(c) + 2.0, [c](const Vec3& x) {
        const Vec3 d{x[0] - c[0], x[1] - c[1], x[2] - c[2]};
        return std::exp(-dot(d, d) / 0.5);
      });
    const RadialCutoff eta(1.5, 3.0);
    add("tensor_xy_bump3", 3.0, [eta](const Vec3& x) { return x[0] * x[1] * eta(norm(x)); });
    add("tensor_x_bump3", 3.0, [eta](const Vec3& x) { return x[0] * eta(norm(x)); });
  }
  return fam;
}

// ---------------------------------------------------------------------------
// eps-Poincare

struct EpsPoincareResult {
  double C_needed = -std::numeric_limits<double>::infinity();
  std::string argmax;
  std::size_t members_used = 0;
};

/// Lower estimate of the best C_eps in
///   int u phi^2 <= eps int a |grad phi|^2 + C_eps int phi^2
/// over a finite family. With a finite R only members supported in B_R count.
template <Grid G>
EpsPoincareResult eps_poincare_constant(const Field<G>& u, const Field<G>& a, double eps,
                                        const TestFunctionFamily<G>& fam,
                                        double R = std::numeric_limits<double>::infinity()) {
  require(eps > 0.0, "eps_poincare_constant: eps must be positive");
  require(!fam.empty(), "eps_poincare_constant: empty test-function family");
  require_same_grid(u, a, "eps_poincare_constant");
  const G& g = u.grid();
  EpsPoincareResult res;
  for (const auto& m : fam) {
    if (m.extent > R) continue;
    const double l2 = quadrature(g, [&](std::size_t i) { return m.phi[i] * m.phi[i]; });
    if (!(l2 > 0.0)) continue;
    const auto grad = gradient(m.phi);
    const double up = quadrature(g, [&](std::size_t i) { return u[i] * m.phi[i] * m.phi[i]; });
    const double ag = quadrature(g, [&](std::size_t i) { return a[i] * dot(grad[i], grad[i]); });
    const double c = (up - eps * ag) / l2;
    ++res.members_used;
    if (c > res.C_needed) {
      res.C_needed = c;
      res.argmax = m.name;
    }
  }
  if (res.members_used == 0) throw ParameterError("eps_poincare_constant: no usable family member");
  return res;
}

// ---------------------------------------------------------------------------
// GKS inequality

/// int u^{p+1} / (((p+1)/p)^2 int a |grad u^{p/2}|^2). 0 for u = 0; +inf when
/// only the denominator vanishes.
template <Grid G>
double gks_ratio(const Field<G>& u, const Field<G>& a, double p) {
  require(p > 0.0, "gks_ratio: p must be positive");
  require_nonnegative(u, "gks_ratio");
  require_same_grid(u, a, "gks_ratio");
  const G& g = u.grid();
  const double num = quadrature(g, [&](std::size_t i) { return std::pow(u[i], p + 1.0); });
  const Field<G> w = u.map([p](double v) { return std::pow(v, 0.5 * p); });
  const auto grad = gradient(w);
  const double c = (p + 1.0) / p;
  const double den = c * c * quadrature(g, [&](std::size_t i) { return a[i] * dot(grad[i], grad[i]); });
  if (num == 0.0) return 0.0;
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return num / den;
}

// ---------------------------------------------------------------------------
// Weighted Sobolev inequality

/// (iint phi^q a)^{2/q} / (iint a |grad phi|^2 + sup_t int phi^2) over the
/// trajectory; phi_of(state) supplies phi at each slice.
template <Grid G, class PhiFn>
  requires std::invocable<PhiFn&, const SimState<G>&>
InequalityReport weighted_sobolev_ratio(const Trajectory<G>& traj, PhiFn&& phi_of, double q) {
  if (!(q > 1.0 && q < 10.0 / 3.0)) throw ParameterError("weighted_sobolev_ratio: q must lie in the open interval (1, 10/3)");
  require(traj.size() >= 2, "weighted_sobolev_ratio: need at least two slices");
  std::vector<double> t = slice_times(traj), fq, ag;
  double sup_l2 = 0.0;
  for (const auto& s : traj) {
    const Field<G> phi = phi_of(s);
    const G& g = phi.grid();
    const Field<G>& a = s.a.a;
    const auto grad = gradient(phi);
    fq.push_back(quadrature(g, [&](std::size_t i) { return std::pow(std::abs(phi[i]), q) * a[i]; }));
    ag.push_back(quadrature(g, [&](std::size_t i) { return a[i] * dot(grad[i], grad[i]); }));
    sup_l2 = std::max(sup_l2, quadrature(g, [&](std::size_t i) { return phi[i] * phi[i]; }));
  }
  InequalityReport r;
  r.name = "weighted_sobolev";
  r.params = {{"q", q}, {"t0", t.front()}, {"t1", t.back()}};
  r.lhs = std::pow(trapezoid(t, fq), 2.0 / q);
  r.rhs = trapezoid(t, ag) + sup_l2;
  r.ratio = r.lhs == 0.0 ? 0.0 : (r.rhs == 0.0 ? std::numeric_limits<double>::infinity() : r.lhs / r.rhs);
  r.verdict = std::isfinite(r.ratio) ? "RECORD" : "FAIL";
  return r;
}

template <Grid G>
InequalityReport weighted_sobolev_ratio(const Trajectory<G>& traj, const Field<G>& phi, double q) {
  return weighted_sobolev_ratio(traj, [&](const SimState<G>&) { return phi; }, q);
}

// ---------------------------------------------------------------------------
// Global L^p L^p estimates

struct L1L3Report {
  double value = 0.0;           ///< int_0^T ||u||_{L^3(gamma^3 dx)} dt
  double fisher_plus_mass = 0.0; ///< int_0^T int (|grad sqrt u|^2 gamma + u)
  double ratio = 0.0;           ///< value / fisher_plus_mass, a lower estimate of C
};

template <Grid G>
L1L3Report l1l3_estimate(const Trajectory<G>& traj) {
  require(traj.size() >= 2, "l1l3_estimate: need at least two slices");
  std::vector<double> t = slice_times(traj), n3, fm;
  for (const auto& s : traj) {
    n3.push_back(lp_norm(s.u, 3.0, Weight::gamma_cubed));
    fm.push_back(weighted_fisher(s.u) + mass(s.u));
  }
  L1L3Report r;
  r.value = trapezoid(t, n3);
  r.fisher_plus_mass = trapezoid(t, fm);
  r.ratio = r.fisher_plus_mass > 0.0 ? r.value / r.fisher_plus_mass : 0.0;
  return r;
}

struct L53Slice {
  double t;
  double lhs;     ///< int u^{5/3}
  double holder;  ///< (int u (1+|x|)^{3/2})^{2/3} (int u^3 (1+|x|)^{-3})^{1/3}
  double stated;  ///< (int u (1+|x|)^2)^{3/5} (int u^3 (1+|x|)^{-3})^{1/3}
};

struct L53Report {
  double value = 0.0;  ///< int_0^T int u^{5/3}
  std::vector<L53Slice> slices;
  std::size_t holder_violations = 0;
  std::size_t stated_violations = 0;
};

template <Grid G>
L53Slice l53_slice(const Field<G>& u, double t = 0.0) {
  const G& g = u.grid();
  const double lhs = quadrature(g, [&](std::size_t i) { return std::pow(u[i], 5.0 / 3.0); });
  const double m32 = quadrature(g, [&](std::size_t i) { return u[i] * std::pow(1.0 + g.radius(i), 1.5); });
  const double m2 = quadrature(g, [&](std::size_t i) { return u[i] * std::pow(1.0 + g.radius(i), 2.0); });
  const double c3 = quadrature(g, [&](std::size_t i) { return std::pow(u[i], 3.0) / std::pow(1.0 + g.radius(i), 3.0); });
  return {t, lhs, std::pow(m32, 2.0 / 3.0) * std::cbrt(c3), std::pow(m2, 0.6) * std::cbrt(c3)};
}

template <Grid G>
L53Report l53_estimate(const Trajectory<G>& traj) {
  require(traj.size() >= 2, "l53_estimate: need at least two slices");
  L53Report r;
  std::vector<double> t = slice_times(traj), v;
  constexpr double tol = 1e-12;
  for (const auto& s : traj) {
    const L53Slice sl = l53_slice(s.u, s.t);
    if (sl.lhs > sl.holder * (1.0 + tol)) ++r.holder_violations;
    if (sl.lhs > sl.stated * (1.0 + tol)) ++r.stated_violations;
    v.push_back(sl.lhs);
    r.slices.push_back(sl);
  }
  r.value = trapezoid(t, v);
  return r;
}

// ---------------------------------------------------------------------------
// Gain of integrability

/// alpha(n) = (n + 1)/(3n + 2), the sup-a time exponent.
inline Rational gain_alpha(std::int64_t n) {
  require(n >= 0, "gain_alpha: n must be >= 0");
  return Rational(n + 1, 3 * n + 2);
}

struct GainReport {
  std::int64_t n = 0;
  double p = 0.0;            ///< 5/3 + n
  double T = 0.0;
  double sup_lp = 0.0;       ///< sup_{t in [T/4, T]} int u^p
  double l53 = 0.0;          ///< int_0^T int u^{5/3}
  double shape = 0.0;        ///< 2^{n(n+1)} (1/T + 1)^{n+1} int_0^T int u^{5/3}
  double C = 0.0;            ///< sup_lp / shape
  Rational alpha;            ///< (n+1)/(3n+2)
  double lp_exponent = 0.0;  ///< (n+1)/(5/3+n)
  std::size_t chain_violations = 0;  ///< slices with max a > 4 m^{..} ||u||_p^{..}
  std::size_t slices = 0;
};

template <Grid G>
GainReport gain_integrability_bound(const Trajectory<G>& traj, std::int64_t n) {
  require(n >= 0, "gain_integrability_bound: n must be >= 0");
  require(traj.size() >= 2, "gain_integrability_bound: need at least two slices");
  GainReport r;
  r.n = n;
  r.p = 5.0 / 3.0 + static_cast<double>(n);
  r.T = traj.back().t;
  require(r.T > 0.0, "gain_integrability_bound: trajectory must cover a positive time span");
  r.alpha = gain_alpha(n);
  r.lp_exponent = static_cast<double>(n + 1) / r.p;
  std::vector<double> t = slice_times(traj), v;
  for (const auto& s : traj) {
    const G& g = s.u.grid();
    const double h = g.spacing();
    const double ip = quadrature(g, [&](std::size_t i) { return std::pow(s.u[i], r.p); });
    v.push_back(quadrature(g, [&](std::size_t i) { return std::pow(s.u[i], 5.0 / 3.0); }));
    if (s.t >= 0.25 * r.T) {
      if (std::pow(s.u.max(), r.p) * h * h * h > 0.1 * ip)
        throw ParameterError("gain_integrability_bound: n too large for resolution (u^{5/3+n} under-resolved)");
      r.sup_lp = std::max(r.sup_lp, ip);
    }
    const double m = mass(s.u);
    const double bound = a_upper_bound_lp(m, std::pow(ip, 1.0 / r.p), r.p).bound;
    if (s.a.a.max() > bound) ++r.chain_violations;
    ++r.slices;
  }
  r.l53 = trapezoid(t, v);
  r.shape = std::pow(2.0, static_cast<double>(n * (n + 1))) * std::pow(1.0 / r.T + 1.0, static_cast<double>(n + 1)) * r.l53;
  r.C = r.shape > 0.0 ? r.sup_lp / r.shape : 0.0;
  return r;
}

}  // namespace landau
