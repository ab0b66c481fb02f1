#pragma once

// Radial supersolution checks: a[u] Delta g + u g < 0, and monitoring of
// u <= g along a trajectory.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "landau/errors.hpp"
#include "landau/field.hpp"
#include "landau/potential.hpp"
#include "landau/state.hpp"
#include "landau/stencil.hpp"

namespace landau {

/// True iff u(r_{i+1}) <= u(r_i) + 1e-12 max u for all i.
inline bool monotone_radial_check(const RadialField& u) {
  const double tol = 1e-12 * std::max(0.0, u.max());
  for (std::size_t i = 0; i + 1 < u.size(); ++i)
    if (u[i + 1] > u[i] + tol) return false;
  return true;
}

/// Candidate barrier g with its integrability class.
struct BarrierSpec {
  RadialField g;
  double p_weak;

  BarrierSpec(RadialField field, double p) : g(std::move(field)), p_weak(p) {
    require(p > 1.5, "BarrierSpec: p_weak must exceed 3/2");
    require_finite(g, "BarrierSpec");
    require(g.min() > 0.0, "BarrierSpec: g must be strictly positive");
    require(monotone_radial_check(g), "BarrierSpec: g must be radially nonincreasing");
    require(std::isfinite(lp_weak_norm(g, p)), "BarrierSpec: g has no finite weak-L^p norm");
  }
};

struct BarrierResult {
  RadialField residual;
  double max = 0.0;
  double argmax_r = 0.0;
  double min = 0.0;
  bool pass = false;  ///< max < 0 strictly
};

/// a[u] Delta_h g + u g with a solved from u; PASS iff every node is strictly negative.
inline BarrierResult barrier_residual(const RadialField& u, const RadialField& g) {
  require_same_grid(u, g, "barrier_residual");
  require_nonnegative(u, "barrier_residual");
  require_finite(g, "barrier_residual");
  const RadialField a = solve_poisson_radial(u).a;
  const RadialField lap = laplacian(g, OuterBoundary::extrapolate);
  RadialField res(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) res[i] = a[i] * lap[i] + u[i] * g[i];
  BarrierResult out{res};
  out.max = -std::numeric_limits<double>::infinity();
  out.min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < res.size(); ++i) {
    if (res[i] > out.max) {
      out.max = res[i];
      out.argmax_r = u.grid().node(i);
    }
    out.min = std::min(out.min, res[i]);
  }
  out.pass = out.max < 0.0;
  return out;
}

inline BarrierResult barrier_residual(const CartesianField&, const CartesianField&) {
  throw ParameterError("barrier_residual: requires radial fields");
}

struct ComparisonReport {
  bool clean = true;
  std::optional<double> first_violation_t;
  std::size_t first_violation_slice = 0;
  double worst_margin = std::numeric_limits<double>::infinity();  ///< min over slices/nodes of g - u
  std::size_t slices = 0;
};

/// Checks u(., t) <= g at every slice. Requires u_0 < g strictly.
inline ComparisonReport comparison_monitor(const Trajectory<RadialGrid>& traj, const RadialField& g) {
  require(!traj.empty(), "comparison_monitor: empty trajectory");
  const RadialField& u0 = traj.front().u;
  require_same_grid(u0, g, "comparison_monitor");
  for (std::size_t i = 0; i < u0.size(); ++i)
    if (!(u0[i] < g[i])) throw ParameterError("comparison_monitor: precondition u_0 < g violated at r = " +
                                              std::to_string(u0.grid().node(i)));
  ComparisonReport rep;
  for (std::size_t s = 0; s < traj.size(); ++s) {
    const RadialField& u = traj[s].u;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double m = g[i] - u[i];
      rep.worst_margin = std::min(rep.worst_margin, m);
      if (m < 0.0 && rep.clean) {
        rep.clean = false;
        rep.first_violation_t = traj[s].t;
        rep.first_violation_slice = s;
      }
    }
    ++rep.slices;
  }
  return rep;
}

}  // namespace landau
