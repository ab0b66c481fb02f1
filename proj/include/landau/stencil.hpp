#pragma once

// Finite-difference gradients and Laplacians on both grid kinds.
//
// Radial grids store the radial derivative in component 0 of the gradient,
// so dot products of gradients of radial functions are f' g'.

#include <cmath>
#include <cstddef>
#include <vector>

#include "landau/field.hpp"

namespace landau {

enum class OuterBoundary {
  zero_flux,    ///< ghost value equals the boundary cell
  extrapolate,  ///< linear extrapolation into the ghost cell
};

inline std::vector<Vec3> gradient(const RadialField& f) {
  const RadialGrid& g = f.grid();
  const std::size_t n = g.size();
  const double h = g.spacing();
  std::vector<Vec3> out(n, Vec3{0.0, 0.0, 0.0});
  parallel::for_each_index(n, [&](std::size_t i) {
    double d;
    if (i == 0) {
      d = (f[1] - f[0]) / (2.0 * h);  // even reflection f(-r0) = f(r0)
    } else if (i + 1 == n) {
      d = (f[n - 1] - f[n - 2]) / h;
    } else {
      d = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    out[i][0] = d;
  });
  return out;
}

inline std::vector<Vec3> gradient(const CartesianField& f) {
  const CartesianGrid3& g = f.grid();
  const std::size_t n = g.n_per_axis();
  const double h = g.spacing();
  std::vector<Vec3> out(g.size());
  parallel::for_each_index(g.size(), [&](std::size_t idx) {
    const auto ijk = g.unravel(idx);
    const std::size_t stride[3] = {n * n, n, 1};
    for (int a = 0; a < 3; ++a) {
      const std::size_t c = ijk[a];
      double d;
      if (c == 0) {
        d = (f[idx + stride[a]] - f[idx]) / h;
      } else if (c + 1 == n) {
        d = (f[idx] - f[idx - stride[a]]) / h;
      } else {
        d = (f[idx + stride[a]] - f[idx - stride[a]]) / (2.0 * h);
      }
      out[idx][a] = d;
    }
  });
  return out;
}

/// Conservative radial Laplacian (1/r^2) d/dr (r^2 d/dr) with even reflection at r = 0.
inline RadialField laplacian(const RadialField& f, OuterBoundary outer = OuterBoundary::zero_flux) {
  const RadialGrid& g = f.grid();
  const std::size_t n = g.size();
  const double h = g.spacing();
  RadialField out(g);
  parallel::for_each_index(n, [&](std::size_t i) {
    const double r = g.node(i);
    const double rin = g.face(i);
    const double rout = g.face(i + 1);
    const double fin = i == 0 ? f[0] : f[i - 1];
    double fout;
    if (i + 1 < n) {
      fout = f[i + 1];
    } else {
      fout = outer == OuterBoundary::zero_flux ? f[i] : 2.0 * f[i] - f[i - 1];
    }
    const double flux_out = rout * rout * (fout - f[i]) / h;
    const double flux_in = rin * rin * (f[i] - fin) / h;
    out[i] = (flux_out - flux_in) / (r * r * h);
  });
  return out;
}

/// Seven-point Laplacian with zero-flux walls.
inline CartesianField laplacian(const CartesianField& f, OuterBoundary outer = OuterBoundary::zero_flux) {
  const CartesianGrid3& g = f.grid();
  const std::size_t n = g.n_per_axis();
  const double h2 = g.spacing() * g.spacing();
  CartesianField out(g);
  parallel::for_each_index(g.size(), [&](std::size_t idx) {
    const auto ijk = g.unravel(idx);
    const std::size_t stride[3] = {n * n, n, 1};
    double acc = 0.0;
    for (int a = 0; a < 3; ++a) {
      const std::size_t c = ijk[a];
      const double fc = f[idx];
      double lo, hi;
      if (c == 0) {
        hi = f[idx + stride[a]];
        lo = outer == OuterBoundary::zero_flux ? fc : 2.0 * fc - hi;
      } else if (c + 1 == n) {
        lo = f[idx - stride[a]];
        hi = outer == OuterBoundary::zero_flux ? fc : 2.0 * fc - lo;
      } else {
        lo = f[idx - stride[a]];
        hi = f[idx + stride[a]];
      }
      acc += hi - 2.0 * fc + lo;
    }
    out[idx] = acc / h2;
  });
  return out;
}

/// int |grad sqrt f|^2 / (1 + |x|) dx, centered differences on sqrt f; vacuum nodes contribute 0.
template <Grid G>
double weighted_fisher(const Field<G>& f) {
  require_nonnegative(f, "weighted_fisher");
  const Field<G> root = f.map([](double v) { return std::sqrt(v); });
  const std::vector<Vec3> grad = gradient(root);
  const G& g = f.grid();
  return quadrature(g, [&](std::size_t i) {
    if (f[i] <= 0.0) return 0.0;
    return dot(grad[i], grad[i]) / (1.0 + g.radius(i));
  });
}

}  // namespace landau
