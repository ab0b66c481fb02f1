#pragma once

// Grid-sampled scalar fields and the quadrature primitives built on them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "landau/errors.hpp"
#include "landau/grid.hpp"
#include "landau/parallel.hpp"

namespace landau {

/// Samples of a scalar quantity at the nodes of a grid. Value type; treat as
/// an immutable snapshot once built.
template <Grid G>
class Field {
 public:
  using grid_type = G;

  explicit Field(G grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}
  Field(G grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw InputError("Field: value count does not match grid size");
  }

  /// Samples fn(position) at every node; fn receives the node's Vec3 position.
  template <class Fn>
  static Field sample(const G& grid, Fn&& fn) {
    Field f(grid);
    parallel::for_each_index(grid.size(), [&](std::size_t i) { f.values_[i] = fn(grid.position(i)); });
    return f;
  }
  /// Samples fn(|x|) at every node.
  template <class Fn>
  static Field sample_radial(const G& grid, Fn&& fn) {
    Field f(grid);
    parallel::for_each_index(grid.size(), [&](std::size_t i) { f.values_[i] = fn(grid.radius(i)); });
    return f;
  }

  const G& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  const std::vector<double>& data() const { return values_; }

  double max() const { return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end()); }
  double min() const { return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end()); }

  Field& operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
  }
  friend Field operator*(double c, Field f) { return f *= c; }
  Field& operator+=(const Field& o) {
    if (!(grid_ == o.grid_)) throw InputError("Field: grid mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }

  /// Pointwise map into a new field on the same grid.
  template <class Fn>
  Field map(Fn&& fn) const {
    Field out(grid_);
    for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = fn(values_[i]);
    return out;
  }

 private:
  G grid_;
  std::vector<double> values_;
};

using RadialField = Field<RadialGrid>;
using CartesianField = Field<CartesianGrid3>;

template <Grid G>
void require_finite(const Field<G>& f, const char* who) {
  for (double v : f.values())
    if (!std::isfinite(v)) throw InputError(std::string(who) + ": non-finite value in field");
}

template <Grid G>
void require_nonnegative(const Field<G>& f, const char* who) {
  for (double v : f.values()) {
    if (!std::isfinite(v)) throw InputError(std::string(who) + ": non-finite value in field");
    if (v < 0.0) throw InputError(std::string(who) + ": negative value in density field");
  }
}

template <Grid G>
void require_same_grid(const Field<G>& a, const Field<G>& b, const char* who) {
  if (!(a.grid() == b.grid())) throw InputError(std::string(who) + ": fields live on different grids");
}

// ---------------------------------------------------------------------------
// Weights

/// gamma(x) = (1 + |x|)^{-1} and its cube.
enum class Weight { unit, gamma, gamma_cubed };

inline double weight_at(Weight w, double r) {
  switch (w) {
    case Weight::unit:
      return 1.0;
    case Weight::gamma:
      return 1.0 / (1.0 + r);
    case Weight::gamma_cubed: {
      const double g = 1.0 / (1.0 + r);
      return g * g * g;
    }
  }
  return 1.0;
}

// ---------------------------------------------------------------------------
// Quadrature

/// Sum over nodes of term(i) * cell volume, in a fixed reduction order.
template <Grid G, class Term>
double quadrature(const G& grid, Term&& term) {
  return parallel::sum(grid.size(), [&](std::size_t i) { return term(i) * grid.volume(i); });
}

template <Grid G>
double integrate(const Field<G>& f, Weight w = Weight::unit) {
  require_finite(f, "integrate");
  const G& g = f.grid();
  return quadrature(g, [&](std::size_t i) { return f[i] * weight_at(w, g.radius(i)); });
}

template <Grid G>
double mass(const Field<G>& f) {
  return integrate(f, Weight::unit);
}

/// E = int |x|^2/2 f.
template <Grid G>
double second_moment(const Field<G>& f) {
  require_finite(f, "second_moment");
  const G& g = f.grid();
  return quadrature(g, [&](std::size_t i) {
    const double r = g.radius(i);
    return 0.5 * r * r * f[i];
  });
}

/// int x f. Identically zero on radial grids.
inline Vec3 first_moment(const RadialField& f) {
  require_finite(f, "first_moment");
  return {0.0, 0.0, 0.0};
}

/// int x f, summed over point-mirror pairs so that fields with
/// f(-x) == f(x) give exactly zero.
inline Vec3 first_moment(const CartesianField& f) {
  require_finite(f, "first_moment");
  const CartesianGrid3& g = f.grid();
  const std::size_t N = g.size();
  const double vol = g.volume(0);
  Vec3 out{};
  for (int axis = 0; axis < 3; ++axis) {
    out[axis] = vol * parallel::sum(N / 2, [&](std::size_t idx) {
      return g.position(idx)[axis] * (f[idx] - f[N - 1 - idx]);
    });
  }
  return out;
}

using MomentValue = std::variant<double, Vec3>;

/// order 0: mass, 1: first moment vector, 2: E = int |x|^2/2 f.
template <Grid G>
MomentValue moment(const Field<G>& f, int order) {
  switch (order) {
    case 0:
      return mass(f);
    case 1:
      return first_moment(f);
    case 2:
      return second_moment(f);
    default:
      throw ParameterError("moment: order must be 0, 1 or 2");
  }
}

template <Grid G>
double lp_norm(const Field<G>& f, double p, Weight w = Weight::unit) {
  require(p >= 1.0, "lp_norm: p must be >= 1");
  require_finite(f, "lp_norm");
  const G& g = f.grid();
  const double s = quadrature(g, [&](std::size_t i) {
    const double a = std::abs(f[i]);
    return (p == 1.0 ? a : std::pow(a, p)) * weight_at(w, g.radius(i));
  });
  return p == 1.0 ? s : std::pow(s, 1.0 / p);
}

/// sup over a log-spaced ladder of levels lambda of lambda |{f >= lambda}|^{1/p}.
template <Grid G>
double lp_weak_norm(const Field<G>& f, double p, std::size_t levels = 64) {
  require(p > 0.0, "lp_weak_norm: p must be positive");
  require(levels >= 2, "lp_weak_norm: need at least two levels");
  require_nonnegative(f, "lp_weak_norm");
  const G& g = f.grid();
  std::vector<std::pair<double, double>> pos;  // (value, volume)
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] > 0.0) pos.emplace_back(f[i], g.volume(i));
  if (pos.empty()) return 0.0;
  std::sort(pos.begin(), pos.end(), [](auto& a, auto& b) { return a.first > b.first; });
  std::vector<double> cum(pos.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < pos.size(); ++i) cum[i] = (acc += pos[i].second);

  const double lo = std::log(pos.back().first);
  const double hi = std::log(pos.front().first);
  double best = 0.0;
  for (std::size_t j = 0; j < levels; ++j) {
    const double lambda =
        (j + 1 == levels) ? pos.front().first
                          : std::exp(lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(levels - 1));
    // count of values >= lambda in the descending list
    const auto it = std::partition_point(pos.begin(), pos.end(), [&](auto& e) { return e.first >= lambda; });
    const std::size_t cnt = static_cast<std::size_t>(it - pos.begin());
    if (cnt == 0) continue;
    best = std::max(best, lambda * std::pow(cum[cnt - 1], 1.0 / p));
  }
  return best;
}

/// Radial version: superlevel sets are measured from an interpolant between
/// nodes (constant beyond the first and last nodes), so a sampled
/// singular profile is not inflated to a whole cell at its top level.
inline double lp_weak_norm(const RadialField& f, double p, std::size_t levels = 64) {
  require(p > 0.0, "lp_weak_norm: p must be positive");
  require(levels >= 2, "lp_weak_norm: need at least two levels");
  require_nonnegative(f, "lp_weak_norm");
  const RadialGrid& g = f.grid();
  double vmin = std::numeric_limits<double>::infinity(), vmax = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] > 0.0) {
      vmin = std::min(vmin, f[i]);
      vmax = std::max(vmax, f[i]);
    }
  if (vmax == 0.0) return 0.0;
  auto shell = [](double a, double b) { return 4.0 / 3.0 * std::numbers::pi * (b * b * b - a * a * a); };
  auto measure = [&](double lambda) {
    const std::size_t n = f.size();
    double vol = f[0] >= lambda ? shell(0.0, g.node(0)) : 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double r0 = g.node(i), r1 = g.node(i + 1), f0 = f[i], f1 = f[i + 1];
      if (f0 >= lambda && f1 >= lambda) vol += shell(r0, r1);
      else if (f0 >= lambda || f1 >= lambda) {
        // log-log interpolation when both samples are positive (exact for power laws)
        const double rc = (f0 > 0.0 && f1 > 0.0)
                              ? r0 * std::pow(lambda / f0, std::log(r1 / r0) / std::log(f1 / f0))
                              : r0 + (lambda - f0) / (f1 - f0) * (r1 - r0);
        vol += f0 >= lambda ? shell(r0, rc) : shell(rc, r1);
      }
    }
    if (f[n - 1] >= lambda) vol += shell(g.node(n - 1), g.r_max());
    return vol;
  };
  const double lo = std::log(vmin), hi = std::log(vmax);
  double best = 0.0;
  for (std::size_t j = 0; j < levels; ++j) {
    const double lambda =
        (j + 1 == levels) ? vmax : std::exp(lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(levels - 1));
    best = std::max(best, lambda * std::pow(measure(lambda), 1.0 / p));
  }
  return best;
}

}  // namespace landau
