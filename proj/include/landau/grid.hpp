#pragma once

// Cell-centered discretizations of R^3: a radial reduction and a truncated
// cube centered at the origin.

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <string>

#include "landau/errors.hpp"

namespace landau {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Uniform radial grid on [0, r_max] with nodes r_i = (i + 1/2) h.
class RadialGrid {
 public:
  static constexpr int dimension = 3;
  static constexpr const char* kind = "radial";

  RadialGrid(double r_max, std::size_t n_points) : r_max_(r_max), n_(n_points), h_(r_max / n_points) {
    require(std::isfinite(r_max) && r_max > 0.0, "RadialGrid: r_max must be positive");
    require(n_points >= 8, "RadialGrid: n_points must be >= 8");
  }

  double r_max() const { return r_max_; }
  double extent() const { return r_max_; }
  std::size_t n_points() const { return n_; }
  std::size_t size() const { return n_; }
  double spacing() const { return h_; }

  double node(std::size_t i) const { return (static_cast<double>(i) + 0.5) * h_; }
  /// Radius of face i, the inner face of cell i (face n is the outer wall).
  double face(std::size_t i) const { return static_cast<double>(i) * h_; }
  double radius(std::size_t i) const { return node(i); }
  /// Midpoint-rule shell volume 4 pi r_i^2 h.
  double volume(std::size_t i) const {
    const double r = node(i);
    return 4.0 * std::numbers::pi * r * r * h_;
  }
  Vec3 position(std::size_t i) const { return {node(i), 0.0, 0.0}; }

  bool operator==(const RadialGrid& o) const { return r_max_ == o.r_max_ && n_ == o.n_; }

 private:
  double r_max_;
  std::size_t n_;
  double h_;
};

/// Cube [-L, L]^3 with n cells per axis, cell-centered, n even.
class CartesianGrid3 {
 public:
  static constexpr int dimension = 3;
  static constexpr const char* kind = "cartesian";

  CartesianGrid3(double half_width, std::size_t n_per_axis)
      : L_(half_width), n_(n_per_axis), h_(2.0 * half_width / n_per_axis) {
    require(std::isfinite(half_width) && half_width > 0.0, "CartesianGrid3: half_width must be positive");
    require(n_per_axis >= 16, "CartesianGrid3: n_per_axis must be >= 16");
    require(n_per_axis % 2 == 0, "CartesianGrid3: n_per_axis must be even");
  }

  double half_width() const { return L_; }
  double extent() const { return L_; }
  std::size_t n_per_axis() const { return n_; }
  std::size_t size() const { return n_ * n_ * n_; }
  double spacing() const { return h_; }

  /// Coordinate of cell i along any axis. Written so that coord(n-1-i) == -coord(i) exactly.
  double coord(std::size_t i) const {
    return (static_cast<double>(i) + 0.5 - 0.5 * static_cast<double>(n_)) * h_;
  }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return (i * n_ + j) * n_ + k; }
  std::array<std::size_t, 3> unravel(std::size_t idx) const {
    return {idx / (n_ * n_), (idx / n_) % n_, idx % n_};
  }
  Vec3 position(std::size_t idx) const {
    const auto [i, j, k] = unravel(idx);
    return {coord(i), coord(j), coord(k)};
  }
  double radius(std::size_t idx) const { return norm(position(idx)); }
  double volume(std::size_t) const { return h_ * h_ * h_; }

  bool operator==(const CartesianGrid3& o) const { return L_ == o.L_ && n_ == o.n_; }

 private:
  double L_;
  std::size_t n_;
  double h_;
};

template <class G>
concept Grid = requires(const G& g, std::size_t i) {
  { g.size() } -> std::convertible_to<std::size_t>;
  { g.volume(i) } -> std::convertible_to<double>;
  { g.radius(i) } -> std::convertible_to<double>;
  { g.spacing() } -> std::convertible_to<double>;
};

}  // namespace landau
