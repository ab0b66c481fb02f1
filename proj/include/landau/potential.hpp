#pragma once

// Free-space Newtonian potential a[u] = int u(y) / (4 pi |x - y|) dy, i.e. -Delta a = u.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <type_traits>
#include <vector>

#include "landau/errors.hpp"
#include "landau/field.hpp"
#include "landau/stencil.hpp"

namespace landau {

enum class PoissonMethod { radial_quadrature, fft_free_space };

template <Grid G>
struct PotentialSolution {
  Field<G> a;
  PoissonMethod method;
  /// Max over interior nodes of |-Delta_h a - u| / max u.
  double residual = 0.0;
};

namespace detail {

template <Grid G>
double interior_residual(const Field<G>& u, const Field<G>& a, std::size_t skip_outer) {
  const double umax = u.max();
  if (umax <= 0.0) return 0.0;
  const Field<G> lap = laplacian(a, OuterBoundary::extrapolate);
  double worst = 0.0;
  if constexpr (std::is_same_v<G, RadialGrid>) {
    for (std::size_t i = 1; i + 1 + skip_outer < u.size(); ++i)
      worst = std::max(worst, std::abs(-lap[i] - u[i]) / umax);
  } else {
    const CartesianGrid3& g = u.grid();
    const std::size_t n = g.n_per_axis();
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      const auto [i, j, k] = g.unravel(idx);
      const std::size_t m = skip_outer + 1;
      if (i < m || j < m || k < m || i + m >= n || j + m >= n || k + m >= n) continue;
      worst = std::max(worst, std::abs(-lap[idx] - u[idx]) / umax);
    }
  }
  return worst;
}

}  // namespace detail

/// Radial potential by Newton's theorem,
///   a(r) = (1/r) int_0^r s^2 u ds + int_r^inf s u ds,
/// with midpoint prefix sums and half-cell corrections at the evaluation node.
inline PotentialSolution<RadialGrid> solve_poisson_radial(const RadialField& u) {
  require_nonnegative(u, "solve_poisson_radial");
  const RadialGrid& g = u.grid();
  const std::size_t n = g.size();
  const double h = g.spacing();

  // inner[i] = sum_{j<i} r_j^2 u_j h ; outer[i] = sum_{j>i} r_j u_j h
  std::vector<double> inner(n + 1, 0.0), outer(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = g.node(i);
    inner[i + 1] = inner[i] + r * r * u[i] * h;
  }
  for (std::size_t i = n; i-- > 0;) {
    const double r = g.node(i);
    outer[i] = outer[i + 1] + r * u[i] * h;
  }

  RadialField a(g);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = g.node(i);
    const double rin = r - 0.25 * h;
    const double rout = r + 0.25 * h;
    const double in = inner[i] + u[i] * rin * rin * 0.5 * h;
    const double out = outer[i + 1] + u[i] * rout * 0.5 * h;
    a[i] = in / r + out;
  }
  PotentialSolution<RadialGrid> sol{std::move(a), PoissonMethod::radial_quadrature, 0.0};
  sol.residual = detail::interior_residual(u, sol.a, 0);
  return sol;
}

/// a(0) = int_0^inf s u(s) ds for a radial density.
inline double potential_at_origin(const RadialField& u) {
  const RadialGrid& g = u.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.node(i) * u[i] * g.spacing();
  return s;
}

/// int over [-1/2, 1/2]^3 of 1/|x| dx.
inline double unit_cube_inverse_distance_integral() {
  return 3.0 * std::log(2.0 + std::sqrt(3.0)) - std::numbers::pi / 2.0;
}

namespace detail {

/// Cached FFTW plans and buffers for one padded size, used under an exclusive lock.
struct FreeSpacePlan {
  std::size_t m = 0;  // padded points per axis
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::mutex lock;
  // kernel spectra keyed by grid spacing
  std::map<double, std::vector<std::complex<double>>> kernels;

  explicit FreeSpacePlan(std::size_t padded) : m(padded) {
    const std::size_t nreal = m * m * m;
    const std::size_t ncomplex = m * m * (m / 2 + 1);
    real = fftw_alloc_real(nreal);
    spec = fftw_alloc_complex(ncomplex);
    const int mi = static_cast<int>(m);
    forward = fftw_plan_dft_r2c_3d(mi, mi, mi, real, spec, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_3d(mi, mi, mi, spec, real, FFTW_ESTIMATE);
  }
  ~FreeSpacePlan() {
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(real);
    fftw_free(spec);
  }
  FreeSpacePlan(const FreeSpacePlan&) = delete;
  FreeSpacePlan& operator=(const FreeSpacePlan&) = delete;

  std::size_t ncomplex() const { return m * m * (m / 2 + 1); }

  const std::vector<std::complex<double>>& kernel(double h) {
    auto it = kernels.find(h);
    if (it != kernels.end()) return it->second;
    const std::size_t n = m / 2;
    const double self = h * h * unit_cube_inverse_distance_integral() / (4.0 * std::numbers::pi);
    auto offset = [&](std::size_t i) -> double {
      if (i == n) return -1.0;  // unused wrap-around slot
      return i < n ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(m);
    };
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k) {
          const double di = offset(i), dj = offset(j), dk = offset(k);
          double v;
          if (i == n || j == n || k == n) {
            v = 0.0;
          } else if (i == 0 && j == 0 && k == 0) {
            v = self;
          } else {
            v = h * h / (4.0 * std::numbers::pi * std::sqrt(di * di + dj * dj + dk * dk));
          }
          real[(i * m + j) * m + k] = v;
        }
    fftw_execute(forward);
    std::vector<std::complex<double>> khat(ncomplex());
    const double scale = 1.0 / static_cast<double>(m * m * m);
    for (std::size_t c = 0; c < khat.size(); ++c) khat[c] = std::complex<double>(spec[c][0], spec[c][1]) * scale;
    return kernels.emplace(h, std::move(khat)).first->second;
  }
};

inline FreeSpacePlan& free_space_plan(std::size_t padded) {
  static std::mutex registry_lock;
  static std::map<std::size_t, std::unique_ptr<FreeSpacePlan>> registry;
  std::lock_guard<std::mutex> guard(registry_lock);
  auto& slot = registry[padded];
  if (!slot) slot = std::make_unique<FreeSpacePlan>(padded);
  return *slot;
}

}  // namespace detail

/// Free-space convolution with 1/(4 pi |x|) on a doubled, zero-padded box.
/// The singular self cell uses the exact cell average of the kernel.
inline PotentialSolution<CartesianGrid3> solve_poisson_3d(const CartesianField& u) {
  require_nonnegative(u, "solve_poisson_3d");
  const CartesianGrid3& g = u.grid();
  const std::size_t n = g.n_per_axis();
  require(n >= 16, "solve_poisson_3d: grid too small (n < 16)");
  const std::size_t m = 2 * n;

  detail::FreeSpacePlan& plan = detail::free_space_plan(m);
  CartesianField a(g);
  {
    std::lock_guard<std::mutex> guard(plan.lock);
    const auto& khat = plan.kernel(g.spacing());
    std::fill(plan.real, plan.real + m * m * m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) plan.real[(i * m + j) * m + k] = u[g.index(i, j, k)];
    fftw_execute(plan.forward);
    for (std::size_t c = 0; c < khat.size(); ++c) {
      const std::complex<double> z = std::complex<double>(plan.spec[c][0], plan.spec[c][1]) * khat[c];
      plan.spec[c][0] = z.real();
      plan.spec[c][1] = z.imag();
    }
    fftw_execute(plan.backward);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) a[g.index(i, j, k)] = plan.real[(i * m + j) * m + k];
  }
  PotentialSolution<CartesianGrid3> sol{std::move(a), PoissonMethod::fft_free_space, 0.0};
  sol.residual = detail::interior_residual(u, sol.a, 1);
  return sol;
}

inline PotentialSolution<RadialGrid> solve_poisson(const RadialField& u) { return solve_poisson_radial(u); }
inline PotentialSolution<CartesianGrid3> solve_poisson(const CartesianField& u) { return solve_poisson_3d(u); }

/// Trilinear interpolation of a cartesian field at a point inside the node hull.
inline double sample_at(const CartesianField& f, const Vec3& x) {
  const CartesianGrid3& g = f.grid();
  const std::size_t n = g.n_per_axis();
  const double h = g.spacing();
  std::size_t base[3];
  double frac[3];
  for (int d = 0; d < 3; ++d) {
    double s = x[d] / h + 0.5 * static_cast<double>(n) - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(n - 1) - 1e-12);
    base[d] = static_cast<std::size_t>(s);
    frac[d] = s - static_cast<double>(base[d]);
  }
  double acc = 0.0;
  for (int c = 0; c < 8; ++c) {
    double w = 1.0;
    std::size_t ijk[3];
    for (int d = 0; d < 3; ++d) {
      const bool up = (c >> d) & 1;
      ijk[d] = base[d] + (up ? 1 : 0);
      w *= up ? frac[d] : 1.0 - frac[d];
    }
    acc += w * f[g.index(ijk[0], ijk[1], ijk[2])];
  }
  return acc;
}

/// Linear interpolation of a radial field at radius r (even extension below r_0).
inline double sample_at(const RadialField& f, double r) {
  const RadialGrid& g = f.grid();
  const double s = std::clamp(r / g.spacing() - 0.5, 0.0, static_cast<double>(g.size() - 1) - 1e-12);
  const std::size_t i = static_cast<std::size_t>(s);
  const double t = s - static_cast<double>(i);
  return (1.0 - t) * f[i] + t * f[i + 1];
}

// ---------------------------------------------------------------------------
// Pointwise bounds

/// Lower bound a[u](x) >= (1/16 pi) m^{3/2} / (E^{1/2} + |x| m^{1/2}).
inline double a_lower_bound(double x_abs, double mass, double E) {
  require(mass > 0.0, "a_lower_bound: mass must be positive");
  require(E > 0.0, "a_lower_bound: E must be positive");
  require(x_abs >= 0.0, "a_lower_bound: |x| must be >= 0");
  return std::pow(mass, 1.5) / (16.0 * std::numbers::pi * (std::sqrt(E) + x_abs * std::sqrt(mass)));
}

struct LpUpperBound {
  double bound;  ///< 4 m^{(2p-3)/(3(p-1))} ||u||_p^{p/(3(p-1))}
  double r_min;  ///< minimizer of c1/r + c2 r^{2-3/p}
};

/// sup a[u] <= 4 ||u||_1^{(2p-3)/(3(p-1))} ||u||_p^{p/(3(p-1))}, valid for p > 3/2.
/// `lp` is the L^p norm itself.
inline LpUpperBound a_upper_bound_lp(double mass, double lp, double p) {
  require(p > 1.5, "a_upper_bound_lp: p must exceed 3/2");
  require(mass >= 0.0 && lp >= 0.0, "a_upper_bound_lp: norms must be nonnegative");
  const double e1 = (2.0 * p - 3.0) / (3.0 * (p - 1.0));
  const double e2 = p / (3.0 * (p - 1.0));
  const double c1 = mass;
  const double c2 = 4.0 * std::numbers::pi * lp;
  const double r_min = c2 > 0.0 ? std::pow(c1 / ((2.0 - 3.0 / p) * c2), p / (3.0 * (p - 1.0)))
                                : std::numeric_limits<double>::infinity();
  return {4.0 * std::pow(mass, e1) * std::pow(lp, e2), r_min};
}

}  // namespace landau
