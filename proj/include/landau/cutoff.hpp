#pragma once

// Smooth radial cutoffs built from the C-infinity ramp
//   psi(s) = f(s) / (f(s) + f(1 - s)),  f(s) = exp(-1/s) for s > 0.

#include <algorithm>
#include <cmath>

#include "landau/errors.hpp"

namespace landau {

struct RampValue {
  double v, d1, d2;  ///< psi, psi', psi''
};

inline RampValue smooth_ramp(double s) {
  if (s <= 0.0) return {0.0, 0.0, 0.0};
  if (s >= 1.0) return {1.0, 0.0, 0.0};
  auto f = [](double x, double& d1, double& d2) {
    const double e = std::exp(-1.0 / x);
    if (e == 0.0) {
      d1 = d2 = 0.0;
      return 0.0;
    }
    d1 = e / (x * x);
    d2 = e * (1.0 - 2.0 * x) / (x * x * x * x);
    return e;
  };
  double f1, f2, g1, g2;
  const double F = f(s, f1, f2);
  const double G0 = f(1.0 - s, g1, g2);
  // G(s) = f(1 - s): G' = -f'(1 - s), G'' = f''(1 - s)
  g1 = -g1;
  const double D = F + G0;
  const double D1 = f1 + g1;
  const double N = f1 * G0 - F * g1;
  const double N1 = f2 * G0 - F * g2;
  return {F / D, N / (D * D), (N1 * D - 2.0 * N * D1) / (D * D * D)};
}

/// eta(r) = 1 for r <= r_in, 0 for r >= r_out, smooth in between.
struct RadialCutoff {
  double r_in;
  double r_out;

  RadialCutoff(double inner, double outer) : r_in(inner), r_out(outer) {
    require(inner >= 0.0 && outer > inner, "RadialCutoff: need 0 <= r_in < r_out");
  }

  double width() const { return r_out - r_in; }
  /// Radial profile and its first two r-derivatives.
  RampValue profile(double r) const {
    const double w = width();
    const RampValue p = smooth_ramp((r - r_in) / w);
    return {1.0 - p.v, -p.d1 / w, -p.d2 / (w * w)};
  }
  double operator()(double r) const { return profile(r).v; }
  double grad_norm(double r) const { return std::abs(profile(r).d1); }
  /// Spectral norm of the Hessian: max(|eta''|, |eta'/r|).
  double hessian_norm(double r) const {
    const RampValue p = profile(r);
    return r > 0.0 ? std::max(std::abs(p.d2), std::abs(p.d1 / r)) : std::abs(p.d2);
  }
  double laplacian(double r) const {
    const RampValue p = profile(r);
    return r > 0.0 ? p.d2 + 2.0 * p.d1 / r : 3.0 * p.d2;
  }
};

}  // namespace landau
