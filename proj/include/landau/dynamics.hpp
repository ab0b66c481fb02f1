#pragma once

// Explicit time stepping of u_t = div(a grad u - u grad a) and of the
// nondivergence variant u_t = a Delta u + alpha u^2, with -Delta a = u.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "landau/diagnostics.hpp"
#include "landau/errors.hpp"
#include "landau/field.hpp"
#include "landau/profiles.hpp"
#include "landau/state.hpp"
#include "landau/stencil.hpp"

namespace landau {

enum class Form { divergence, nondivergence };
enum class GridKind { radial, cartesian };

inline Form parse_form(const std::string& s) {
  if (s == "divergence") return Form::divergence;
  if (s == "nondivergence") return Form::nondivergence;
  throw ParameterError("unknown form '" + s + "'; expected divergence or nondivergence");
}
inline const char* to_string(Form f) { return f == Form::divergence ? "divergence" : "nondivergence"; }

inline GridKind parse_grid_kind(const std::string& s) {
  if (s == "radial") return GridKind::radial;
  if (s == "cartesian") return GridKind::cartesian;
  throw ParameterError("unknown grid.kind '" + s + "'; expected radial or cartesian");
}
inline const char* to_string(GridKind k) { return k == GridKind::radial ? "radial" : "cartesian"; }

struct GridSpec {
  GridKind kind = GridKind::radial;
  double extent = 12.0;  ///< r_max (radial) or half width L (cartesian)
  std::size_t n = 1024;  ///< points (radial) or points per axis (cartesian)

  RadialGrid radial() const { return RadialGrid(extent, n); }
  CartesianGrid3 cartesian() const { return CartesianGrid3(extent, n); }
};

struct SimConfig {
  Form form = Form::divergence;
  double alpha = 1.0;
  GridSpec grid;
  double t_end = 0.1;
  double cfl_safety = 0.9;
  std::size_t output_stride = 10;  ///< emit every k steps
  double output_interval = 0.0;    ///< if > 0, emit at multiples of this time instead
  ProfileSpec init;
  double blowup_factor = 1e6;      ///< halt when max u exceeds this multiple of the initial max
  std::size_t checkpoint_every = 0;
  bool records = true;             ///< evaluate DiagnosticsRecord per emitted slice
  BoundConstants bounds;

  void validate() const {
    require(std::isfinite(t_end) && t_end >= 0.0, "t_end must be >= 0");
    require(cfl_safety > 0.0 && cfl_safety <= 1.0, "cfl_safety must lie in (0, 1]");
    require(output_stride >= 1, "output.stride must be >= 1");
    require(output_interval >= 0.0, "output.interval must be >= 0");
    require(blowup_factor > 1.0, "blowup_factor must exceed 1");
    require(std::isfinite(alpha), "alpha must be finite");
    if (form == Form::nondivergence) require(alpha > 0.0, "alpha must be positive");
  }

  std::vector<std::string> warnings() const {
    std::vector<std::string> w;
    if (form == Form::nondivergence && alpha >= 74.0 / 75.0 && alpha != 1.0) {
      std::ostringstream s;
      s << "alpha = " << alpha << " lies outside the open interval (0, 74/75)";
      w.push_back(s.str());
    }
    return w;
  }
};

// ---------------------------------------------------------------------------
// Stability

/// Largest stable dt: cfl h^2 / (2 d max a), d = 3.
template <Grid G>
double admissible_dt(const SimState<G>& s, double cfl = 1.0) {
  const double h = s.grid().spacing();
  const double amax = s.a.a.max();
  if (amax <= 0.0) return std::numeric_limits<double>::infinity();
  return cfl * h * h / (6.0 * amax);
}

namespace detail {

template <Grid G>
void check_dt(const SimState<G>& s, double dt, double cfl) {
  require(std::isfinite(dt) && dt > 0.0, "time step must be positive and finite");
  const double lim = admissible_dt(s, cfl);
  if (dt > lim) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "time step " << dt << " violates the stability limit; admissible dt <= " << lim;
    throw StabilityError(msg.str(), lim);
  }
}

/// Clips negatives to zero; returns the mass added.
template <Grid G>
double clip_negative(Field<G>& u) {
  const G& g = u.grid();
  double added = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i] < 0.0) {
      added -= u[i] * g.volume(i);
      u[i] = 0.0;
    }
  return added;
}

/// Face flux a_f (u_R - u_L)/h - u_f (a_R - a_L)/h with arithmetic face means.
inline double face_flux(double uL, double uR, double aL, double aR, double h) {
  const double af = 0.5 * (aL + aR);
  const double uf = 0.5 * (uL + uR);
  return (af * (uR - uL) - uf * (aR - aL)) / h;
}

inline RadialField divergence_rate(const RadialField& u, const RadialField& a) {
  const RadialGrid& g = u.grid();
  const std::size_t n = g.size();
  const double h = g.spacing();
  // area-weighted flux through face i (between cells i-1 and i); faces 0 and n carry none
  std::vector<double> F(n + 1, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double rf = g.face(i);
    F[i] = rf * rf * face_flux(u[i - 1], u[i], a[i - 1], a[i], h);
  }
  RadialField rate(g);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = g.node(i);
    rate[i] = (F[i + 1] - F[i]) / (r * r * h);
  }
  return rate;
}

inline CartesianField divergence_rate(const CartesianField& u, const CartesianField& a) {
  const CartesianGrid3& g = u.grid();
  const std::size_t n = g.n_per_axis();
  const double h = g.spacing();
  CartesianField rate(g);
  parallel::for_each_index(g.size(), [&](std::size_t idx) {
    const auto ijk = g.unravel(idx);
    const std::size_t stride[3] = {n * n, n, 1};
    double acc = 0.0;
    for (int d = 0; d < 3; ++d) {
      const std::size_t c = ijk[d];
      const double hi = c + 1 < n ? face_flux(u[idx], u[idx + stride[d]], a[idx], a[idx + stride[d]], h) : 0.0;
      const double lo = c > 0 ? face_flux(u[idx - stride[d]], u[idx], a[idx - stride[d]], a[idx], h) : 0.0;
      acc += hi - lo;
    }
    rate[idx] = acc / h;
  });
  return rate;
}

}  // namespace detail

/// One explicit Euler step of the divergence form. Throws StabilityError when
/// dt exceeds cfl h^2 / (6 max a).
template <Grid G>
SimState<G> step_divergence(const SimState<G>& s, double dt, double cfl = 1.0) {
  detail::check_dt(s, dt, cfl);
  const Field<G> rate = detail::divergence_rate(s.u, s.a.a);
  Field<G> next = s.u;
  for (std::size_t i = 0; i < next.size(); ++i) next[i] += dt * rate[i];
  const double clipped = detail::clip_negative(next);
  return SimState<G>::make(std::move(next), s.t + dt, s.step + 1, s.clipped_mass + clipped);
}

/// One explicit Euler step of u_t = a Delta u + alpha u^2 (zero-flux Laplacian).
template <Grid G>
SimState<G> step_nondivergence(const SimState<G>& s, double dt, double alpha, double cfl = 1.0) {
  detail::check_dt(s, dt, cfl);
  require(std::isfinite(alpha), "alpha must be finite");
  const Field<G> lap = laplacian(s.u, OuterBoundary::zero_flux);
  const Field<G>& a = s.a.a;
  Field<G> next = s.u;
  for (std::size_t i = 0; i < next.size(); ++i) next[i] += dt * (a[i] * lap[i] + alpha * s.u[i] * s.u[i]);
  const double clipped = detail::clip_negative(next);
  return SimState<G>::make(std::move(next), s.t + dt, s.step + 1, s.clipped_mass + clipped);
}

template <Grid G>
SimState<G> step(const SimState<G>& s, double dt, Form form, double alpha, double cfl = 1.0) {
  return form == Form::divergence ? step_divergence(s, dt, cfl) : step_nondivergence(s, dt, alpha, cfl);
}

// ---------------------------------------------------------------------------
// Driver

struct BlowupReport {
  double t = 0.0;
  std::size_t step = 0;
  double max_u = 0.0;
  double ceiling = 0.0;
};

template <Grid G>
struct RunResult {
  Trajectory<G> slices;
  std::vector<DiagnosticsRecord> records;
  std::optional<BlowupReport> blowup;
  std::size_t steps = 0;
  std::vector<std::string> warnings;
};

template <Grid G>
struct RunObserver {
  std::function<void(const SimState<G>&, const DiagnosticsRecord*)> on_slice;
  std::function<void(const SimState<G>&)> on_checkpoint;
};

template <Grid G>
SimState<G> initial_state(const SimConfig& cfg, const G& grid) {
  return SimState<G>::make(sample_profile(grid, cfg.init));
}

/// Advances `start` to cfg.t_end. Slices are emitted at the start, every
/// output stride (or interval) and at t_end. `initial_max` is the reference
/// for the blow-up ceiling; pass the max of the original initial data when
/// resuming from a checkpoint.
template <Grid G>
RunResult<G> run_from(const SimConfig& cfg, SimState<G> state, double initial_max, const RunObserver<G>& obs = {},
                      bool keep_slices = true) {
  cfg.validate();
  RunResult<G> out;
  out.warnings = cfg.warnings();
  const double ceiling = cfg.blowup_factor * initial_max;

  auto emit = [&](const SimState<G>& s) {
    std::optional<DiagnosticsRecord> rec;
    if (cfg.records) {
      rec = compute_record(s, cfg.bounds);
      out.records.push_back(*rec);
    }
    if (obs.on_slice) obs.on_slice(s, rec ? &*rec : nullptr);
    if (keep_slices) out.slices.push_back(s);
  };
  const bool resumed = state.step > 0 || state.t > 0.0;
  if (!resumed) emit(state);

  const double tend = cfg.t_end;
  while (state.t < tend) {
    double dt = cfg.cfl_safety * admissible_dt(state, 1.0);
    double target = tend;
    if (cfg.output_interval > 0.0)
      target = std::min(tend, cfg.output_interval * (std::floor(state.t / cfg.output_interval + 1e-9) + 1.0));
    const bool land = !(dt < target - state.t);
    if (land) dt = target - state.t;
    SimState<G> next = step(state, dt, cfg.form, cfg.alpha, 1.0);
    if (land) next.t = target;
    state = std::move(next);
    ++out.steps;

    const double umax = state.u.max();
    if (!std::isfinite(umax) || umax > ceiling) {
      out.blowup = BlowupReport{state.t, state.step, umax, ceiling};
      if (std::isfinite(umax)) emit(state);
      return out;
    }
    const bool due = cfg.output_interval > 0.0 ? land : state.step % cfg.output_stride == 0;
    if (due || !(state.t < tend)) emit(state);
    if (cfg.checkpoint_every > 0 && state.step % cfg.checkpoint_every == 0 && obs.on_checkpoint) obs.on_checkpoint(state);
  }
  return out;
}

template <Grid G>
RunResult<G> run(const SimConfig& cfg, const G& grid, const RunObserver<G>& obs = {}, bool keep_slices = true) {
  SimState<G> s = initial_state(cfg, grid);
  const double m0 = s.u.max();
  return run_from(cfg, std::move(s), m0 > 0.0 ? m0 : 1.0, obs, keep_slices);
}

}  // namespace landau
