#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "landau/potential.hpp"

namespace landau {

/// One time slice of a simulation: density, its potential, and the mass
/// ledger for negativity clipping. The potential always matches u.
template <Grid G>
struct SimState {
  double t = 0.0;
  std::size_t step = 0;
  Field<G> u;
  PotentialSolution<G> a;
  double clipped_mass = 0.0;  ///< cumulative mass added by clipping negatives

  static SimState make(Field<G> density, double time = 0.0, std::size_t step_index = 0, double clipped = 0.0) {
    require_nonnegative(density, "SimState");
    auto pot = solve_poisson(density);
    return SimState{time, step_index, std::move(density), std::move(pot), clipped};
  }
  const G& grid() const { return u.grid(); }
};

template <Grid G>
using Trajectory = std::vector<SimState<G>>;

}  // namespace landau
