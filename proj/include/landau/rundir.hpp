#pragma once

// Run directories: config echo, diagnostics CSV, stored slices, checkpoints,
// a deterministic summary and a manifest with wall-clock data.
//
//   <dir>/config.txt
//   <dir>/diagnostics.csv
//   <dir>/summary.json
//   <dir>/manifest.json
//   <dir>/states/step_NNNNNNNNN.lndau
//   <dir>/checkpoints/step_NNNNNNNNN.lndau

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "landau/io.hpp"
#include "landau/parallel.hpp"
#include "landau/report.hpp"

namespace landau::io {

namespace fs = std::filesystem;

inline std::string step_file(std::size_t step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step_%09zu.lndau", step);
  return buf;
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path.string());
  f << text;
  if (!f) throw InputError("write failed: " + path.string());
}

inline std::string dump(const report::Json& j) { return j.dump(2) + "\n"; }

inline report::Json config_json(const RunSpec& spec) {
  report::Json j = report::Json::object();
  for (const auto& [k, v] : echo(spec)) j[k] = v;
  return j;
}

struct RunDirResult {
  std::size_t rows = 0;
  std::size_t steps = 0;
  std::size_t checkpoints = 0;
  std::optional<BlowupReport> blowup;
  std::vector<std::string> warnings;
};

/// Counts of records whose streaming bound margins are negative.
struct MarginCounts {
  std::size_t a_lower = 0, a_upper = 0, h_lower = 0, e_upper = 0;
};

template <Grid G>
RunDirResult run_into(const RunSpec& spec, const G& grid, const fs::path& dir,
                      std::optional<SimState<G>> resume = std::nullopt) {
  spec.sim.validate();
  const auto wall0 = std::chrono::steady_clock::now();
  fs::create_directories(dir);
  if (spec.store_states) fs::create_directories(dir / "states");
  if (spec.sim.checkpoint_every > 0) fs::create_directories(dir / "checkpoints");
  write_text(dir / "config.txt", echo_text(spec));

  std::ofstream csv(dir / "diagnostics.csv", std::ios::binary);
  if (!csv) throw InputError("cannot write " + (dir / "diagnostics.csv").string());
  csv << kCsvHeader << '\n';

  RunDirResult res;
  MarginCounts margins;
  std::optional<DiagnosticsRecord> first, last;
  double worst_clipped = 0.0;

  RunObserver<G> obs;
  obs.on_slice = [&](const SimState<G>& s, const DiagnosticsRecord* r) {
    if (r) {
      csv << csv_row(*r) << '\n';
      ++res.rows;
      if (!first) first = *r;
      last = *r;
      worst_clipped = std::max(worst_clipped, r->clipped_mass);
      margins.a_lower += r->a_lb_margin < 0.0;
      margins.a_upper += r->a_ub_margin < 0.0;
      margins.h_lower += r->H_lb_margin < 0.0;
      margins.e_upper += r->E_ub_margin < 0.0;
    }
    if (spec.store_states) write_checkpoint((dir / "states" / step_file(s.step)).string(), s);
  };
  obs.on_checkpoint = [&](const SimState<G>& s) {
    write_checkpoint((dir / "checkpoints" / step_file(s.step)).string(), s);
    ++res.checkpoints;
  };

  // The blow-up ceiling always refers to the configured initial data.
  SimState<G> start = resume ? std::move(*resume) : initial_state(spec.sim, grid);
  double m0 = resume ? sample_profile(grid, spec.sim.init).max() : start.u.max();
  if (!(m0 > 0.0)) m0 = 1.0;
  const bool resumed = start.step > 0 || start.t > 0.0;
  const std::size_t start_step = start.step;
  const double start_t = start.t;

  auto out = run_from(spec.sim, std::move(start), m0, obs, false);
  csv.close();
  res.steps = out.steps;
  res.blowup = out.blowup;
  res.warnings = out.warnings;

  using report::num;
  report::Json summary;
  summary["config"] = config_json(spec);
  summary["resumed_from"] = resumed ? report::Json{{"t", num(start_t)}, {"step", start_step}} : report::Json(nullptr);
  summary["steps"] = res.steps;
  summary["rows"] = res.rows;
  if (first && last) {
    summary["t_final"] = num(last->t);
    summary["mass_initial"] = num(first->mass);
    summary["mass_final"] = num(last->mass);
    summary["mass_drift"] = num(first->mass != 0.0 ? (last->mass - first->mass) / first->mass : 0.0);
    summary["H_initial"] = num(first->H);
    summary["H_final"] = num(last->H);
    summary["clipped_mass"] = num(worst_clipped);
  }
  summary["margin_violations"] = report::Json{{"a_lower", margins.a_lower},
                                              {"a_upper", margins.a_upper},
                                              {"h_lower", margins.h_lower},
                                              {"e_upper", margins.e_upper}};
  summary["blowup"] = res.blowup ? report::to_json(*res.blowup) : report::Json(nullptr);
  summary["warnings"] = res.warnings;
  write_text(dir / "summary.json", dump(summary));

  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  std::size_t stored = 0;
  if (spec.store_states)
    for (const auto& e : fs::directory_iterator(dir / "states")) stored += e.path().extension() == ".lndau";
  report::Json manifest;
  manifest["created_utc"] = stamp;
  manifest["elapsed_seconds"] = elapsed;
  manifest["threads"] = parallel::worker_count();
  manifest["files"] = report::Json{
      {"config.txt", report::Json::object()},
      {"diagnostics.csv", report::Json{{"rows", res.rows}}},
      {"summary.json", report::Json::object()},
      {"states", report::Json{{"files", stored}}},
      {"checkpoints", report::Json{{"files", res.checkpoints}}}};
  write_text(dir / "manifest.json", dump(manifest));
  return res;
}

/// Dispatches on the configured grid kind.
inline RunDirResult run_into(const RunSpec& spec, const fs::path& dir) {
  if (spec.sim.grid.kind == GridKind::radial) return run_into(spec, spec.sim.grid.radial(), dir);
  return run_into(spec, spec.sim.grid.cartesian(), dir);
}

/// Continues a run from a checkpoint file, writing into a new directory.
inline RunDirResult resume_into(const RunSpec& spec, const std::string& checkpoint, const fs::path& dir) {
  AnyState st = read_checkpoint(checkpoint);
  return std::visit(
      [&](auto& s) -> RunDirResult {
        using G = std::decay_t<decltype(s.grid())>;
        const bool radial = std::is_same_v<G, RadialGrid>;
        if (radial != (spec.sim.grid.kind == GridKind::radial))
          throw ParameterError("restart: checkpoint grid kind does not match the configuration");
        G configured = [&] {
          if constexpr (std::is_same_v<G, RadialGrid>) return spec.sim.grid.radial();
          else return spec.sim.grid.cartesian();
        }();
        if (!(configured == s.grid())) throw ParameterError("restart: checkpoint grid does not match the configuration");
        return run_into(spec, configured, dir, std::optional<SimState<G>>(std::move(s)));
      },
      st);
}

// ---------------------------------------------------------------------------
// Loading

using AnyTrajectory = std::variant<Trajectory<RadialGrid>, Trajectory<CartesianGrid3>>;

inline std::vector<fs::path> state_files(const fs::path& dir) {
  std::vector<fs::path> files;
  if (fs::is_directory(dir))
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".lndau") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

/// Reads a run directory's stored slices, or a single checkpoint file.
inline AnyTrajectory load_trajectory(const fs::path& path) {
  std::vector<fs::path> files;
  if (fs::is_regular_file(path)) files.push_back(path);
  else files = state_files(path / "states");
  if (files.empty()) throw InputError(path.string() + ": no stored states (was the run made with output.states = false?)");
  std::optional<AnyTrajectory> traj;
  for (const auto& f : files) {
    AnyState st = read_checkpoint(f.string());
    if (!traj) {
      traj = std::visit([](auto& s) -> AnyTrajectory {
        using S = std::decay_t<decltype(s)>;
        return std::vector<S>{};
      }, st);
    }
    std::visit(
        [&](auto& s) {
          using S = std::decay_t<decltype(s)>;
          auto* v = std::get_if<std::vector<S>>(&*traj);
          if (!v) throw InputError(f.string() + ": grid kind differs from earlier slices");
          if (!v->empty() && !(v->front().grid() == s.grid())) throw InputError(f.string() + ": grid differs from earlier slices");
          v->push_back(std::move(s));
        },
        st);
  }
  return std::move(*traj);
}

inline RunSpec load_run_dir_spec(const fs::path& dir) { return load_run_spec((dir / "config.txt").string()); }

// ---------------------------------------------------------------------------
// Diagnose

struct DiagnoseReport {
  std::size_t slices = 0;
  std::size_t rows = 0;
  std::size_t mismatched_values = 0;  ///< recomputed values off by more than the tolerance
  double max_rel_diff = 0.0;
  bool csv_identical = false;         ///< regenerated CSV equals the stored bytes
  bool ok() const { return rows == slices && mismatched_values == 0; }
};

inline double rel_diff(double a, double b) {
  if (a == b) return 0.0;
  const double s = std::max(std::abs(a), std::abs(b));
  return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

/// Recomputes every record from the stored slices and compares with the CSV.
inline DiagnoseReport diagnose_run_dir(const fs::path& dir, double tol = 1e-12) {
  const RunSpec spec = load_run_dir_spec(dir);
  const AnyTrajectory traj = load_trajectory(dir);
  const auto stored = read_csv((dir / "diagnostics.csv").string());
  DiagnoseReport rep;
  rep.rows = stored.size();
  std::string regenerated = std::string(kCsvHeader) + "\n";
  std::visit(
      [&](const auto& tr) {
        rep.slices = tr.size();
        for (std::size_t s = 0; s < tr.size(); ++s) {
          const DiagnosticsRecord r = compute_record(tr[s], spec.sim.bounds);
          regenerated += csv_row(r) + "\n";
          if (s >= stored.size()) continue;
          const auto vals = csv_values(r);
          for (std::size_t c = 0; c < vals.size(); ++c) {
            const double d = c < stored[s].size() ? rel_diff(vals[c], stored[s][c]) : 1.0;
            rep.max_rel_diff = std::max(rep.max_rel_diff, d);
            rep.mismatched_values += d > tol;
          }
        }
      },
      traj);
  rep.csv_identical = regenerated == read_text((dir / "diagnostics.csv").string());
  return rep;
}

}  // namespace landau::io
