// lndau: run simulations and analyse run directories.
//
// Exit codes: 0 pass, 1 runtime error, 2 parameter rejection, 3 verdict
// failure (including blow-up).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "landau/barrier.hpp"
#include "landau/degiorgi.hpp"
#include "landau/inequalities.hpp"
#include "landau/report.hpp"
#include "landau/rundir.hpp"

using namespace landau;
using report::Json;
using report::num;

namespace {

constexpr int kOk = 0, kRuntime = 1, kParameter = 2, kVerdict = 3;

void emit(const Json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) std::cout << text;
  else io::write_text(out, text);
}

std::vector<std::pair<std::string, std::string>> split_overrides(const std::vector<std::string>& sets) {
  std::vector<std::pair<std::string, std::string>> kv;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParameterError("--set expects key=value, got '" + s + "'");
    kv.emplace_back(io::trim(s.substr(0, eq)), io::trim(s.substr(eq + 1)));
  }
  return kv;
}

double sup_u(const auto& traj) {
  double m = 0.0;
  for (const auto& s : traj) m = std::max(m, s.u.max());
  return m;
}

// ---------------------------------------------------------------------------

struct RunArgs {
  std::string config, out, restart;
  std::vector<std::string> sets;
};

int cmd_run(const RunArgs& a) {
  const io::RunSpec spec = io::load_run_spec(a.config, split_overrides(a.sets));
  const io::RunDirResult r = a.restart.empty() ? io::run_into(spec, a.out) : io::resume_into(spec, a.restart, a.out);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "rows " << r.rows << ", steps " << r.steps << "\n";
  if (r.blowup) {
    std::cerr << "blow-up at t = " << io::fmt(r.blowup->t) << " (max u " << io::fmt(r.blowup->max_u) << ")\n";
    return kVerdict;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_diagnose(const std::string& path, const std::string& out) {
  if (io::fs::is_regular_file(path)) {
    const io::AnyState st = io::read_checkpoint(path);
    const io::RunSpec defaults;
    Json j = std::visit(
        [&](const auto& s) {
          Json r{{"checkpoint", path}, {"step", s.step}, {"checksum", "ok"}};
          r["record"] = report::to_json(compute_record(s, defaults.sim.bounds));
          return r;
        },
        st);
    emit(j, out);
    return kOk;
  }
  const io::DiagnoseReport d = io::diagnose_run_dir(path);
  Json j{{"run_dir", path},
         {"slices", d.slices},
         {"rows", d.rows},
         {"mismatched_values", d.mismatched_values},
         {"max_rel_diff", num(d.max_rel_diff)},
         {"csv_identical", d.csv_identical},
         {"verdict", d.ok() && d.csv_identical ? "PASS" : "FAIL"}};
  emit(j, out);
  return d.ok() && d.csv_identical ? kOk : kVerdict;
}

// ---------------------------------------------------------------------------

struct InequalityArgs {
  std::string dir, out;
  std::vector<double> eps{0.05, 0.1, 0.2, 0.4};
  std::vector<std::string> gks_p{"1/2", "1", "2", "5/3"};
  std::string q = "2";
  std::vector<int> gain_n{0, 1};
  double R = std::numeric_limits<double>::infinity();
};

int cmd_inequalities(const InequalityArgs& a) {
  const double q = parse_rational(a.q).value();
  if (!(q > 1.0 && q < 10.0 / 3.0)) throw ParameterError("inequalities: q must lie in the open interval (1, 10/3)");
  for (double e : a.eps) require(e > 0.0, "inequalities: eps values must be positive");
  std::vector<double> ps;
  for (const auto& s : a.gks_p) ps.push_back(parse_rational(s).value());
  for (double p : ps) require(p > 0.0, "inequalities: gks p must be positive");
  for (int n : a.gain_n) require(n >= 0, "inequalities: gain n must be >= 0");

  const io::AnyTrajectory any = io::load_trajectory(a.dir);
  Json reports = Json::array();
  bool ok = true;
  auto add = [&](const InequalityReport& r) {
    reports.push_back(report::to_json(r));
    ok = ok && r.verdict != "FAIL";
  };

  std::visit(
      [&](const auto& traj) {
        using G = std::decay_t<decltype(traj.front().grid())>;
        if (traj.size() < 2) throw ParameterError("inequalities: need at least two slices");
        const auto& last = traj.back();
        const G& grid = last.grid();

        const auto fam = default_family(grid);
        double prev = std::numeric_limits<double>::infinity();
        bool monotone = true;
        for (double e : a.eps) {
          const auto c = eps_poincare_constant(last.u, last.a.a, e, fam, a.R);
          add({"eps_poincare", {{"eps", e}, {"R", a.R}, {"t", last.t}, {"members", double(c.members_used)}},
               c.C_needed, 0.0, c.C_needed, "RECORD"});
          monotone = monotone && c.C_needed <= prev;
          prev = c.C_needed;
        }
        add({"eps_poincare_monotone", {{"R", a.R}}, 0.0, 0.0, 0.0, monotone ? "PASS" : "FAIL"});

        const double tol = 1.0 + 5.0 * grid.spacing();
        for (double p : ps) {
          double worst = 0.0;
          for (const auto& s : traj) worst = std::max(worst, gks_ratio(s.u, s.a.a, p));
          add({"gks", {{"p", p}, {"slices", double(traj.size())}}, worst, tol, worst / tol, worst <= tol ? "PASS" : "FAIL"});
        }

        const RadialCutoff bump(1.0, 2.0);
        const Field<G> phi = Field<G>::sample(grid, [&](const Vec3& x) { return bump(norm(x)); });
        add(weighted_sobolev_ratio(traj, phi, q));

        const L1L3Report l13 = l1l3_estimate(traj);
        add({"l1l3", {{"T", traj.back().t}}, l13.value, l13.fisher_plus_mass, l13.ratio, "RECORD"});

        const L53Report l53 = l53_estimate(traj);
        double worst_h = 0.0, worst_s = 0.0;
        for (const auto& s : l53.slices) {
          worst_h = std::max(worst_h, s.holder > 0.0 ? s.lhs / s.holder : 0.0);
          worst_s = std::max(worst_s, s.stated > 0.0 ? s.lhs / s.stated : 0.0);
        }
        add({"l53", {{"T", traj.back().t}}, l53.value, 0.0, 0.0, "RECORD"});
        add({"l53_chain_holder", {{"violations", double(l53.holder_violations)}}, worst_h, 1.0, worst_h,
             l53.holder_violations == 0 ? "PASS" : "FAIL"});
        add({"l53_chain_stated", {{"violations", double(l53.stated_violations)}}, worst_s, 1.0, worst_s,
             l53.stated_violations == 0 ? "PASS" : "FAIL"});

        for (int n : a.gain_n) {
          const GainReport g = gain_integrability_bound(traj, n);
          add({"gain_integrability",
               {{"n", double(n)}, {"p", g.p}, {"alpha", g.alpha.value()}, {"lp_exponent", g.lp_exponent}, {"T", g.T}},
               g.sup_lp, g.shape, g.C, "RECORD"});
          add({"sup_a_chain", {{"n", double(n)}, {"violations", double(g.chain_violations)}},
               double(g.chain_violations), 0.0, 0.0, g.chain_violations == 0 ? "PASS" : "FAIL"});
        }
      },
      any);

  emit(Json{{"run_dir", a.dir}, {"reports", reports}, {"verdict", ok ? "PASS" : "FAIL"}}, a.out);
  return ok ? kOk : kVerdict;
}

// ---------------------------------------------------------------------------

struct DeGiorgiArgs {
  std::string dir, out, csv;
  double M = 0.0, M_factor = 2.0, R = 4.0, T = 0.0, calibration_M_factor = 0.0;
  int n_max = 10;
  std::int64_t threshold_n = 2;
  std::string p = "5/3", q = "3";
};

int cmd_degiorgi(const DeGiorgiArgs& a) {
  DeGiorgiParams prm;
  prm.p = parse_rational(a.p).value();
  prm.q = parse_rational(a.q);
  if (!(prm.p > 1.0)) throw ParameterError("degiorgi: p must exceed 1");
  if (!(prm.q > Rational(2) && prm.q < Rational(10, 3))) throw ParameterError("degiorgi: q must lie in (2, 10/3)");
  const io::AnyTrajectory any = io::load_trajectory(a.dir);
  const DeGiorgiReport rep = std::visit(
      [&](const auto& traj) {
        if (traj.size() < 2) throw ParameterError("degiorgi: need at least two slices");
        const double T = a.T > 0.0 ? a.T : traj.back().t;
        if (!(T > 0.0)) throw ParameterError("degiorgi: the run must cover a positive time span");
        const double su = sup_u(traj);
        const double M = a.M > 0.0 ? a.M : a.M_factor * su;
        const DeGiorgiLadder L(T, a.R, M, a.n_max);
        std::optional<DeGiorgiLadder> cal;
        if (a.calibration_M_factor > 0.0) cal.emplace(T, a.R, a.calibration_M_factor * su, a.n_max);
        return degiorgi_report(traj, L, prm, cal, a.threshold_n);
      },
      any);
  if (!a.csv.empty()) {
    std::string text = "n,U\n";
    for (const auto& e : rep.levels) text += std::to_string(e.n) + "," + io::fmt(e.U) + "\n";
    io::write_text(a.csv, text);
  }
  Json j = report::to_json(rep);
  j["run_dir"] = a.dir;
  emit(j, a.out);
  return rep.recurrence.verdict == "decay" ? kOk : kVerdict;
}

// ---------------------------------------------------------------------------

struct BarrierArgs {
  std::string dir, out, g = "power", table;
  double scale = 1.0, power = 1.0, p_weak = 2.0;
  bool monitor = false;
};

RadialField make_barrier(const BarrierArgs& a, const RadialGrid& grid) {
  require(a.scale > 0.0, "barrier: --g-scale must be positive");
  if (a.g == "constant") return RadialField::sample_radial(grid, [&](double) { return a.scale; });
  if (a.g == "power") {
    require(a.power > 0.0, "barrier: --g-power must be positive");
    return RadialField::sample_radial(grid, [&](double r) { return a.scale * std::pow(1.0 + r, -a.power); });
  }
  if (a.g == "rational")
    return RadialField::sample_radial(grid, [&](double r) { return a.scale / ((1.0 + r * r) * (1.0 + r * r)); });
  if (a.g == "table") {
    const RadialTable t = RadialTable::load(a.table);
    return RadialField::sample_radial(grid, [&](double r) { return a.scale * t(r); });
  }
  throw ParameterError("barrier: unknown --g '" + a.g + "' (supported: constant, power, rational, table)");
}

int cmd_barrier(const BarrierArgs& a) {
  const io::AnyTrajectory any = io::load_trajectory(a.dir);
  const auto* traj = std::get_if<Trajectory<RadialGrid>>(&any);
  if (!traj) throw ParameterError("barrier: needs a radial run");
  const RadialField g = make_barrier(a, traj->front().grid());
  const BarrierSpec spec(g, a.p_weak);

  Json slices = Json::array();
  bool pass = true;
  std::size_t monotone = 0;
  for (const auto& s : *traj) {
    const BarrierResult b = barrier_residual(s.u, spec.g);
    Json e = report::to_json(b);
    e["t"] = num(s.t);
    e["monotone"] = monotone_radial_check(s.u);
    monotone += monotone_radial_check(s.u);
    slices.push_back(e);
    pass = pass && b.pass;
  }
  Json j{{"run_dir", a.dir},
         {"g", Json{{"kind", a.g}, {"scale", num(a.scale)}, {"power", num(a.power)}, {"p_weak", num(a.p_weak)}}},
         {"slices", slices},
         {"monotone_slices", monotone},
         {"barrier_verdict", pass ? "PASS" : "FAIL"}};
  bool clean = true;
  if (a.monitor) {
    const ComparisonReport c = comparison_monitor(*traj, spec.g);
    j["comparison"] = report::to_json(c);
    clean = c.clean;
  }
  j["verdict"] = pass && clean ? "PASS" : "FAIL";
  emit(j, a.out);
  return pass && clean ? kOk : kVerdict;
}

// ---------------------------------------------------------------------------

struct CalibrateArgs {
  std::vector<std::string> dirs;
  std::string out;
  double a_ub_p = 1.5, h_lb_eps = 0.3, e_ub_p = 1.9, e_ub_eps = 0.3;
};

int cmd_calibrate(const CalibrateArgs& a) {
  std::vector<Trajectory<RadialGrid>> radial;
  std::vector<Trajectory<CartesianGrid3>> cart;
  for (const auto& d : a.dirs) {
    io::AnyTrajectory t = io::load_trajectory(d);
    if (auto* r = std::get_if<Trajectory<RadialGrid>>(&t)) radial.push_back(std::move(*r));
    else cart.push_back(std::move(std::get<Trajectory<CartesianGrid3>>(t)));
  }
  auto merged = [](const CalibrationResult& x, const CalibrationResult& y) {
    return CalibrationResult{std::max(x.C, y.C), x.samples + y.samples};
  };
  auto both = [&](auto fn) {
    CalibrationResult r{};
    if (!radial.empty()) r = merged(r, fn(radial));
    if (!cart.empty()) r = merged(r, fn(cart));
    return r;
  };
  const auto au = both([&](const auto& s) { return calibrate_a_upper(s, a.a_ub_p); });
  const auto hl = both([&](const auto& s) { return calibrate_h_lower(s, a.h_lb_eps); });
  const auto eu = both([&](const auto& s) { return calibrate_e_upper(s, a.e_ub_p, a.e_ub_eps); });
  BoundConstants c;
  c.a_ub_p = a.a_ub_p;
  c.a_ub_C = au.C;
  c.h_lb_eps = a.h_lb_eps;
  c.h_lb_C = hl.C;
  c.e_ub_p = a.e_ub_p;
  c.e_ub_eps = a.e_ub_eps;
  c.e_ub_C = eu.C;
  Json j{{"suite", a.dirs}, {"constants", report::to_json(c)},
         {"samples", Json{{"a_ub", au.samples}, {"h_lb", hl.samples}, {"e_ub", eu.samples}}}};
  emit(j, a.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isotropic Landau equation simulator and diagnostics"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Run a simulation into a directory");
  run->add_option("-c,--config", ra.config, "Key-value config file")->required();
  run->add_option("-o,--out", ra.out, "Output run directory")->required();
  run->add_option("-s,--set", ra.sets, "Override a config key (key=value)");
  run->add_option("--restart", ra.restart, "Continue from a checkpoint file");

  std::string diag_path, diag_out;
  auto* diag = app.add_subcommand("diagnose", "Recompute diagnostics from stored states");
  diag->add_option("path", diag_path, "Run directory or checkpoint file")->required();
  diag->add_option("-o,--out", diag_out, "Write the JSON report here");

  InequalityArgs ia;
  auto* ineq = app.add_subcommand("inequalities", "Probe functional inequalities on a run");
  ineq->add_option("run_dir", ia.dir)->required();
  ineq->add_option("-o,--out", ia.out);
  ineq->add_option("--eps", ia.eps, "eps grid for the eps-Poincare probe");
  ineq->add_option("--R", ia.R, "Restrict eps-Poincare test functions to B_R");
  ineq->add_option("--gks-p", ia.gks_p, "p values for the GKS ratio");
  ineq->add_option("--q", ia.q, "Exponent for the weighted Sobolev probe, in (1, 10/3)");
  ineq->add_option("--gain-n", ia.gain_n, "n values for the integrability gain");

  DeGiorgiArgs da;
  auto* dg = app.add_subcommand("degiorgi", "De Giorgi ladder energies and recurrence");
  dg->add_option("run_dir", da.dir)->required();
  dg->add_option("-o,--out", da.out);
  dg->add_option("--csv", da.csv, "Write (n, U_n) here");
  dg->add_option("--M", da.M, "Level M (overrides --M-factor)");
  dg->add_option("--M-factor", da.M_factor, "M as a multiple of sup u");
  dg->add_option("--R", da.R, "Outer radius R");
  dg->add_option("--T", da.T, "Final time T (default: last slice)");
  dg->add_option("--n-max", da.n_max)->check(CLI::Range(0, 40));
  dg->add_option("--p", da.p);
  dg->add_option("--q", da.q, "Recurrence exponent, in (2, 10/3)");
  dg->add_option("--calibration-M-factor", da.calibration_M_factor, "Calibrate the recurrence constant at this level");
  dg->add_option("--threshold-n", da.threshold_n, "n for the M threshold exponent");

  BarrierArgs ba;
  auto* br = app.add_subcommand("barrier", "Check a radial barrier and monitor u <= g");
  br->add_option("run_dir", ba.dir)->required();
  br->add_option("-o,--out", ba.out);
  br->add_option("--g", ba.g, "constant, power, rational or table");
  br->add_option("--g-scale", ba.scale);
  br->add_option("--g-power", ba.power);
  br->add_option("--g-table", ba.table);
  br->add_option("--p-weak", ba.p_weak);
  br->add_flag("--monitor", ba.monitor, "Also run the comparison monitor");

  CalibrateArgs ca;
  auto* cal = app.add_subcommand("calibrate", "Measure bound constants on a suite of runs");
  cal->add_option("run_dirs", ca.dirs)->required();
  cal->add_option("-o,--out", ca.out);
  cal->add_option("--a-ub-p", ca.a_ub_p);
  cal->add_option("--h-lb-eps", ca.h_lb_eps);
  cal->add_option("--e-ub-p", ca.e_ub_p);
  cal->add_option("--e-ub-eps", ca.e_ub_eps);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kParameter;
  }

  try {
    if (*run) return cmd_run(ra);
    if (*diag) return cmd_diagnose(diag_path, diag_out);
    if (*ineq) return cmd_inequalities(ia);
    if (*dg) return cmd_degiorgi(da);
    if (*br) return cmd_barrier(ba);
    if (*cal) return cmd_calibrate(ca);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParameter;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParameter;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kRuntime;
}
