#pragma once

// JSON views of records and reports. Key order is fixed so that identical
// inputs always serialize to identical bytes.

#include <cmath>
#include <string>

#include "json.hpp"
#include "landau/barrier.hpp"
#include "landau/degiorgi.hpp"
#include "landau/diagnostics.hpp"
#include "landau/dynamics.hpp"
#include "landau/inequalities.hpp"

namespace landau::report {

using Json = nlohmann::ordered_json;

/// Non-finite values become strings ("inf", "-inf", "nan") instead of null.
inline Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline std::string rational(Rational r) {
  std::ostringstream s;
  s << r;
  return s.str();
}

inline Json to_json(const DiagnosticsRecord& r) {
  Json j;
  j["t"] = num(r.t);
  j["mass"] = num(r.mass);
  j["first_moment"] = Json::array({num(r.first_moment[0]), num(r.first_moment[1]), num(r.first_moment[2])});
  j["E"] = num(r.E);
  j["H"] = num(r.H);
  j["D"] = num(r.D);
  j["kappa"] = num(r.kappa);
  j["fisher"] = num(r.fisher);
  j["a_lb_margin"] = num(r.a_lb_margin);
  j["a_ub_margin"] = num(r.a_ub_margin);
  j["H_lb_margin"] = num(r.H_lb_margin);
  j["E_ub_margin"] = num(r.E_ub_margin);
  j["clipped_mass"] = num(r.clipped_mass);
  j["two_int_ua"] = num(r.two_int_ua);
  return j;
}

inline Json to_json(const BoundConstants& c) {
  return Json{{"a_ub_p", num(c.a_ub_p)},     {"a_ub_C", num(c.a_ub_C)}, {"h_lb_eps", num(c.h_lb_eps)},
              {"h_lb_C", num(c.h_lb_C)},     {"e_ub_p", num(c.e_ub_p)}, {"e_ub_eps", num(c.e_ub_eps)},
              {"e_ub_C", num(c.e_ub_C)}};
}

inline Json to_json(const BoundViolations& v) {
  return Json{{"checked_slices", v.checked_slices},
              {"a_lower", v.a_lower},
              {"kappa_chain", v.kappa_chain},
              {"a_upper", v.a_upper},
              {"h_lower", v.h_lower},
              {"worst_a_lower_margin", num(v.worst_a_lower_margin)},
              {"worst_a_upper_margin", num(v.worst_a_upper_margin)},
              {"worst_h_lower_margin", num(v.worst_h_lower_margin)}};
}

inline Json to_json(const InequalityReport& r) {
  Json params = Json::object();
  for (const auto& [k, v] : r.params) params[k] = num(v);
  return Json{{"name", r.name}, {"params", params}, {"lhs", num(r.lhs)}, {"rhs", num(r.rhs)},
              {"ratio", num(r.ratio)}, {"verdict", r.verdict}};
}

inline Json to_json(const LevelEnergy& e) {
  return Json{{"n", e.n},           {"T_n", num(e.T_n)},       {"R_n", num(e.R_n)},
              {"k_n", num(e.k_n)},  {"time_term", num(e.time_term)}, {"a_term", num(e.a_term)},
              {"k_term", num(e.k_term)}, {"U", num(e.U)}};
}

inline Json to_json(const DeGiorgiReport& r) {
  Json levels = Json::array();
  for (std::size_t n = 0; n < r.levels.size(); ++n) {
    Json e = to_json(r.levels[n]);
    e["C_grad"] = num(r.cutoffs[n].C_grad);
    e["C_hess"] = num(r.cutoffs[n].C_hess);
    e["support_mismatches"] = r.support_mismatches[n];
    e["recurrence_holds"] = static_cast<bool>(r.recurrence.holds[n]);
    levels.push_back(e);
  }
  Json j;
  j["name"] = "degiorgi";
  j["params"] = Json{{"T", num(r.ladder.T)}, {"R", num(r.ladder.R)},     {"M", num(r.ladder.M)},
                     {"n_max", r.ladder.n_max}, {"p", num(r.params.p)}, {"q", rational(r.params.q)},
                     {"C_eps", num(r.C_eps)},   {"C_p", num(r.C_p)}};
  j["levels"] = levels;
  j["recurrence"] = Json{{"C", num(r.recurrence.C)},
                         {"calibration", r.calibration},
                         {"seed", num(r.recurrence.seed)},
                         {"threshold", num(r.recurrence.threshold)},
                         {"seed_ok", r.recurrence.seed_ok},
                         {"degenerate", r.recurrence.degenerate}};
  if (r.threshold)
    j["m_threshold"] = Json{{"n", r.threshold->n},
                            {"q", rational(r.threshold->q)},
                            {"alpha", rational(r.threshold->alpha)},
                            {"alpha_value", num(r.threshold->alpha.value())},
                            {"threshold_shape", num(r.threshold->threshold)}};
  j["verdict"] = r.recurrence.verdict;
  return j;
}

inline Json to_json(const BarrierResult& b) {
  return Json{{"max", num(b.max)}, {"argmax_r", num(b.argmax_r)}, {"min", num(b.min)},
              {"verdict", b.pass ? "PASS" : "FAIL"}};
}

inline Json to_json(const ComparisonReport& c) {
  Json j{{"slices", c.slices}, {"worst_margin", num(c.worst_margin)}, {"verdict", c.clean ? "CLEAN" : "VIOLATION"}};
  if (c.first_violation_t) j["first_violation_t"] = num(*c.first_violation_t);
  return j;
}

inline Json to_json(const BlowupReport& b) {
  return Json{{"t", num(b.t)}, {"step", b.step}, {"max_u", num(b.max_u)}, {"ceiling", num(b.ceiling)}};
}

}  // namespace landau::report
