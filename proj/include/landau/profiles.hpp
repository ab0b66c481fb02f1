#pragma once

// Initial-data profiles.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "landau/errors.hpp"
#include "landau/field.hpp"

namespace landau {

/// Maxwellian of given mass and temperature (variance per axis).
inline double maxwellian(double r, double mass = 1.0, double temperature = 1.0) {
  const double norm = mass / std::pow(2.0 * std::numbers::pi * temperature, 1.5);
  return norm * std::exp(-r * r / (2.0 * temperature));
}

/// Tabulated radial profile, linear interpolation, zero beyond the last sample.
class RadialTable {
 public:
  RadialTable() = default;
  explicit RadialTable(std::vector<std::pair<double, double>> samples) : s_(std::move(samples)) {
    require(s_.size() >= 2, "custom-table: need at least two samples");
    for (std::size_t i = 1; i < s_.size(); ++i)
      require(s_[i].first > s_[i - 1].first, "custom-table: radii must be strictly increasing");
    for (auto& [r, u] : s_) require(std::isfinite(u) && u >= 0.0, "custom-table: values must be finite and >= 0");
  }

  static RadialTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("custom-table: cannot open '" + path + "'");
    std::vector<std::pair<double, double>> s;
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ls(line);
      double r, u;
      if (ls >> r >> u) s.emplace_back(r, u);
    }
    return RadialTable(std::move(s));
  }

  double operator()(double r) const {
    if (s_.empty() || r > s_.back().first) return 0.0;
    if (r <= s_.front().first) return s_.front().second;
    const auto it = std::lower_bound(s_.begin(), s_.end(), r, [](auto& e, double x) { return e.first < x; });
    const auto& [r1, u1] = *it;
    const auto& [r0, u0] = *(it - 1);
    return u0 + (u1 - u0) * (r - r0) / (r1 - r0);
  }

 private:
  std::vector<std::pair<double, double>> s_;
};

enum class ProfileKind { maxwellian, uniform_ball, gaussian_mixture, plateau, custom_table };

inline const char* supported_profiles() { return "maxwellian, uniform_ball, gaussian_mixture, plateau, custom-table"; }

inline ProfileKind parse_profile(const std::string& s) {
  if (s == "maxwellian") return ProfileKind::maxwellian;
  if (s == "uniform_ball") return ProfileKind::uniform_ball;
  if (s == "gaussian_mixture") return ProfileKind::gaussian_mixture;
  if (s == "plateau") return ProfileKind::plateau;
  if (s == "custom-table" || s == "custom_table") return ProfileKind::custom_table;
  throw ParameterError("unknown init.profile '" + s + "'; supported profiles: " + supported_profiles());
}

/// Parameters of an initial profile. Unused members are ignored by a given kind.
struct ProfileSpec {
  ProfileKind kind = ProfileKind::maxwellian;
  double mass = 1.0;
  double temperature = 1.0;   ///< maxwellian variance
  double radius = 1.0;        ///< uniform_ball / plateau radius
  double density = 1.0;       ///< uniform_ball / plateau height
  double width = 0.25;        ///< plateau edge width
  double temperature2 = 4.0;  ///< second mixture component variance
  double weight2 = 0.5;       ///< mass fraction of the second component
  Vec3 center{0.0, 0.0, 0.0}; ///< shift (cartesian grids only)
  std::string table_path;
};

/// Evaluates a profile at a point (radial grids pass (r, 0, 0)).
inline auto make_profile(const ProfileSpec& spec) {
  RadialTable table;
  if (spec.kind == ProfileKind::custom_table) table = RadialTable::load(spec.table_path);
  return [spec, table](const Vec3& x) -> double {
    const Vec3 d{x[0] - spec.center[0], x[1] - spec.center[1], x[2] - spec.center[2]};
    const double r = norm(d);
    switch (spec.kind) {
      case ProfileKind::maxwellian:
        return maxwellian(r, spec.mass, spec.temperature);
      case ProfileKind::uniform_ball:
        return r <= spec.radius ? spec.density : 0.0;
      case ProfileKind::gaussian_mixture:
        return maxwellian(r, spec.mass * (1.0 - spec.weight2), spec.temperature) +
               maxwellian(r, spec.mass * spec.weight2, spec.temperature2);
      case ProfileKind::plateau: {
        // smooth flat top: density * (1 - tanh((r - R)/w))/2
        return spec.density * 0.5 * (1.0 - std::tanh((r - spec.radius) / spec.width));
      }
      case ProfileKind::custom_table:
        return table(r);
    }
    return 0.0;
  };
}

template <Grid G>
Field<G> sample_profile(const G& grid, const ProfileSpec& spec) {
  return Field<G>::sample(grid, make_profile(spec));
}

}  // namespace landau
