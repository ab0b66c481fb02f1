#pragma once

// Text configuration, binary checkpoints and CSV rows.

#include <zlib.h>

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "landau/diagnostics.hpp"
#include "landau/dynamics.hpp"
#include "landau/errors.hpp"
#include "landau/state.hpp"

namespace landau::io {

// ---------------------------------------------------------------------------
// Number formatting

/// Shortest-safe round-trip form: 17 significant digits.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(std::string_view key, std::string_view s) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ParameterError("config key '" + std::string(key) + "': not a number: '" + std::string(s) + "'");
  return v;
}

inline std::size_t parse_count(std::string_view key, std::string_view s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParameterError("config key '" + std::string(key) + "': not a nonnegative integer: '" + std::string(s) + "'");
  return v;
}

inline bool parse_bool(std::string_view key, std::string_view s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ParameterError("config key '" + std::string(key) + "': expected true or false");
}

// ---------------------------------------------------------------------------
// Configuration

/// Everything a run needs: the simulation config plus output switches.
struct RunSpec {
  SimConfig sim;
  bool store_states = true;  ///< write every emitted slice under states/
};

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

/// key = value lines; '#' starts a comment. Later keys override earlier ones.
inline std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParameterError("config line " + std::to_string(lineno) + ": expected key = value");
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

inline Vec3 parse_vec3(std::string_view key, const std::string& s) {
  std::string t = s;
  for (char& c : t)
    if (c == ',') c = ' ';
  std::istringstream in(t);
  std::string a, b, c;
  if (!(in >> a >> b >> c)) throw ParameterError("config key '" + std::string(key) + "': expected three numbers");
  return {parse_double(key, a), parse_double(key, b), parse_double(key, c)};
}

/// Applies one key; unknown keys are rejected by name.
inline void apply_key(RunSpec& spec, const std::string& key, const std::string& value) {
  SimConfig& c = spec.sim;
  ProfileSpec& p = c.init;
  BoundConstants& b = c.bounds;
  auto num = [&] { return parse_double(key, value); };
  if (key == "form") c.form = parse_form(value);
  else if (key == "alpha") c.alpha = num();
  else if (key == "grid.kind") c.grid.kind = parse_grid_kind(value);
  else if (key == "grid.extent") c.grid.extent = num();
  else if (key == "grid.n") c.grid.n = parse_count(key, value);
  else if (key == "t_end") c.t_end = num();
  else if (key == "cfl_safety") c.cfl_safety = num();
  else if (key == "blowup_factor") c.blowup_factor = num();
  else if (key == "output.stride") c.output_stride = parse_count(key, value);
  else if (key == "output.interval") c.output_interval = num();
  else if (key == "output.checkpoint_every") c.checkpoint_every = parse_count(key, value);
  else if (key == "output.states") spec.store_states = parse_bool(key, value);
  else if (key == "init.profile") p.kind = parse_profile(value);
  else if (key == "init.mass") p.mass = num();
  else if (key == "init.temperature") p.temperature = num();
  else if (key == "init.radius") p.radius = num();
  else if (key == "init.density") p.density = num();
  else if (key == "init.width") p.width = num();
  else if (key == "init.temperature2") p.temperature2 = num();
  else if (key == "init.weight2") p.weight2 = num();
  else if (key == "init.center") p.center = parse_vec3(key, value);
  else if (key == "init.table") p.table_path = value;
  else if (key == "bounds.a_ub_p") b.a_ub_p = num();
  else if (key == "bounds.a_ub_C") b.a_ub_C = num();
  else if (key == "bounds.h_lb_eps") b.h_lb_eps = num();
  else if (key == "bounds.h_lb_C") b.h_lb_C = num();
  else if (key == "bounds.e_ub_p") b.e_ub_p = num();
  else if (key == "bounds.e_ub_eps") b.e_ub_eps = num();
  else if (key == "bounds.e_ub_C") b.e_ub_C = num();
  else throw ParameterError("unknown config key '" + key + "'");
}

inline RunSpec parse_run_spec(const std::string& text, const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
  RunSpec spec;
  for (const auto& [k, v] : parse_key_values(text)) apply_key(spec, k, v);
  for (const auto& [k, v] : overrides) apply_key(spec, k, v);
  spec.sim.validate();
  return spec;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), {}};
}

inline RunSpec load_run_spec(const std::string& path, const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
  return parse_run_spec(read_text(path), overrides);
}

inline const char* profile_name(ProfileKind k) {
  switch (k) {
    case ProfileKind::maxwellian: return "maxwellian";
    case ProfileKind::uniform_ball: return "uniform_ball";
    case ProfileKind::gaussian_mixture: return "gaussian_mixture";
    case ProfileKind::plateau: return "plateau";
    case ProfileKind::custom_table: return "custom-table";
  }
  return "maxwellian";
}

/// Canonical key/value echo of a spec; parses back to the same spec.
inline std::vector<std::pair<std::string, std::string>> echo(const RunSpec& spec) {
  const SimConfig& c = spec.sim;
  const ProfileSpec& p = c.init;
  const BoundConstants& b = c.bounds;
  std::vector<std::pair<std::string, std::string>> kv = {
      {"form", to_string(c.form)},
      {"alpha", fmt(c.alpha)},
      {"grid.kind", to_string(c.grid.kind)},
      {"grid.extent", fmt(c.grid.extent)},
      {"grid.n", std::to_string(c.grid.n)},
      {"t_end", fmt(c.t_end)},
      {"cfl_safety", fmt(c.cfl_safety)},
      {"blowup_factor", fmt(c.blowup_factor)},
      {"output.stride", std::to_string(c.output_stride)},
      {"output.interval", fmt(c.output_interval)},
      {"output.checkpoint_every", std::to_string(c.checkpoint_every)},
      {"output.states", spec.store_states ? "true" : "false"},
      {"init.profile", profile_name(p.kind)},
      {"init.mass", fmt(p.mass)},
      {"init.temperature", fmt(p.temperature)},
      {"init.radius", fmt(p.radius)},
      {"init.density", fmt(p.density)},
      {"init.width", fmt(p.width)},
      {"init.temperature2", fmt(p.temperature2)},
      {"init.weight2", fmt(p.weight2)},
      {"init.center", fmt(p.center[0]) + "," + fmt(p.center[1]) + "," + fmt(p.center[2])},
      {"bounds.a_ub_p", fmt(b.a_ub_p)},
      {"bounds.a_ub_C", fmt(b.a_ub_C)},
      {"bounds.h_lb_eps", fmt(b.h_lb_eps)},
      {"bounds.h_lb_C", fmt(b.h_lb_C)},
      {"bounds.e_ub_p", fmt(b.e_ub_p)},
      {"bounds.e_ub_eps", fmt(b.e_ub_eps)},
      {"bounds.e_ub_C", fmt(b.e_ub_C)},
  };
  if (p.kind == ProfileKind::custom_table) kv.emplace_back("init.table", p.table_path);
  return kv;
}

inline std::string echo_text(const RunSpec& spec) {
  std::string out;
  for (const auto& [k, v] : echo(spec)) out += k + " = " + v + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoints
//
// "LNDAU1" | kind u8 | extent f64 | n u32 | t f64 | step u64 | clipped f64 |
// count u64 | values f64[count] | crc32 u32 (of everything after the magic)
// All multi-byte fields little-endian.

inline constexpr char kMagic[6] = {'L', 'N', 'D', 'A', 'U', '1'};

namespace detail {

template <class T>
void put(std::string& buf, T v) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
  U bits = std::bit_cast<U>(v);
  for (std::size_t i = 0; i < sizeof(U); ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

template <class T>
T get(const std::string& buf, std::size_t& pos) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
  if (pos + sizeof(U) > buf.size()) throw InputError("checkpoint: truncated file");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
  pos += sizeof(U);
  return std::bit_cast<T>(bits);
}

inline std::uint32_t crc(const char* data, std::size_t n) {
  return static_cast<std::uint32_t>(::crc32(0L, reinterpret_cast<const Bytef*>(data), static_cast<uInt>(n)));
}

}  // namespace detail

template <Grid G>
std::string encode_checkpoint(const SimState<G>& s) {
  std::string buf(kMagic, kMagic + 6);
  const G& g = s.grid();
  detail::put<std::uint8_t>(buf, std::is_same_v<G, RadialGrid> ? 0 : 1);
  detail::put<double>(buf, g.extent());
  std::size_t n;
  if constexpr (std::is_same_v<G, RadialGrid>) n = g.n_points();
  else n = g.n_per_axis();
  detail::put<std::uint32_t>(buf, static_cast<std::uint32_t>(n));
  detail::put<double>(buf, s.t);
  detail::put<std::uint64_t>(buf, s.step);
  detail::put<double>(buf, s.clipped_mass);
  detail::put<std::uint64_t>(buf, s.u.size());
  for (double v : s.u.values()) detail::put<double>(buf, v);
  detail::put<std::uint32_t>(buf, detail::crc(buf.data() + 6, buf.size() - 6));
  return buf;
}

template <Grid G>
void write_checkpoint(const std::string& path, const SimState<G>& s) {
  const std::string buf = encode_checkpoint(s);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

using AnyState = std::variant<SimState<RadialGrid>, SimState<CartesianGrid3>>;

inline AnyState decode_checkpoint(const std::string& buf) {
  if (buf.size() < 6 + 4 || std::memcmp(buf.data(), kMagic, 6) != 0) throw InputError("checkpoint: bad magic bytes");
  std::size_t tail = buf.size() - 4;
  std::uint32_t stored = 0;
  {
    std::size_t pos = tail;
    stored = detail::get<std::uint32_t>(buf, pos);
  }
  if (detail::crc(buf.data() + 6, tail - 6) != stored) throw ChecksumError("checkpoint: CRC-32 mismatch");
  std::size_t pos = 6;
  const auto kind = detail::get<std::uint8_t>(buf, pos);
  const double extent = detail::get<double>(buf, pos);
  const std::uint32_t n = detail::get<std::uint32_t>(buf, pos);
  const double t = detail::get<double>(buf, pos);
  const std::uint64_t step = detail::get<std::uint64_t>(buf, pos);
  const double clipped = detail::get<double>(buf, pos);
  const std::uint64_t count = detail::get<std::uint64_t>(buf, pos);
  if (pos + count * 8 != tail) throw InputError("checkpoint: value count does not match file size");
  std::vector<double> vals(count);
  for (auto& v : vals) v = detail::get<double>(buf, pos);
  if (kind == 0) {
    RadialGrid g(extent, n);
    return SimState<RadialGrid>::make(Field<RadialGrid>(g, std::move(vals)), t, step, clipped);
  }
  if (kind == 1) {
    CartesianGrid3 g(extent, n);
    return SimState<CartesianGrid3>::make(Field<CartesianGrid3>(g, std::move(vals)), t, step, clipped);
  }
  throw InputError("checkpoint: unknown grid kind");
}

inline AnyState read_checkpoint(const std::string& path) { return decode_checkpoint(read_text(path)); }

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kCsvHeader = "t,mass,mx,my,mz,E,H,D,kappa,fisher,a_lb_margin,clipped_mass";

inline std::vector<double> csv_values(const DiagnosticsRecord& r) {
  return {r.t, r.mass, r.first_moment[0], r.first_moment[1], r.first_moment[2], r.E, r.H, r.D, r.kappa, r.fisher,
          r.a_lb_margin, r.clipped_mass};
}

inline std::string csv_row(const DiagnosticsRecord& r) {
  std::string row;
  for (double v : csv_values(r)) {
    if (!row.empty()) row += ',';
    row += fmt(v);
  }
  return row;
}

/// Parses a diagnostics.csv into rows of numbers; validates the header.
inline std::vector<std::vector<double>> read_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw InputError("diagnostics.csv: unexpected header");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace landau::io
