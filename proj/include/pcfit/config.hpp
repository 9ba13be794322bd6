#pragma once

// Flat key=value settings shared by every CLI subcommand.
//
// Values are layered: built-in defaults, then a config file, then command
// line overrides. Range keys that are never set fall back to the 512x512
// defaults rescaled to the image at hand.

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "pcfit/error.hpp"
#include "pcfit/evolve.hpp"
#include "pcfit/imaging.hpp"
#include "pcfit/scoring.hpp"
#include "pcfit/synthesis.hpp"
#include "pcfit/text.hpp"

namespace pcfit {

using KeyValues = std::map<std::string, std::string, std::less<>>;

inline constexpr auto kConfigKeys = std::to_array<std::string_view>({
    // GA
    "population_size", "children_per_generation", "generations", "m", "u", "seed", "stagnation_window",
    // search box
    "theta_min", "theta_max", "xc_min", "xc_max", "yc_min", "yc_max", "a_min", "a_max", "b_min", "b_max",
    // objective
    "q_r", "q_g", "q_c", "q_b",
    // palette
    "palette_red", "palette_green", "palette_grey", "palette_black", "palette_other", "palette_tolerance",
    // overlay
    "outline_epsilon", "outline_color",
    // phantom
    "phantom_width", "phantom_height", "phantom_theta", "phantom_xc", "phantom_yc", "phantom_a", "phantom_b",
    "ring_thickness", "red_fill_fraction", "grey_blob_count", "noise_flip_fraction", "phantom_seed",
    // oracle grid
    "grid_theta_step", "grid_xc_step", "grid_yc_step", "grid_a_step", "grid_b_step",
    // batch
    "jobs", "seeds"});

inline bool is_known_key(std::string_view key) {
  return std::find(kConfigKeys.begin(), kConfigKeys.end(), key) != kConfigKeys.end();
}

/// Parses `key = value` lines; '#' starts a comment. Unknown keys and
/// malformed lines are errors.
inline KeyValues parse_key_values(std::string_view text, std::string_view origin = "config") {
  KeyValues kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = std::string(origin) + ":" + std::to_string(lineno);
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key=value");
    const std::string key(trim(body.substr(0, eq)));
    const std::string value(trim(body.substr(eq + 1)));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (!is_known_key(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    kv[key] = value;
  }
  return kv;
}

inline KeyValues load_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str(), path.string());
}

/// `overrides` win over `base`.
inline KeyValues merge(KeyValues base, const KeyValues& overrides) {
  for (const auto& [k, v] : overrides) base[k] = v;
  return base;
}

inline Rgb parse_rgb(std::string_view text, std::string_view what) {
  std::array<long long, 3> c{};
  std::size_t start = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto comma = text.find(',', start);
    if ((i < 2) != (comma != std::string_view::npos)) {
      throw ConfigError("invalid color for " + std::string(what) + ": expected r,g,b");
    }
    const auto piece = text.substr(start, i < 2 ? comma - start : std::string_view::npos);
    c[i] = parse_int(piece, what);
    if (c[i] < 0 || c[i] > 255) throw ConfigError("color channel out of range for " + std::string(what));
    start = comma + 1;
  }
  return Rgb{static_cast<std::uint8_t>(c[0]), static_cast<std::uint8_t>(c[1]), static_cast<std::uint8_t>(c[2])};
}

/// Every typed setting resolved from a KeyValues table.
struct Settings {
  GAConfig ga;
  ClassWeights weights;
  ClassPalette palette;
  OutlineStyle outline;
  PhantomSpec phantom;
  GridSpec grid;
  KeyValues raw;

  /// Short one-line description of the GA constants for run logs.
  std::string summary() const {
    return "pop=" + std::to_string(ga.population_size) + " children=" + std::to_string(ga.children_per_generation) +
           " n=" + std::to_string(ga.generations) + " m=" + std::to_string(ga.m) + " u=" + std::to_string(ga.u) +
           " q=" + format_double(weights.q_r) + "/" + format_double(weights.q_g) + "/" +
           format_double(weights.q_c) + "/" + format_double(weights.q_b);
  }
};

namespace detail {

class Reader {
 public:
  explicit Reader(const KeyValues& kv) : kv_(kv) {}

  const std::string* find(std::string_view key) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? nullptr : &it->second;
  }
  void real(std::string_view key, double& out) const {
    if (const auto* v = find(key)) out = parse_double(*v, key);
  }
  void integer(std::string_view key, int& out) const {
    if (const auto* v = find(key)) {
      const long long x = parse_int(*v, key);
      if (x < -2147483647LL || x > 2147483647LL) throw ConfigError(std::string(key) + " is out of range");
      out = static_cast<int>(x);
    }
  }
  void integer(std::string_view key, long& out) const {
    if (const auto* v = find(key)) out = static_cast<long>(parse_int(*v, key));
  }
  void unsigned_int(std::string_view key, std::uint64_t& out) const {
    if (const auto* v = find(key)) out = parse_uint(*v, key);
  }
  void color(std::string_view key, Rgb& out) const {
    if (const auto* v = find(key)) out = parse_rgb(*v, key);
  }
  void interval(std::string_view lo_key, std::string_view hi_key, Interval& out) const {
    real(lo_key, out.lo);
    real(hi_key, out.hi);
  }

 private:
  const KeyValues& kv_;
};

}  // namespace detail

/// Resolves typed settings. `image_width`/`image_height` select the default
/// search box when the range keys are absent.
inline Settings resolve_settings(const KeyValues& kv, long image_width = 512, long image_height = 512) {
  const detail::Reader rd(kv);
  Settings s;
  s.raw = kv;

  rd.integer("population_size", s.ga.population_size);
  rd.integer("children_per_generation", s.ga.children_per_generation);
  rd.integer("generations", s.ga.generations);
  rd.integer("m", s.ga.m);
  rd.integer("u", s.ga.u);
  rd.unsigned_int("seed", s.ga.seed);
  if (rd.find("stagnation_window")) {
    int w = 0;
    rd.integer("stagnation_window", w);
    s.ga.stagnation_window = w;
  }

  s.ga.ranges = ParameterRanges::scaled_for(image_width, image_height);
  rd.interval("theta_min", "theta_max", s.ga.ranges.theta);
  rd.interval("xc_min", "xc_max", s.ga.ranges.x_c);
  rd.interval("yc_min", "yc_max", s.ga.ranges.y_c);
  rd.interval("a_min", "a_max", s.ga.ranges.a);
  rd.interval("b_min", "b_max", s.ga.ranges.b);

  rd.real("q_r", s.weights.q_r);
  rd.real("q_g", s.weights.q_g);
  rd.real("q_c", s.weights.q_c);
  rd.real("q_b", s.weights.q_b);

  rd.color("palette_red", s.palette.red);
  rd.color("palette_green", s.palette.green);
  rd.color("palette_grey", s.palette.grey);
  rd.color("palette_black", s.palette.black);
  rd.color("palette_other", s.palette.other);
  rd.integer("palette_tolerance", s.palette.tolerance);

  rd.real("outline_epsilon", s.outline.epsilon);
  rd.color("outline_color", s.outline.color);

  rd.integer("phantom_width", s.phantom.width);
  rd.integer("phantom_height", s.phantom.height);
  rd.real("phantom_theta", s.phantom.planted.theta);
  rd.real("phantom_xc", s.phantom.planted.x_c);
  rd.real("phantom_yc", s.phantom.planted.y_c);
  rd.real("phantom_a", s.phantom.planted.a);
  rd.real("phantom_b", s.phantom.planted.b);
  rd.real("ring_thickness", s.phantom.ring_thickness);
  rd.real("red_fill_fraction", s.phantom.red_fill_fraction);
  rd.integer("grey_blob_count", s.phantom.grey_blob_count);
  rd.real("noise_flip_fraction", s.phantom.noise_flip_fraction);
  rd.unsigned_int("phantom_seed", s.phantom.seed);

  s.grid.box = s.ga.ranges;
  rd.real("grid_theta_step", s.grid.steps[0]);
  rd.real("grid_xc_step", s.grid.steps[1]);
  rd.real("grid_yc_step", s.grid.steps[2]);
  rd.real("grid_a_step", s.grid.steps[3]);
  rd.real("grid_b_step", s.grid.steps[4]);

  s.ga.validate();
  s.weights.validate();
  s.palette.validate();
  s.outline.validate();
  return s;
}

/// Ground-truth sidecar: one `key=value` line per gene.
inline std::string format_params(const EllipseParams& p) {
  return "theta=" + format_double(p.theta) + "\nxc=" + format_double(p.x_c) + "\nyc=" + format_double(p.y_c) +
         "\na=" + format_double(p.a) + "\nb=" + format_double(p.b) + "\n";
}

inline EllipseParams parse_params(std::string_view text) {
  std::optional<double> v[5];
  static constexpr std::string_view kNames[] = {"theta", "xc", "yc", "a", "b"};
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigError("parameter file: expected key=value");
    const auto key = trim(body.substr(0, eq));
    const auto it = std::find(std::begin(kNames), std::end(kNames), key);
    if (it == std::end(kNames)) throw ConfigError("parameter file: unknown key '" + std::string(key) + "'");
    v[it - std::begin(kNames)] = parse_double(body.substr(eq + 1), key);
  }
  for (std::size_t i = 0; i < 5; ++i) {
    if (!v[i]) throw ConfigError("parameter file: missing " + std::string(kNames[i]));
  }
  return validated(EllipseParams{*v[0], *v[1], *v[2], *v[3], *v[4]});
}

}  // namespace pcfit
