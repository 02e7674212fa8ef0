#pragma once

// Scenario files: line oriented `key = value` under `[section]` headers.
// `#` and `;` start comments. Keys outside any section belong to the
// top-level scenario block. The canonical serializer writes every field in a
// fixed order, so two configs are equal exactly when their canonical texts
// are.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stimspdc/geometry.hpp"

namespace stimspdc::app {

class ConfigError : public std::runtime_error
{
public:
  ConfigError(std::size_t line, std::string field, const std::string& message)
    : std::runtime_error(format(line, field, message)), line_(line), field_(std::move(field))
  {}

  std::size_t line() const { return line_; } ///< 0 when not tied to a line
  const std::string& field() const { return field_; }

private:
  static std::string format(std::size_t line, const std::string& field, const std::string& message)
  {
    std::string s = "config";
    if (line > 0)
      s += ":" + std::to_string(line);
    if (!field.empty())
      s += " [" + field + "]";
    return s + ": " + message;
  }

  std::size_t line_;
  std::string field_;
};

struct GridConfig
{
  int dims = 1;
  std::size_t samples = 256;
  double extent_m = 1e-3;
  double center_m = 0.0;

  bool operator==(const GridConfig&) const = default;
};

struct BeamConfig
{
  std::string shape = "uniform"; ///< uniform | gaussian | mask-file | tilted
  std::string envelope = "uniform"; ///< envelope under a tilted shape: uniform | gaussian
  double amplitude = 1.0;
  double half_width_m = 0.0; ///< uniform: 0 fills the source grid
  double waist_m = 0.0;
  double center_m = 0.0;
  double tilt_rad_per_m = 0.0;
  std::string mask_file;

  bool operator==(const BeamConfig&) const = default;
};

struct ApertureConfig
{
  std::string type = "none"; ///< none | double-slit | slit-list | mask-file
  double half_separation_m = 0.0;
  std::vector<double> positions_m;
  std::string mask_file;

  bool operator==(const ApertureConfig&) const = default;
};

struct GeometryConfig
{
  std::optional<double> wavelength_m;
  std::optional<double> wavenumber_rad_per_m;
  double z_m = 0.0;
  std::optional<double> screen_z_m;

  bool operator==(const GeometryConfig&) const = default;

  OpticalGeometry build() const
  {
    const double k = wavenumber_rad_per_m ? *wavenumber_rad_per_m : 2.0 * std::numbers::pi / *wavelength_m;
    return OpticalGeometry(k, z_m, screen_z_m);
  }
};

struct AnalysisConfig
{
  bool adjudicate_beta = false;
  std::size_t source_stride = 1;
  bool image_reference = false; ///< compare stimulated term with pump-only propagation
  bool centroid = false;        ///< phase-conjugation centroid check

  bool operator==(const AnalysisConfig&) const = default;
};

struct SweepConfig
{
  std::size_t count = 0;
  double d_min_m = 0.0;
  double d_max_m = 0.0;
  double detector_periods = 4.0;

  bool operator==(const SweepConfig&) const = default;
};

struct ScenarioConfig
{
  std::string name = "scenario";
  std::string pipeline = "screened"; ///< free | screened | fraunhofer | brute | analytic
  BetaConvention beta_convention = BetaConvention::derived;
  std::uint64_t seed = 0;
  GeometryConfig geometry;
  GridConfig source_grid;
  std::optional<GridConfig> detector; ///< defaults to the source grid
  BeamConfig pump;
  BeamConfig stimulating;
  ApertureConfig aperture;
  AnalysisConfig analysis;
  SweepConfig sweep;
  double jitter = 0.0; ///< relative amplitude / separation jitter under --seed
  std::string output_dir = "out";

  bool operator==(const ScenarioConfig&) const = default;

  GridConfig detector_grid() const { return detector ? *detector : source_grid; }

  void validate() const;
};

inline bool is_pipeline_name(std::string_view p)
{
  return p == "free" || p == "screened" || p == "fraunhofer" || p == "brute" || p == "analytic";
}

namespace detail {

inline std::string trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string fmt_double(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Entry
{
  std::string value;
  std::size_t line;
};

class Reader
{
public:
  Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::optional<std::string> text(const std::string& key)
  {
    auto it = entries_.find(key);
    if (it == entries_.end())
      return std::nullopt;
    used_.push_back(key);
    return it->second.value;
  }

  std::optional<double> number(const std::string& key)
  {
    auto t = text(key);
    if (!t)
      return std::nullopt;
    return parse_double(key, *t);
  }

  std::optional<std::size_t> count(const std::string& key)
  {
    auto t = text(key);
    if (!t)
      return std::nullopt;
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(t->data(), t->data() + t->size(), v);
    if (ec != std::errc{} || p != t->data() + t->size())
      fail(key, "expected a non-negative integer, got '" + *t + "'");
    return v;
  }

  std::optional<bool> flag(const std::string& key)
  {
    auto t = text(key);
    if (!t)
      return std::nullopt;
    if (*t == "true" || *t == "yes" || *t == "1")
      return true;
    if (*t == "false" || *t == "no" || *t == "0")
      return false;
    fail(key, "expected true or false, got '" + *t + "'");
  }

  std::optional<std::vector<double>> list(const std::string& key)
  {
    auto t = text(key);
    if (!t)
      return std::nullopt;
    std::vector<double> out;
    std::stringstream ss(*t);
    std::string item;
    while (std::getline(ss, item, ','))
      out.push_back(parse_double(key, trim(item)));
    return out;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const
  {
    auto it = entries_.find(key);
    throw ConfigError(it == entries_.end() ? 0 : it->second.line, key, message);
  }

  void reject_unused() const
  {
    for (const auto& [key, e] : entries_) {
      bool seen = false;
      for (const auto& u : used_)
        seen = seen || u == key;
      if (!seen)
        throw ConfigError(e.line, key, "unknown key");
    }
  }

private:
  double parse_double(const std::string& key, const std::string& t) const
  {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size() || t.empty())
      fail(key, "expected a number, got '" + t + "'");
    return v;
  }

  std::map<std::string, Entry> entries_;
  std::vector<std::string> used_;
};

inline void read_grid(Reader& r, const std::string& s, GridConfig& g)
{
  if (auto v = r.count(s + ".dims"))
    g.dims = static_cast<int>(*v);
  if (auto v = r.count(s + ".samples"))
    g.samples = *v;
  if (auto v = r.number(s + ".extent_m"))
    g.extent_m = *v;
  if (auto v = r.number(s + ".center_m"))
    g.center_m = *v;
}

inline void read_beam(Reader& r, const std::string& s, BeamConfig& b)
{
  if (auto v = r.text(s + ".shape"))
    b.shape = *v;
  if (auto v = r.text(s + ".envelope"))
    b.envelope = *v;
  if (auto v = r.number(s + ".amplitude"))
    b.amplitude = *v;
  if (auto v = r.number(s + ".half_width_m"))
    b.half_width_m = *v;
  if (auto v = r.number(s + ".waist_m"))
    b.waist_m = *v;
  if (auto v = r.number(s + ".center_m"))
    b.center_m = *v;
  if (auto v = r.number(s + ".tilt_rad_per_m"))
    b.tilt_rad_per_m = *v;
  if (auto v = r.text(s + ".mask_file"))
    b.mask_file = *v;
}

inline void write_grid(std::ostream& o, const char* section, const GridConfig& g)
{
  o << "[" << section << "]\n";
  o << "dims = " << g.dims << "\n";
  o << "samples = " << g.samples << "\n";
  o << "extent_m = " << fmt_double(g.extent_m) << "\n";
  o << "center_m = " << fmt_double(g.center_m) << "\n\n";
}

inline void write_beam(std::ostream& o, const char* section, const BeamConfig& b)
{
  o << "[" << section << "]\n";
  o << "shape = " << b.shape << "\n";
  o << "envelope = " << b.envelope << "\n";
  o << "amplitude = " << fmt_double(b.amplitude) << "\n";
  o << "half_width_m = " << fmt_double(b.half_width_m) << "\n";
  o << "waist_m = " << fmt_double(b.waist_m) << "\n";
  o << "center_m = " << fmt_double(b.center_m) << "\n";
  o << "tilt_rad_per_m = " << fmt_double(b.tilt_rad_per_m) << "\n";
  o << "mask_file = " << b.mask_file << "\n\n";
}

inline void validate_beam(const std::string& s, const BeamConfig& b)
{
  auto bad = [&](const std::string& key, const std::string& m) { throw ConfigError(0, s + "." + key, m); };
  if (b.shape != "uniform" && b.shape != "gaussian" && b.shape != "mask-file" && b.shape != "tilted")
    bad("shape", "unknown shape '" + b.shape + "'");
  if (b.envelope != "uniform" && b.envelope != "gaussian")
    bad("envelope", "unknown envelope '" + b.envelope + "'");
  if (!(b.amplitude >= 0.0))
    bad("amplitude", "must be non-negative");
  if (!(b.half_width_m >= 0.0))
    bad("half_width_m", "must be non-negative");
  const bool gaussian = b.shape == "gaussian" || (b.shape == "tilted" && b.envelope == "gaussian");
  if (gaussian && !(b.waist_m > 0.0))
    bad("waist_m", "gaussian beams need a positive waist");
  if (b.shape == "mask-file" && b.mask_file.empty())
    bad("mask_file", "mask-file beams need a file");
}

inline void validate_grid(const std::string& s, const GridConfig& g)
{
  if (g.dims != 1 && g.dims != 2)
    throw ConfigError(0, s + ".dims", "must be 1 or 2");
  if (g.samples < 2)
    throw ConfigError(0, s + ".samples", "need at least 2 samples");
  if (!(g.extent_m > 0.0))
    throw ConfigError(0, s + ".extent_m", "must be positive");
}

} // namespace detail

inline void ScenarioConfig::validate() const
{
  if (!is_pipeline_name(pipeline))
    throw ConfigError(0, "pipeline", "unknown pipeline '" + pipeline + "'");
  if (geometry.wavelength_m.has_value() == geometry.wavenumber_rad_per_m.has_value())
    throw ConfigError(0, "geometry", "give exactly one of wavelength_m and wavenumber_rad_per_m");
  if (geometry.wavelength_m && !(*geometry.wavelength_m > 0.0))
    throw ConfigError(0, "geometry.wavelength_m", "must be positive");
  if (geometry.wavenumber_rad_per_m && !(*geometry.wavenumber_rad_per_m > 0.0))
    throw ConfigError(0, "geometry.wavenumber_rad_per_m", "must be positive");
  if (!(geometry.z_m > 0.0))
    throw ConfigError(0, "geometry.z_m", "must be positive");
  if (geometry.screen_z_m && !(*geometry.screen_z_m > 0.0 && *geometry.screen_z_m < geometry.z_m))
    throw ConfigError(0, "geometry.screen_z_m", "need 0 < screen_z_m < z_m");
  detail::validate_grid("source_grid", source_grid);
  if (detector) {
    detail::validate_grid("detector", *detector);
    if (detector->dims != source_grid.dims)
      throw ConfigError(0, "detector.dims", "must match source_grid.dims");
  }
  detail::validate_beam("pump", pump);
  detail::validate_beam("stimulating", stimulating);

  const std::string& t = aperture.type;
  if (t != "none" && t != "double-slit" && t != "slit-list" && t != "mask-file")
    throw ConfigError(0, "aperture.type", "unknown aperture type '" + t + "'");
  if (t == "double-slit" && !(aperture.half_separation_m > 0.0))
    throw ConfigError(0, "aperture.half_separation_m", "must be positive");
  if (t == "slit-list" && aperture.positions_m.empty())
    throw ConfigError(0, "aperture.positions_m", "slit list is empty");
  if (t == "mask-file" && aperture.mask_file.empty())
    throw ConfigError(0, "aperture.mask_file", "mask-file apertures need a file");
  if (t != "none" && !geometry.screen_z_m)
    throw ConfigError(0, "geometry.screen_z_m", "an aperture needs a screen distance");
  if (t == "none" && pipeline != "free" && pipeline != "brute")
    throw ConfigError(0, "pipeline", "pipeline '" + pipeline + "' needs an aperture");
  if (t != "none" && pipeline == "free")
    throw ConfigError(0, "pipeline", "the free pipeline takes no aperture");

  if (analysis.source_stride == 0)
    throw ConfigError(0, "analysis.source_stride", "must be at least 1");
  if (sweep.count > 0) {
    if (t != "double-slit")
      throw ConfigError(0, "sweep", "a separation sweep needs a double-slit aperture");
    if (!(sweep.d_min_m > 0.0 && sweep.d_max_m >= sweep.d_min_m))
      throw ConfigError(0, "sweep", "need 0 < d_min_m <= d_max_m");
    if (!(sweep.detector_periods >= 2.0))
      throw ConfigError(0, "sweep.detector_periods", "need at least 2 periods");
  }
  if (!(jitter >= 0.0 && jitter < 1.0))
    throw ConfigError(0, "randomize.jitter", "need 0 <= jitter < 1");
}

inline ScenarioConfig parse_config(std::istream& in)
{
  std::map<std::string, detail::Entry> entries;
  std::string section, raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    const std::string line = detail::trim(std::string_view(raw).substr(0, hash));
    if (line.empty())
      continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(line_no, "", "malformed section header");
      section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError(line_no, "", "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line_no, "", "expected 'key = value'");
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    if (key.empty())
      throw ConfigError(line_no, "", "missing key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (entries.count(full))
      throw ConfigError(line_no, full, "duplicate key");
    entries[full] = {detail::trim(std::string_view(line).substr(eq + 1)), line_no};
  }

  detail::Reader r(std::move(entries));
  ScenarioConfig c;
  if (auto v = r.text("name"))
    c.name = *v;
  if (auto v = r.text("pipeline"))
    c.pipeline = *v;
  if (auto v = r.text("beta_convention")) {
    auto b = parse_beta_convention(*v);
    if (!b)
      r.fail("beta_convention", "expected 'derived' or 'paper'");
    c.beta_convention = *b;
  }
  if (auto v = r.count("seed"))
    c.seed = *v;

  c.geometry.wavelength_m = r.number("geometry.wavelength_m");
  c.geometry.wavenumber_rad_per_m = r.number("geometry.wavenumber_rad_per_m");
  if (auto v = r.number("geometry.z_m"))
    c.geometry.z_m = *v;
  c.geometry.screen_z_m = r.number("geometry.screen_z_m");

  detail::read_grid(r, "source_grid", c.source_grid);
  const bool has_detector = r.has("detector.dims") || r.has("detector.samples") || r.has("detector.extent_m") ||
                            r.has("detector.center_m");
  if (has_detector) {
    GridConfig d = c.source_grid;
    detail::read_grid(r, "detector", d);
    c.detector = d;
  }
  detail::read_beam(r, "pump", c.pump);
  detail::read_beam(r, "stimulating", c.stimulating);

  if (auto v = r.text("aperture.type"))
    c.aperture.type = *v;
  if (auto v = r.number("aperture.half_separation_m"))
    c.aperture.half_separation_m = *v;
  if (auto v = r.list("aperture.positions_m"))
    c.aperture.positions_m = *v;
  if (auto v = r.text("aperture.mask_file"))
    c.aperture.mask_file = *v;

  if (auto v = r.flag("analysis.adjudicate_beta"))
    c.analysis.adjudicate_beta = *v;
  if (auto v = r.count("analysis.source_stride"))
    c.analysis.source_stride = *v;
  if (auto v = r.flag("analysis.image_reference"))
    c.analysis.image_reference = *v;
  if (auto v = r.flag("analysis.centroid"))
    c.analysis.centroid = *v;

  if (auto v = r.count("sweep.count"))
    c.sweep.count = *v;
  if (auto v = r.number("sweep.d_min_m"))
    c.sweep.d_min_m = *v;
  if (auto v = r.number("sweep.d_max_m"))
    c.sweep.d_max_m = *v;
  if (auto v = r.number("sweep.detector_periods"))
    c.sweep.detector_periods = *v;

  if (auto v = r.number("randomize.jitter"))
    c.jitter = *v;
  if (auto v = r.text("output.directory"))
    c.output_dir = *v;

  r.reject_unused();
  c.validate();
  return c;
}

inline ScenarioConfig parse_config(const std::string& text)
{
  std::istringstream in(text);
  return parse_config(in);
}

inline ScenarioConfig load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError(0, "", "cannot open '" + path + "'");
  return parse_config(in);
}

inline std::string canonical_config(const ScenarioConfig& c)
{
  using detail::fmt_double;
  std::ostringstream o;
  o << "name = " << c.name << "\n";
  o << "pipeline = " << c.pipeline << "\n";
  o << "beta_convention = " << to_string(c.beta_convention) << "\n";
  o << "seed = " << c.seed << "\n\n";

  o << "[geometry]\n";
  if (c.geometry.wavelength_m)
    o << "wavelength_m = " << fmt_double(*c.geometry.wavelength_m) << "\n";
  if (c.geometry.wavenumber_rad_per_m)
    o << "wavenumber_rad_per_m = " << fmt_double(*c.geometry.wavenumber_rad_per_m) << "\n";
  o << "z_m = " << fmt_double(c.geometry.z_m) << "\n";
  if (c.geometry.screen_z_m)
    o << "screen_z_m = " << fmt_double(*c.geometry.screen_z_m) << "\n";
  o << "\n";

  detail::write_grid(o, "source_grid", c.source_grid);
  if (c.detector)
    detail::write_grid(o, "detector", *c.detector);
  detail::write_beam(o, "pump", c.pump);
  detail::write_beam(o, "stimulating", c.stimulating);

  o << "[aperture]\n";
  o << "type = " << c.aperture.type << "\n";
  o << "half_separation_m = " << fmt_double(c.aperture.half_separation_m) << "\n";
  o << "positions_m = ";
  for (std::size_t i = 0; i < c.aperture.positions_m.size(); ++i)
    o << (i ? ", " : "") << fmt_double(c.aperture.positions_m[i]);
  o << "\n";
  o << "mask_file = " << c.aperture.mask_file << "\n\n";

  o << "[analysis]\n";
  o << "adjudicate_beta = " << (c.analysis.adjudicate_beta ? "true" : "false") << "\n";
  o << "source_stride = " << c.analysis.source_stride << "\n";
  o << "image_reference = " << (c.analysis.image_reference ? "true" : "false") << "\n";
  o << "centroid = " << (c.analysis.centroid ? "true" : "false") << "\n\n";

  o << "[sweep]\n";
  o << "count = " << c.sweep.count << "\n";
  o << "d_min_m = " << fmt_double(c.sweep.d_min_m) << "\n";
  o << "d_max_m = " << fmt_double(c.sweep.d_max_m) << "\n";
  o << "detector_periods = " << fmt_double(c.sweep.detector_periods) << "\n\n";

  o << "[randomize]\n";
  o << "jitter = " << fmt_double(c.jitter) << "\n\n";

  o << "[output]\n";
  o << "directory = " << c.output_dir << "\n";
  return o.str();
}

/// FNV-1a 64 of the canonical text.
inline std::uint64_t config_hash(const ScenarioConfig& c)
{
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : canonical_config(c)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string config_hash_hex(const ScenarioConfig& c)
{
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash(c)));
  return buf;
}

} // namespace stimspdc::app
