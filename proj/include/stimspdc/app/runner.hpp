#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stimspdc/analytic.hpp"
#include "stimspdc/app/config.hpp"
#include "stimspdc/app/pgm.hpp"
#include "stimspdc/fringe.hpp"
#include "stimspdc/idler.hpp"
#include "stimspdc/metrics.hpp"
#include "stimspdc/oracle.hpp"

namespace stimspdc::app {

/// Command-line overrides, applied before anything runs.
struct Overrides
{
  std::optional<std::string> pipeline;
  std::optional<std::size_t> grid_samples;
  std::optional<BetaConvention> beta;
  std::optional<std::uint64_t> seed;
};

/// Uniform double in [-1, 1) from the top 53 bits, identical on every platform.
inline double signed_unit(std::mt19937_64& rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

/// Returns the effective config. With a seed and a nonzero jitter the beam
/// amplitudes and slit separation are perturbed and jitter is cleared, so the
/// canonical text of the result reproduces the run on its own.
inline ScenarioConfig apply_overrides(ScenarioConfig c, const Overrides& o)
{
  if (o.pipeline) {
    if (!is_pipeline_name(*o.pipeline))
      throw ConfigError(0, "pipeline", "unknown pipeline '" + *o.pipeline + "'");
    c.pipeline = *o.pipeline;
  }
  if (o.grid_samples)
    c.source_grid.samples = *o.grid_samples;
  if (o.beta)
    c.beta_convention = *o.beta;
  if (o.seed) {
    c.seed = *o.seed;
    if (c.jitter > 0.0) {
      std::mt19937_64 rng(c.seed);
      c.pump.amplitude *= 1.0 + c.jitter * signed_unit(rng);
      c.stimulating.amplitude *= 1.0 + c.jitter * signed_unit(rng);
      c.aperture.half_separation_m *= 1.0 + c.jitter * signed_unit(rng);
      c.jitter = 0.0;
    }
  }
  c.validate();
  return c;
}

struct BuiltScenario
{
  GridSpec source;
  GridSpec detector;
  BeamShape pump;
  BeamShape stimulating;
  OpticalGeometry geometry;
  std::optional<Aperture> aperture;

  SpdcScenario spdc() const { return {sample(pump, source), sample(stimulating, source), geometry, aperture}; }
};

namespace detail {

inline GridSpec make_grid(const GridConfig& g)
{
  if (g.dims == 1)
    return GridSpec::line(g.samples, g.extent_m, g.center_m);
  const Axis a{g.samples, g.extent_m, g.center_m};
  return GridSpec(a, a);
}

inline std::string resolve_path(const std::filesystem::path& base, const std::string& file)
{
  const std::filesystem::path p(file);
  return (p.is_absolute() ? p : base / p).string();
}

/// Mask image placed over the source grid's extent. Row 0 is the lowest y.
inline TransverseField mask_field(const GridSpec& source, const std::string& path)
{
  const GrayImage img = read_pgm(path);
  const Axis& ax = source.x();
  if (source.dims() == 1) {
    if (img.height != 1)
      throw std::runtime_error("mask '" + path + "': 1D grids need a single-row image");
    TransverseField f(GridSpec(Axis{img.width, ax.extent, ax.center}));
    for (std::size_t i = 0; i < img.width; ++i)
      f[i] = img.at(i, 0);
    return f;
  }
  const Axis& ay = source.y();
  TransverseField f(GridSpec(Axis{img.width, ax.extent, ax.center}, Axis{img.height, ay.extent, ay.center}));
  for (std::size_t r = 0; r < img.height; ++r)
    for (std::size_t c = 0; c < img.width; ++c)
      f[f.grid().index(c, r)] = img.at(c, r);
  return f;
}

inline BeamShape make_beam(const BeamConfig& b, const GridSpec& source, const std::filesystem::path& base)
{
  BeamShape shape;
  const std::string env = b.shape == "tilted" ? b.envelope : b.shape;
  if (env == "gaussian")
    shape = BeamShape::gaussian(b.amplitude, b.waist_m, b.center_m);
  else if (env == "mask-file")
    shape = BeamShape::from_mask(b.amplitude, mask_field(source, resolve_path(base, b.mask_file)));
  else
    shape = BeamShape::uniform(b.amplitude, b.half_width_m, b.center_m);
  return b.tilt_rad_per_m != 0.0 ? shape.tilted(b.tilt_rad_per_m) : shape;
}

inline std::optional<Aperture> make_aperture(const ApertureConfig& a, const GridSpec& source,
                                             const std::filesystem::path& base)
{
  if (a.type == "double-slit")
    return Aperture::double_slit(a.half_separation_m);
  if (a.type == "slit-list")
    return Aperture::slits(a.positions_m);
  if (a.type == "mask-file") {
    const BeamShape m = BeamShape::from_mask(1.0, mask_field(source, resolve_path(base, a.mask_file)));
    return Aperture::sampled(sample(m, source));
  }
  return std::nullopt;
}

/// Half width of a uniform beam, or of the source grid when it is unbounded.
inline double uniform_half_width(const BeamConfig& b, const GridSpec& source)
{
  return b.half_width_m > 0.0 ? b.half_width_m : 0.5 * source.x().extent;
}

} // namespace detail

inline BuiltScenario build_scenario(const ScenarioConfig& c, const std::filesystem::path& base_dir)
{
  BuiltScenario s{detail::make_grid(c.source_grid),
                  detail::make_grid(c.detector_grid()),
                  {},
                  {},
                  c.geometry.build(),
                  std::nullopt};
  s.pump = detail::make_beam(c.pump, s.source, base_dir);
  s.stimulating = detail::make_beam(c.stimulating, s.source, base_dir);
  s.aperture = detail::make_aperture(c.aperture, s.source, base_dir);
  return s;
}

/// Closed-form two-slit setup: both beams uniform, untilted and centred,
/// a double-slit screen, a 1D grid centred on the axis.
inline std::optional<DoubleSlitConfig> double_slit_setup(const ScenarioConfig& c, const BuiltScenario& s)
{
  auto plain = [](const BeamConfig& b) { return b.shape == "uniform" && b.tilt_rad_per_m == 0.0 && b.center_m == 0.0; };
  if (c.aperture.type != "double-slit" || !plain(c.pump) || !plain(c.stimulating) || s.source.dims() != 1 ||
      c.source_grid.center_m != 0.0)
    return std::nullopt;
  const double a = detail::uniform_half_width(c.pump, s.source);
  const double as = detail::uniform_half_width(c.stimulating, s.source);
  if (as < a)
    return std::nullopt;
  return DoubleSlitConfig{a, c.aperture.half_separation_m, c.pump.amplitude, c.stimulating.amplitude,
                          s.geometry.beta1(c.beta_convention), s.geometry.beta2(c.beta_convention)};
}

inline IntensityProfile analytic_profile(const DoubleSlitConfig& dc, const GridSpec& detector)
{
  const VisibilityDecomposition v = visibility_decomposition(dc);
  const std::vector<double> xs = detector.x().positions();
  std::vector<double> sp(xs.size()), st(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double fringe = std::cos(dc.fringe_wavenumber() * xs[i]);
    sp[i] = v.spontaneous_intensity * (1.0 + v.spontaneous_visibility * fringe);
    st[i] = v.stimulated_intensity * (1.0 + fringe);
  }
  return IntensityProfile(detector, std::move(sp), std::move(st));
}

inline IntensityProfile run_pipeline(const std::string& pipeline, const ScenarioConfig& c, const BuiltScenario& s,
                                     Diagnostics& diag)
{
  IdlerOptions opts;
  opts.beta = c.beta_convention;
  opts.source_stride = c.analysis.source_stride;
  if (pipeline == "free")
    return idler_intensity_free(s.spdc(), s.detector, opts, &diag);
  if (pipeline == "screened")
    return idler_intensity_screened(s.spdc(), s.detector, opts, &diag);
  if (pipeline == "fraunhofer")
    return idler_intensity_fraunhofer(s.spdc(), s.detector, opts, &diag);
  if (pipeline == "brute") {
    if (s.source.dims() != 1)
      throw std::runtime_error("the brute pipeline is 1D only");
    const OracleScenario o{s.pump, s.stimulating, s.source.x().lower(), s.source.x().upper(), s.geometry,
                           s.aperture};
    const QuadratureSpec q{s.source.x().samples, QuadratureSpec::Rule::midpoint};
    return s.aperture ? brute_intensity_screened(o, s.detector, q) : brute_intensity_free(o, s.detector, q);
  }
  if (pipeline == "analytic") {
    const auto dc = double_slit_setup(c, s);
    if (!dc)
      throw std::runtime_error("the analytic pipeline needs uniform centred beams and a double slit on a 1D grid");
    return analytic_profile(*dc, s.detector);
  }
  throw std::runtime_error("unknown pipeline '" + pipeline + "'");
}

struct FringeReport
{
  double expected_period = 0.0;
  std::optional<double> measured_period;
  FringeFit total;
  FringeFit spontaneous;
  FringeFit stimulated;
};

struct CentroidReport
{
  double reference = 0.0;      ///< stimulating beam centre
  double expected_shift = 0.0; ///< -q0 z / k
  double conjugated = 0.0;     ///< stimulated centroid
  double control = 0.0;        ///< same with the stimulating field not conjugated
  double bin = 0.0;
  bool within_bin = false;
  bool opposite = false;
};

struct SweepPoint
{
  double half_separation = 0.0;
  double measured = 0.0;  ///< signed spontaneous visibility
  double predicted = 0.0; ///< sinc(2 beta1 d a)
};

struct RunReport
{
  std::string name;
  std::string pipeline;
  std::string config_hash;
  std::string canonical_config;
  IntensityProfile profile;
  std::optional<FringeReport> fringes;
  std::optional<VisibilityDecomposition> analytic;
  std::optional<ConventionReport> adjudication;
  std::optional<double> image_ncc;
  std::optional<CentroidReport> centroid;
  std::vector<SweepPoint> sweep;
  std::optional<StrideConvergence> stride;
  std::vector<Warning> warnings;
  double seconds = 0.0;
};

namespace detail {

inline std::optional<FringeReport> analyse_fringes(const ScenarioConfig& c, const BuiltScenario& s,
                                                   const IntensityProfile& p)
{
  if (c.aperture.type != "double-slit" || s.detector.dims() != 1)
    return std::nullopt;
  FringeReport f;
  f.expected_period = std::numbers::pi / (s.geometry.beta2(c.beta_convention) * c.aperture.half_separation_m);
  const std::vector<double> xs = s.detector.x().positions();
  f.measured_period = measure_period(xs, p.total());
  if (s.detector.x().extent < 2.0 * f.expected_period)
    return f;
  f.total = fringe_visibility(xs, p.total(), f.expected_period);
  f.spontaneous = fringe_visibility(xs, p.spontaneous(), f.expected_period);
  f.stimulated = fringe_visibility(xs, p.stimulated(), f.expected_period);
  return f;
}

inline double image_reference_ncc(const BuiltScenario& s, const IntensityProfile& p, Diagnostics& diag)
{
  std::vector<double> reference;
  if (s.source.dims() == 1) {
    // Pump alone through the quadrature oracle, independent of the FFT path.
    OracleScenario o{s.pump, BeamShape::uniform(1.0), s.source.x().lower(), s.source.x().upper(), s.geometry,
                     std::nullopt};
    o.geometry = OpticalGeometry(s.geometry.wavenumber(), s.geometry.detector_z());
    const auto r = brute_intensity_free(o, s.detector, {s.source.x().samples});
    reference.assign(r.stimulated().begin(), r.stimulated().end());
  } else {
    const TransverseField at = propagate_to_grid(sample(s.pump, s.source), s.geometry.detector_z(),
                                                 s.geometry.wavenumber(), s.detector,
                                                 {PropagationMethod::automatic, KernelNormalization::bare}, &diag);
    for (const auto& v : at.values())
      reference.push_back(std::norm(v));
  }
  return normalized_cross_correlation(p.stimulated(), reference);
}

inline CentroidReport centroid_check(const ScenarioConfig& c, const BuiltScenario& s, const IntensityProfile& p,
                                     Diagnostics& diag)
{
  if (s.detector.dims() != 1 || s.aperture)
    throw std::runtime_error("the centroid check runs on 1D free-space scenarios");
  CentroidReport r;
  const std::vector<double> xs = s.detector.x().positions();
  r.reference = c.stimulating.center_m;
  r.expected_shift = -c.stimulating.tilt_rad_per_m * s.geometry.detector_z() / s.geometry.wavenumber();
  r.bin = s.detector.x().spacing();
  r.conjugated = centroid(xs, p.stimulated());

  SpdcScenario control = s.spdc();
  for (auto& v : control.stimulating.values())
    v = std::conj(v);
  const IntensityProfile q = idler_intensity_free(control, s.detector, {}, &diag);
  r.control = centroid(xs, q.stimulated());

  const double shift = r.conjugated - r.reference;
  const double control_shift = r.control - r.reference;
  r.within_bin = std::abs(shift - r.expected_shift) <= r.bin;
  r.opposite = shift * control_shift < 0.0 && std::abs(control_shift + r.expected_shift) <= r.bin;
  return r;
}

inline std::vector<SweepPoint> separation_sweep(const ScenarioConfig& c, const BuiltScenario& s, Diagnostics& diag)
{
  std::vector<SweepPoint> out;
  const auto base = double_slit_setup(c, s);
  if (!base)
    throw std::runtime_error("the separation sweep needs uniform centred beams and a double slit on a 1D grid");
  const GridConfig det = c.detector_grid();
  SpdcScenario sc = s.spdc();
  IdlerOptions opts;
  opts.beta = c.beta_convention;
  opts.source_stride = c.analysis.source_stride;
  for (std::size_t i = 0; i < c.sweep.count; ++i) {
    const double t = c.sweep.count > 1 ? static_cast<double>(i) / static_cast<double>(c.sweep.count - 1) : 0.0;
    const double d = c.sweep.d_min_m + t * (c.sweep.d_max_m - c.sweep.d_min_m);
    sc.screen = Aperture::double_slit(d);
    const double period = std::numbers::pi / (s.geometry.beta2(c.beta_convention) * d);
    const GridSpec detector = GridSpec::line(det.samples, c.sweep.detector_periods * period);
    const IntensityProfile p = idler_intensity_screened(sc, detector, opts, &diag);
    const FringeFit fit = fringe_visibility(p, ProfileComponent::spontaneous, period);
    out.push_back({d, fit.signed_visibility, van_cittert_zernike_visibility(base->half_width, d, base->beta1)});
  }
  return out;
}

} // namespace detail

inline RunReport run(const ScenarioConfig& config, const std::filesystem::path& base_dir)
{
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  const BuiltScenario s = build_scenario(config, base_dir);
  Diagnostics diag;

  RunReport r;
  r.name = config.name;
  r.pipeline = config.pipeline;
  r.config_hash = config_hash_hex(config);
  r.canonical_config = canonical_config(config);
  r.profile = run_pipeline(config.pipeline, config, s, diag);

  r.fringes = detail::analyse_fringes(config, s, r.profile);
  if (const auto dc = double_slit_setup(config, s)) {
    r.analytic = visibility_decomposition(*dc);
    if (config.analysis.adjudicate_beta)
      r.adjudication = adjudicate_beta_convention(*dc, s.geometry);
  } else if (config.analysis.adjudicate_beta) {
    throw std::runtime_error("beta adjudication needs uniform centred beams and a double slit on a 1D grid");
  }
  if (config.analysis.image_reference)
    r.image_ncc = detail::image_reference_ncc(s, r.profile, diag);
  if (config.analysis.centroid)
    r.centroid = detail::centroid_check(config, s, r.profile, diag);
  if (config.sweep.count > 0)
    r.sweep = detail::separation_sweep(config, s, diag);
  if (config.analysis.source_stride > 1 && config.pipeline == "screened") {
    IdlerOptions opts;
    opts.beta = config.beta_convention;
    opts.source_stride = config.analysis.source_stride;
    r.stride = check_source_stride(s.spdc(), s.detector, opts);
  }

  r.warnings = diag.warnings();
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

namespace detail {

inline std::string g17(double v)
{
  return fmt_double(v);
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out)
    throw std::runtime_error("write failed for '" + path.string() + "'");
}

} // namespace detail

/// CSV of the profile normalised to max(total) = 1.
inline std::string profile_csv(const IntensityProfile& raw)
{
  const IntensityProfile p = raw.normalized();
  const GridSpec& g = p.grid();
  std::ostringstream o;
  const auto sp = p.spontaneous(), st = p.stimulated(), tot = p.total();
  if (g.dims() == 1) {
    o << "x_m, spontaneous, stimulated, total\n";
    for (std::size_t i = 0; i < g.size(); ++i)
      o << detail::g17(g.x().position(i)) << ", " << detail::g17(sp[i]) << ", " << detail::g17(st[i]) << ", "
        << detail::g17(tot[i]) << "\n";
    return o.str();
  }
  o << "x_m, y_m, spontaneous, stimulated, total\n";
  for (std::size_t iy = 0; iy < g.y().samples; ++iy)
    for (std::size_t ix = 0; ix < g.x().samples; ++ix) {
      const std::size_t i = g.index(ix, iy);
      o << detail::g17(g.x().position(ix)) << ", " << detail::g17(g.y().position(iy)) << ", " << detail::g17(sp[i])
        << ", " << detail::g17(st[i]) << ", " << detail::g17(tot[i]) << "\n";
    }
  return o.str();
}

inline std::string sweep_csv(const std::vector<SweepPoint>& sweep)
{
  std::ostringstream o;
  o << "half_separation_m, measured_visibility, predicted_visibility\n";
  for (const auto& p : sweep)
    o << detail::g17(p.half_separation) << ", " << detail::g17(p.measured) << ", " << detail::g17(p.predicted)
      << "\n";
  return o.str();
}

inline std::string format_report(const RunReport& r)
{
  std::ostringstream o;
  auto line = [&](const std::string& key, double v) { o << key << " = " << detail::g17(v) << "\n"; };
  o << "scenario = " << r.name << "\n";
  o << "pipeline = " << r.pipeline << "\n";
  o << "config_hash = " << r.config_hash << "\n";
  o << "peak_intensity = " << detail::g17(r.profile.peak()) << "\n";
  o << "runtime_s = " << detail::g17(r.seconds) << "\n";

  if (r.fringes) {
    o << "\n[fringes]\n";
    line("expected_period_m", r.fringes->expected_period);
    if (r.fringes->measured_period)
      line("measured_period_m", *r.fringes->measured_period);
    if (r.fringes->total.fitted) {
      line("visibility", r.fringes->total.visibility);
      line("spontaneous_visibility", r.fringes->spontaneous.visibility);
      line("stimulated_visibility", r.fringes->stimulated.visibility);
      line("fit_residual_rms", r.fringes->total.residual_rms);
    } else {
      o << "note = detector covers fewer than two expected periods; no fit\n";
    }
  }
  if (r.analytic) {
    o << "\n[analytic]\n";
    line("I_SP", r.analytic->spontaneous_intensity);
    line("I_ST", r.analytic->stimulated_intensity);
    line("mu_SP", r.analytic->spontaneous_visibility);
    line("mu_ST", r.analytic->stimulated_visibility);
    line("I0", r.analytic->mean_intensity);
    line("mu", r.analytic->visibility);
  }
  if (r.adjudication) {
    const ConventionReport& a = *r.adjudication;
    o << "\n[beta_adjudication]\n";
    o << "matched = " << to_string(a.matched) << "\n";
    o << "conclusive = " << (a.conclusive ? "true" : "false") << "\n";
    line("residual_ratio", a.residual_ratio);
    if (a.measured_period)
      line("measured_period_m", *a.measured_period);
    line("measured_spontaneous_visibility", a.measured_spontaneous_visibility);
    for (const auto& c : a.conventions) {
      const std::string p = std::string(to_string(c.convention)) + ".";
      line(p + "beta1", c.beta1);
      line(p + "beta2", c.beta2);
      line(p + "predicted_period_m", c.predicted_period);
      o << p << "period_match = " << (c.period_match ? "true" : "false") << "\n";
      line(p + "predicted_spontaneous_visibility", c.predicted_spontaneous_visibility);
      o << p << "visibility_match = " << (c.visibility_match ? "true" : "false") << "\n";
      line(p + "profile_residual", c.profile_residual);
    }
  }
  if (r.image_ncc) {
    o << "\n[image_transfer]\n";
    line("cross_correlation", *r.image_ncc);
  }
  if (r.centroid) {
    const CentroidReport& c = *r.centroid;
    o << "\n[phase_conjugation]\n";
    line("expected_shift_m", c.expected_shift);
    line("conjugated_shift_m", c.conjugated - c.reference);
    line("control_shift_m", c.control - c.reference);
    line("bin_m", c.bin);
    o << "within_bin = " << (c.within_bin ? "true" : "false") << "\n";
    o << "opposite_to_control = " << (c.opposite ? "true" : "false") << "\n";
  }
  if (!r.sweep.empty()) {
    double worst = 0.0;
    for (const auto& p : r.sweep)
      worst = std::max(worst, std::abs(p.measured - p.predicted));
    o << "\n[sweep]\n";
    o << "points = " << r.sweep.size() << "\n";
    line("max_abs_error", worst);
  }
  if (r.stride) {
    o << "\n[source_stride]\n";
    o << "stride = " << r.stride->stride << "\n";
    line("relative_change", r.stride->relative_change);
    o << "accepted = " << (r.stride->accepted ? "true" : "false") << "\n";
  }
  o << "\n[warnings]\n";
  if (r.warnings.empty())
    o << "none\n";
  for (const auto& w : r.warnings)
    o << w.code << ": " << w.message << "\n";
  o << "\n[config]\n" << r.canonical_config;
  return o.str();
}

inline void write_outputs(const RunReport& r, const std::filesystem::path& dir)
{
  std::filesystem::create_directories(dir);
  detail::write_text(dir / "profile.csv", profile_csv(r.profile));
  if (r.profile.grid().dims() == 2) {
    const IntensityProfile p = r.profile.normalized();
    const auto& g = p.grid();
    for (auto [name, comp] : {std::pair{"total", ProfileComponent::total},
                              std::pair{"spontaneous", ProfileComponent::spontaneous},
                              std::pair{"stimulated", ProfileComponent::stimulated}}) {
      const auto v = p.component(comp);
      std::vector<double> img(v.begin(), v.end());
      const double m = stimspdc::detail::max_of(img);
      // PGM rows run top to bottom; grid rows run upward in y.
      std::vector<double> flipped(img.size());
      for (std::size_t iy = 0; iy < g.y().samples; ++iy)
        for (std::size_t ix = 0; ix < g.x().samples; ++ix)
          flipped[(g.y().samples - 1 - iy) * g.x().samples + ix] = m > 0.0 ? img[g.index(ix, iy)] / m : 0.0;
      write_pgm((dir / (std::string(name) + ".pgm")).string(), g.x().samples, g.y().samples, flipped);
    }
  }
  if (!r.sweep.empty())
    detail::write_text(dir / "sweep.csv", sweep_csv(r.sweep));
  detail::write_text(dir / "report.txt", format_report(r));
}

struct PairComparison
{
  std::string first;
  std::string second;
  double linf = 0.0;
  double l2 = 0.0;
  std::optional<double> visibility_difference;
};

struct ComparisonReport
{
  std::vector<std::string> pipelines;
  std::vector<IntensityProfile> profiles;
  std::vector<std::optional<double>> visibilities;
  std::vector<PairComparison> pairs;
  std::vector<Warning> warnings;
  std::string config_hash;
};

inline ComparisonReport compare(const ScenarioConfig& config, const std::vector<std::string>& pipelines,
                                const std::filesystem::path& base_dir)
{
  if (pipelines.size() < 2)
    throw ConfigError(0, "pipelines", "compare needs at least two pipelines");
  ComparisonReport out;
  out.config_hash = config_hash_hex(config);
  out.pipelines = pipelines;
  Diagnostics diag;
  for (const auto& name : pipelines) {
    ScenarioConfig c = config;
    c.pipeline = name;
    c.validate();
    const BuiltScenario s = build_scenario(c, base_dir);
    out.profiles.push_back(run_pipeline(name, c, s, diag));
    const auto f = detail::analyse_fringes(c, s, out.profiles.back());
    out.visibilities.push_back(f && f->total.fitted ? std::optional<double>(f->total.visibility) : std::nullopt);
  }
  for (std::size_t i = 0; i < pipelines.size(); ++i)
    for (std::size_t j = i + 1; j < pipelines.size(); ++j) {
      PairComparison p{pipelines[i], pipelines[j], normalized_linf(out.profiles[i].total(), out.profiles[j].total()),
                       normalized_l2(out.profiles[i].total(), out.profiles[j].total()), std::nullopt};
      if (out.visibilities[i] && out.visibilities[j])
        p.visibility_difference = std::abs(*out.visibilities[i] - *out.visibilities[j]);
      out.pairs.push_back(p);
    }
  out.warnings = diag.warnings();
  return out;
}

inline std::string format_comparison(const ComparisonReport& c)
{
  std::ostringstream o;
  o << "config_hash = " << c.config_hash << "\n";
  for (const auto& p : c.pairs) {
    o << p.first << " vs " << p.second << ": linf = " << detail::g17(p.linf) << ", l2 = " << detail::g17(p.l2);
    if (p.visibility_difference)
      o << ", visibility_difference = " << detail::g17(*p.visibility_difference);
    o << "\n";
  }
  o << "\n[warnings]\n";
  if (c.warnings.empty())
    o << "none\n";
  for (const auto& w : c.warnings)
    o << w.code << ": " << w.message << "\n";
  return o.str();
}

inline void write_comparison(const ComparisonReport& c, const std::filesystem::path& dir)
{
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < c.pipelines.size(); ++i)
    detail::write_text(dir / ("profile-" + c.pipelines[i] + ".csv"), profile_csv(c.profiles[i]));
  detail::write_text(dir / "compare.txt", format_comparison(c));
}

} // namespace stimspdc::app
