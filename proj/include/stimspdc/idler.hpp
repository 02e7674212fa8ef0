#pragma once

// Idler intensity of stimulated down-conversion, always split into the
// spontaneous term (incoherent, weighted by the pump intensity) and the
// stimulated term (coherent, driven by pump x conj(stimulating)).
//
// All three pipelines use the bare paraxial kernel exp(i k |dx|^2 / 2z) with
// the overall constant set to 1, so free, screened and Fraunhofer results
// are on one absolute scale and can be compared with the closed forms.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "stimspdc/aperture.hpp"
#include "stimspdc/diagnostics.hpp"
#include "stimspdc/field.hpp"
#include "stimspdc/geometry.hpp"
#include "stimspdc/metrics.hpp"
#include "stimspdc/profile.hpp"
#include "stimspdc/propagation.hpp"

namespace stimspdc {

struct SpdcScenario
{
  TransverseField pump;        ///< at the crystal, z = 0
  TransverseField stimulating; ///< same grid as pump
  OpticalGeometry geometry;
  std::optional<Aperture> screen; ///< located at geometry.screen_z()

  void validate() const
  {
    if (!(pump.grid() == stimulating.grid()))
      throw GridMismatchError("SpdcScenario: pump and stimulating fields must share one grid");
    if (screen && !geometry.has_screen())
      throw std::invalid_argument("SpdcScenario: screen given but geometry has no screen plane");
  }
};

struct IdlerOptions
{
  PropagationMethod method = PropagationMethod::automatic;
  BetaConvention beta = BetaConvention::derived;
  /// Source subsampling for the incoherent (spontaneous) sum. 1 = every sample.
  std::size_t source_stride = 1;
};

namespace detail {

inline void require_detector(const SpdcScenario& s, const GridSpec& detector)
{
  if (detector.dims() != s.pump.grid().dims())
    throw std::invalid_argument("idler: detector grid dimensionality differs from the source grid");
}

/// Source samples grouped in blocks of `stride` per axis; each block is
/// represented by its middle sample with the block's total cell measure.
struct SourceBlock
{
  std::size_t index;
  double weight;
};

inline std::vector<SourceBlock> source_blocks(const GridSpec& g, std::size_t stride)
{
  if (stride == 0)
    throw std::invalid_argument("idler: source stride must be >= 1");
  auto axis_blocks = [stride](const Axis& a) {
    std::vector<std::pair<std::size_t, std::size_t>> out; // (representative, count)
    for (std::size_t b = 0; b < a.samples; b += stride) {
      const std::size_t len = std::min(stride, a.samples - b);
      out.emplace_back(b + (len - 1) / 2, len);
    }
    return out;
  };
  std::vector<SourceBlock> blocks;
  const auto bx = axis_blocks(g.x());
  if (g.dims() == 1) {
    for (auto [i, n] : bx)
      blocks.push_back({i, g.x().spacing() * static_cast<double>(n)});
    return blocks;
  }
  const auto by = axis_blocks(g.y());
  for (auto [iy, ny] : by)
    for (auto [ix, nx] : bx)
      blocks.push_back({g.index(ix, iy), g.cell_measure() * static_cast<double>(nx * ny)});
  return blocks;
}

inline std::vector<double> intensity(std::span<const Complex> field)
{
  std::vector<double> out(field.size());
  for (std::size_t i = 0; i < field.size(); ++i)
    out[i] = std::norm(field[i]);
  return out;
}

} // namespace detail

/// Free-space idler intensity: spontaneous = total pump power (flat),
/// stimulated = |Fresnel(pump x conj(stimulating), z)|^2.
inline IntensityProfile idler_intensity_free(const SpdcScenario& scenario, const GridSpec& detector,
                                             const IdlerOptions& options = {}, Diagnostics* diag = nullptr)
{
  scenario.validate();
  if (scenario.screen)
    throw std::invalid_argument("idler_intensity_free: scenario has a screen; use the screened pipeline");
  detail::require_detector(scenario, detector);

  const TransverseField source = multiply_conjugate(scenario.pump, scenario.stimulating);
  const TransverseField at_detector =
    propagate_to_grid(source, scenario.geometry.detector_z(), scenario.geometry.wavenumber(), detector,
                      {options.method, KernelNormalization::bare}, diag);

  std::vector<double> spontaneous(detector.size(), total_power(scenario.pump));
  return IntensityProfile(detector, std::move(spontaneous), detail::intensity(at_detector.values()));
}

namespace detail {

inline IntensityProfile screened_slits(const SpdcScenario& s, const GridSpec& detector, const IdlerOptions& options,
                                       Diagnostics* diag)
{
  const GridSpec& g = s.pump.grid();
  if (g.dims() != 1)
    throw std::invalid_argument("idler_intensity_screened: delta slits are 1D only");
  const double k = s.geometry.wavenumber();
  const double za = s.geometry.screen_z();
  const double zb = s.geometry.screen_to_detector();
  const std::span<const double> slits = s.screen->slit_positions();
  const std::vector<double> xs = detector.x().positions();

  // Coherent term: source -> slit amplitudes -> detector.
  const TransverseField source = multiply_conjugate(s.pump, s.stimulating);
  SlitField at_screen;
  at_screen.positions.assign(slits.begin(), slits.end());
  at_screen.amplitudes = propagate_to_points(source, za, k, slits, {options.method, KernelNormalization::bare}, diag);
  const std::vector<double> stimulated = intensity(propagate_slits(at_screen, zb, k, xs));

  // Incoherent term: every source point radiates independently.
  const std::size_t ns = slits.size();
  std::vector<Complex> to_detector(ns * xs.size());
  for (std::size_t j = 0; j < ns; ++j) {
    const auto w = point_source_field(slits[j], zb, k, xs);
    std::copy(w.begin(), w.end(), to_detector.begin() + static_cast<std::ptrdiff_t>(j * xs.size()));
  }
  std::vector<double> spontaneous(xs.size(), 0.0);
  std::vector<Complex> to_slit(ns);
  for (const auto& block : source_blocks(g, options.source_stride)) {
    const double weight = std::norm(s.pump[block.index]) * block.weight;
    if (weight == 0.0)
      continue;
    const double xi = g.x().position(block.index);
    for (std::size_t j = 0; j < ns; ++j) {
      const double d = slits[j] - xi;
      to_slit[j] = std::polar(1.0, k * d * d / (2.0 * za));
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
      Complex acc{0.0, 0.0};
      for (std::size_t j = 0; j < ns; ++j)
        acc += to_slit[j] * to_detector[j * xs.size() + i];
      spontaneous[i] += weight * std::norm(acc);
    }
  }
  return IntensityProfile(detector, std::move(spontaneous), stimulated);
}

inline IntensityProfile screened_sampled(const SpdcScenario& s, const GridSpec& detector, const IdlerOptions& options,
                                         Diagnostics* diag)
{
  const GridSpec& g = s.pump.grid();
  const TransverseField& t = s.screen->transmission();
  if (!(t.grid() == g))
    throw GridMismatchError("idler_intensity_screened: sampled aperture must live on the source grid");
  const double k = s.geometry.wavenumber();
  const double za = s.geometry.screen_z();
  const double zb = s.geometry.screen_to_detector();
  const PropagationOptions bare{options.method, KernelNormalization::bare};

  const TransverseField source = multiply_conjugate(s.pump, s.stimulating);
  TransverseField screen_field = propagate_to_grid(source, za, k, g, bare, diag);
  for (std::size_t i = 0; i < screen_field.size(); ++i)
    screen_field[i] *= t[i];
  const TransverseField coherent = propagate_to_grid(screen_field, zb, k, detector, bare, diag);

  std::vector<std::vector<double>> targets;
  for (int i = 0; i < detector.dims(); ++i)
    targets.push_back(detector.axis(i).positions());

  for (int i = 0; i < g.dims(); ++i)
    if (!chirp_well_sampled(g.axis(i), za, k, g.axis(i).extent)) {
      warn(diag, "sampling.point_source",
           "point-source chirp from source to screen is undersampled on the screen grid");
      break;
    }

  std::vector<double> spontaneous(detector.size(), 0.0);
  TransverseField point(g);
  for (const auto& block : source_blocks(g, options.source_stride)) {
    const double weight = std::norm(s.pump[block.index]) * block.weight;
    if (weight == 0.0)
      continue;
    const std::size_t nx = g.x().samples;
    const double xi = g.x().position(block.index % nx);
    const double yi = g.dims() == 2 ? g.y().position(block.index / nx) : 0.0;
    for (std::size_t iy = 0; iy < (g.dims() == 2 ? g.y().samples : 1); ++iy)
      for (std::size_t ix = 0; ix < nx; ++ix) {
        const double dx = g.x().position(ix) - xi;
        const double dy = g.dims() == 2 ? g.y().position(iy) - yi : 0.0;
        const std::size_t idx = g.index(ix, iy);
        point[idx] = std::polar(1.0, k * (dx * dx + dy * dy) / (2.0 * za)) * t[idx];
      }
    const std::vector<Complex> d = propagate_to_points(point, zb, k, targets, bare, diag);
    for (std::size_t i = 0; i < d.size(); ++i)
      spontaneous[i] += weight * std::norm(d[i]);
  }
  return IntensityProfile(detector, std::move(spontaneous), intensity(coherent.values()));
}

} // namespace detail

/// Idler intensity behind a screen at z_A: the coherent term propagates
/// pump x conj(stimulating) to the screen, through the aperture and on to
/// the detector; the incoherent term sums, over source points weighted by
/// |pump|^2, the pattern of a point source diffracted by the same screen.
inline IntensityProfile idler_intensity_screened(const SpdcScenario& scenario, const GridSpec& detector,
                                                 const IdlerOptions& options = {}, Diagnostics* diag = nullptr)
{
  scenario.validate();
  if (!scenario.screen)
    throw std::invalid_argument("idler_intensity_screened: scenario has no screen");
  detail::require_detector(scenario, detector);
  return scenario.screen->is_slits() ? detail::screened_slits(scenario, detector, options, diag)
                                     : detail::screened_sampled(scenario, detector, options, diag);
}

/// Far-field form: both quadratic phases dropped, leaving
/// T(beta1 xi + beta2 x) with T the aperture's Fourier transform. 1D only.
inline IntensityProfile idler_intensity_fraunhofer(const SpdcScenario& scenario, const GridSpec& detector,
                                                   const IdlerOptions& options = {}, Diagnostics* diag = nullptr)
{
  scenario.validate();
  if (!scenario.screen)
    throw std::invalid_argument("idler_intensity_fraunhofer: scenario has no screen");
  detail::require_detector(scenario, detector);
  const GridSpec& g = scenario.pump.grid();
  if (g.dims() != 1)
    throw std::invalid_argument("idler_intensity_fraunhofer: only 1D scenarios are supported");

  const FraunhoferCheck check = fraunhofer_phase_check(scenario.geometry, grid_radius(g), scenario.screen->max_radius());
  if (!check.valid()) {
    std::ostringstream os;
    os << "Fraunhofer limit not satisfied: source phase " << check.source_phase << " rad, screen phase "
       << check.screen_phase << " rad (threshold " << check.threshold << ")";
    warn(diag, "fraunhofer.validity", os.str());
  }

  const double b1 = scenario.geometry.beta1(options.beta);
  const double b2 = scenario.geometry.beta2(options.beta);
  const ApertureSpectrum spectrum(*scenario.screen);
  const TransverseField source = multiply_conjugate(scenario.pump, scenario.stimulating);
  const Axis& a = g.x();
  const std::vector<double> xs = detector.x().positions();

  std::vector<double> spontaneous(xs.size(), 0.0), stimulated(xs.size(), 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    Complex coherent{0.0, 0.0};
    double incoherent = 0.0;
    for (std::size_t j = 0; j < a.samples; ++j) {
      const double pump_power = std::norm(scenario.pump[j]);
      if (pump_power == 0.0 && source[j] == Complex{0.0, 0.0})
        continue;
      const Complex tq = spectrum(b1 * a.position(j) + b2 * xs[i]);
      coherent += source[j] * tq;
      incoherent += pump_power * std::norm(tq);
    }
    stimulated[i] = std::norm(coherent * a.spacing());
    spontaneous[i] = incoherent * a.spacing();
  }
  return IntensityProfile(detector, std::move(spontaneous), std::move(stimulated));
}

/// Effect of halving the source stride on the screened spontaneous term.
struct StrideConvergence
{
  std::size_t stride = 1;
  double relative_change = 0.0; ///< max |I_s - I_{s/2}| / max I_{s/2}
  bool accepted = false;        ///< relative_change < 1e-3
};

inline StrideConvergence check_source_stride(const SpdcScenario& scenario, const GridSpec& detector,
                                             IdlerOptions options)
{
  StrideConvergence out;
  out.stride = options.source_stride;
  if (options.source_stride <= 1) {
    out.accepted = true;
    return out;
  }
  const IntensityProfile coarse = idler_intensity_screened(scenario, detector, options);
  options.source_stride = std::max<std::size_t>(1, options.source_stride / 2);
  const IntensityProfile fine = idler_intensity_screened(scenario, detector, options);
  const auto c = coarse.spontaneous();
  const auto f = fine.spontaneous();
  double peak = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    peak = std::max(peak, f[i]);
    diff = std::max(diff, std::abs(c[i] - f[i]));
  }
  out.relative_change = peak > 0.0 ? diff / peak : 0.0;
  out.accepted = out.relative_change < 1e-3;
  return out;
}

} // namespace stimspdc
