#pragma once

// Brute-force evaluation of the idler intensity integrals by direct
// summation, for small 1D problems. Nothing here goes through the FFT or the
// propagation module: beams are evaluated pointwise from their analytic
// description and every kernel is written out in place, so a bug in the
// fast pipelines cannot hide in shared code.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stimspdc/analytic.hpp"
#include "stimspdc/aperture.hpp"
#include "stimspdc/beams.hpp"
#include "stimspdc/fringe.hpp"
#include "stimspdc/geometry.hpp"
#include "stimspdc/metrics.hpp"
#include "stimspdc/profile.hpp"

namespace stimspdc {

struct QuadratureSpec
{
  enum class Rule
  {
    midpoint,
    trapezoid,
  };

  std::size_t samples = 256;
  Rule rule = Rule::midpoint;

  /// (node, weight) pairs on [lower, upper].
  std::vector<std::pair<double, double>> nodes(double lower, double upper) const
  {
    if (samples < 8)
      throw std::invalid_argument("QuadratureSpec: need at least 8 samples");
    if (!(upper > lower))
      throw std::invalid_argument("QuadratureSpec: empty integration interval");
    std::vector<std::pair<double, double>> out;
    const double n = static_cast<double>(samples);
    if (rule == Rule::midpoint) {
      const double h = (upper - lower) / n;
      for (std::size_t i = 0; i < samples; ++i)
        out.emplace_back(lower + (static_cast<double>(i) + 0.5) * h, h);
    } else {
      const double h = (upper - lower) / n;
      for (std::size_t i = 0; i <= samples; ++i)
        out.emplace_back(lower + static_cast<double>(i) * h, (i == 0 || i == samples) ? 0.5 * h : h);
    }
    return out;
  }
};

/// Source description for the oracle: analytic beams on [lower, upper].
struct OracleScenario
{
  BeamShape pump;
  BeamShape stimulating;
  double source_lower = 0.0;
  double source_upper = 0.0;
  OpticalGeometry geometry;
  std::optional<Aperture> screen;
};

namespace detail {

inline std::vector<double> oracle_detector_points(const GridSpec& detector)
{
  if (detector.dims() != 1)
    throw std::invalid_argument("oracle: 1D detector grids only");
  return detector.x().positions();
}

/// Screen as (eta, weight) pairs: unit weights for delta slits, cell size for
/// a sampled aperture.
inline std::vector<std::pair<double, Complex>> oracle_screen_nodes(const Aperture& a)
{
  std::vector<std::pair<double, Complex>> out;
  if (a.is_slits()) {
    for (double p : a.slit_positions())
      out.emplace_back(p, Complex{1.0, 0.0});
    return out;
  }
  const TransverseField& t = a.transmission();
  if (t.grid().dims() != 1)
    throw std::invalid_argument("oracle: 1D apertures only");
  const Axis& ax = t.grid().x();
  for (std::size_t j = 0; j < ax.samples; ++j)
    out.emplace_back(ax.position(j), t[j] * ax.spacing());
  return out;
}

} // namespace detail

/// |C|^2 { int |W_p|^2 + | int W_p conj(W_s) exp(i k (x - rho)^2 / 2z) |^2 }.
inline IntensityProfile brute_intensity_free(const OracleScenario& s, const GridSpec& detector,
                                             const QuadratureSpec& quad = {})
{
  if (s.screen)
    throw std::invalid_argument("brute_intensity_free: scenario has a screen");
  const auto xs = detail::oracle_detector_points(detector);
  const auto nodes = quad.nodes(s.source_lower, s.source_upper);
  const double k = s.geometry.wavenumber();
  const double z = s.geometry.detector_z();

  double power = 0.0;
  for (const auto& [rho, w] : nodes)
    power += w * std::norm(s.pump(rho));

  std::vector<double> stimulated(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    Complex acc{0.0, 0.0};
    for (const auto& [rho, w] : nodes) {
      const Complex src = s.pump(rho) * std::conj(s.stimulating(rho));
      const double d = xs[i] - rho;
      acc += w * src * std::exp(Complex{0.0, k * d * d / (2.0 * z)});
    }
    stimulated[i] = std::norm(acc);
  }
  return IntensityProfile(detector, std::vector<double>(xs.size(), power), std::move(stimulated));
}

/// Both terms of the screened intensity by direct double summation over
/// source (xi) and screen (eta).
inline IntensityProfile brute_intensity_screened(const OracleScenario& s, const GridSpec& detector,
                                                 const QuadratureSpec& quad = {})
{
  if (!s.screen)
    throw std::invalid_argument("brute_intensity_screened: scenario has no screen");
  const auto xs = detail::oracle_detector_points(detector);
  const auto nodes = quad.nodes(s.source_lower, s.source_upper);
  const auto screen = detail::oracle_screen_nodes(*s.screen);
  const double k = s.geometry.wavenumber();
  const double za = s.geometry.screen_z();
  const double zb = s.geometry.detector_z() - za;

  std::vector<double> spontaneous(xs.size(), 0.0), stimulated(xs.size(), 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    Complex coherent{0.0, 0.0};
    double incoherent = 0.0;
    for (const auto& [xi, w] : nodes) {
      const Complex wp = s.pump(xi);
      const Complex src = wp * std::conj(s.stimulating(xi));
      if (wp == Complex{0.0, 0.0} && src == Complex{0.0, 0.0})
        continue;
      Complex through_screen{0.0, 0.0};
      for (const auto& [eta, a] : screen) {
        const double d1 = eta - xi;
        const double d2 = xs[i] - eta;
        through_screen += a * std::exp(Complex{0.0, k * d1 * d1 / (2.0 * za) + k * d2 * d2 / (2.0 * zb)});
      }
      coherent += w * src * through_screen;
      incoherent += w * std::norm(wp) * std::norm(through_screen);
    }
    stimulated[i] = std::norm(coherent);
    spontaneous[i] = incoherent;
  }
  return IntensityProfile(detector, std::move(spontaneous), std::move(stimulated));
}

struct ConventionResiduals
{
  BetaConvention convention = BetaConvention::derived;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double predicted_period = 0.0;
  double period_error = std::numeric_limits<double>::infinity();
  bool period_match = false; ///< within one detector sample
  double predicted_spontaneous_visibility = 0.0;
  double visibility_error = std::numeric_limits<double>::infinity();
  bool visibility_match = false; ///< within 1e-3
  double profile_residual = 0.0; ///< normalised L-infinity, brute vs closed form
};

struct ConventionReport
{
  std::array<ConventionResiduals, 2> conventions{};
  std::optional<double> measured_period;
  double measured_spontaneous_visibility = 0.0;
  double detector_spacing = 0.0;
  BetaConvention matched = BetaConvention::derived;
  double residual_ratio = 1.0; ///< larger / smaller profile residual
  bool conclusive = false;     ///< residual_ratio >= 2 and d > 0

  const ConventionResiduals& of(BetaConvention c) const
  {
    return conventions[c == BetaConvention::derived ? 0 : 1];
  }
};

struct AdjudicationOptions
{
  QuadratureSpec quadrature{512, QuadratureSpec::Rule::midpoint};
  std::size_t detector_samples = 1024;
  double detector_periods = 8.0; ///< detector extent in (derived) fringe periods
};

/// Decides which pair of Fraunhofer coefficients reproduces the brute-force
/// double-slit pattern. Source half width, slit half separation and the two
/// amplitudes are taken from `config`; its beta fields are ignored and
/// recomputed from `geometry` under each convention.
inline ConventionReport adjudicate_beta_convention(const DoubleSlitConfig& config, const OpticalGeometry& geometry,
                                                   const AdjudicationOptions& options = {})
{
  const double a = config.half_width;
  const double d = config.half_separation;
  if (!(a > 0.0) || !(d >= 0.0))
    throw std::invalid_argument("adjudicate_beta_convention: need a > 0 and d >= 0");

  const double derived_period =
    d > 0.0 ? std::numbers::pi * geometry.screen_to_detector() / (geometry.wavenumber() * d) : 0.0;
  const double extent = d > 0.0 ? options.detector_periods * derived_period : 40.0 * a;
  const GridSpec detector = GridSpec::line(options.detector_samples, extent);

  OracleScenario s{BeamShape::uniform(config.pump_amplitude, a),
                   BeamShape::uniform(config.stimulating_amplitude, a),
                   -a,
                   a,
                   geometry,
                   d > 0.0 ? Aperture::double_slit(d) : Aperture::slits({0.0})};
  const IntensityProfile brute = brute_intensity_screened(s, detector, options.quadrature);
  const std::vector<double> xs = detector.x().positions();

  ConventionReport report;
  report.detector_spacing = detector.x().spacing();
  report.measured_period = d > 0.0 ? measure_period(xs, brute.total()) : std::nullopt;
  if (report.measured_period) {
    const auto fit = fringe_visibility(xs, brute.spontaneous(), *report.measured_period);
    report.measured_spontaneous_visibility = fit.visibility;
  }

  for (BetaConvention c : {BetaConvention::derived, BetaConvention::paper}) {
    ConventionResiduals& r = report.conventions[c == BetaConvention::derived ? 0 : 1];
    r.convention = c;
    r.beta1 = geometry.beta1(c);
    r.beta2 = geometry.beta2(c);
    const DoubleSlitConfig cc{a, d, config.pump_amplitude, config.stimulating_amplitude, r.beta1, r.beta2};
    r.predicted_spontaneous_visibility = sinc(2.0 * r.beta1 * d * a);
    std::vector<double> predicted(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
      predicted[i] = double_slit_intensity(cc, xs[i]);
    r.profile_residual = normalized_linf(brute.total(), predicted);
    if (d > 0.0) {
      r.predicted_period = std::numbers::pi / (r.beta2 * d);
      if (report.measured_period) {
        r.period_error = std::abs(*report.measured_period - r.predicted_period);
        r.period_match = r.period_error <= report.detector_spacing;
        r.visibility_error =
          std::abs(report.measured_spontaneous_visibility - std::abs(r.predicted_spontaneous_visibility));
        r.visibility_match = r.visibility_error < 1e-3;
      }
    } else {
      r.predicted_period = std::numeric_limits<double>::infinity();
    }
  }

  const double rd = report.conventions[0].profile_residual;
  const double rp = report.conventions[1].profile_residual;
  report.matched = rd <= rp ? BetaConvention::derived : BetaConvention::paper;
  const double lo = std::min(rd, rp), hi = std::max(rd, rp);
  report.residual_ratio = lo > 0.0 ? hi / lo : (hi > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
  report.conclusive = d > 0.0 && report.residual_ratio >= 2.0;
  return report;
}

} // namespace stimspdc
