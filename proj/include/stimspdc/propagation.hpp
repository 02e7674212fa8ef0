#pragma once

// Paraxial (Fresnel) propagation of sampled transverse fields.
//
// Two evaluation routes are provided:
//   * angular spectrum: multiply v(q) by exp(-i q^2 z / 2k) and transform
//     back. Exact for the periodic, band-limited field the grid represents;
//     valid while nothing wraps around the grid, z <= k h L / (2 pi).
//   * quadrature: direct Riemann sum of the convolution with the chirp
//     exp(i k |x - rho|^2 / 2z). Valid while the chirp is resolved,
//     k max|x - rho| / z < 2 pi / h.
// The two regimes are complementary; `automatic` picks whichever holds.
//
// Kernel normalisation: `unitary` includes sqrt(k / (2 pi i z)) per axis and
// conserves power; `bare` is the plain chirp exp(i k |x - rho|^2 / 2z)
// without prefactor, the form the idler intensity integrals are written in.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "stimspdc/aperture.hpp"
#include "stimspdc/diagnostics.hpp"
#include "stimspdc/field.hpp"
#include "stimspdc/fourier.hpp"
#include "stimspdc/geometry.hpp"
#include "stimspdc/grid.hpp"

namespace stimspdc {

enum class PropagationMethod
{
  automatic,
  angular_spectrum,
  quadrature,
};

enum class KernelNormalization
{
  unitary,
  bare,
};

struct PropagationOptions
{
  PropagationMethod method = PropagationMethod::automatic;
  KernelNormalization normalization = KernelNormalization::unitary;
};

/// Largest distance for which the angular-spectrum route cannot wrap
/// around the grid along this axis.
inline double angular_spectrum_max_distance(const Axis& a, double wavenumber)
{
  return wavenumber * a.spacing() * a.extent / (2.0 * std::numbers::pi);
}

/// Chirp sampling: local frequency k * separation / z below 2 pi / h. On a
/// grid propagated onto itself the separation is the extent, which is the
/// familiar k (L/2) / z < pi / h.
inline bool chirp_well_sampled(const Axis& a, double distance, double wavenumber, double max_separation)
{
  return wavenumber * max_separation / distance < 2.0 * std::numbers::pi / a.spacing();
}

namespace detail {

inline Complex sqrt_i() { return std::polar(1.0, std::numbers::pi / 4.0); }

/// sqrt(k / (2 pi i z)): converts the bare chirp into the unitary kernel.
inline Complex unitary_kernel_prefactor(double distance, double wavenumber)
{
  return std::sqrt(wavenumber / (2.0 * std::numbers::pi * distance)) / sqrt_i();
}

inline double max_separation(const Axis& a, std::span<const double> targets)
{
  double sep = 0.0;
  for (double t : targets)
    sep = std::max({sep, std::abs(t - a.first()), std::abs(t - a.last())});
  return sep;
}

inline bool targets_inside(const Axis& a, std::span<const double> targets)
{
  const double tol = 1e-9 * a.spacing();
  for (double t : targets)
    if (t < a.lower() - tol || t > a.upper() + tol)
      return false;
  return true;
}

// Applies a separable linear map to grid data. row(axis, t, out) fills the
// coefficients mapping the input samples along `axis` to output sample t.
template <class RowFn>
std::vector<Complex> apply_separable(std::span<const Complex> in, const GridSpec& g,
                                     std::span<const std::vector<double>> targets, RowFn&& row)
{
  const std::size_t nx = g.x().samples;
  const std::size_t ntx = targets[0].size();
  std::vector<Complex> coeff(nx);
  if (g.dims() == 1) {
    std::vector<Complex> out(ntx);
    for (std::size_t t = 0; t < ntx; ++t) {
      row(0, t, std::span<Complex>(coeff));
      Complex acc{0.0, 0.0};
      for (std::size_t j = 0; j < nx; ++j)
        acc += coeff[j] * in[j];
      out[t] = acc;
    }
    return out;
  }
  const std::size_t ny = g.y().samples;
  const std::size_t nty = targets[1].size();
  std::vector<Complex> tmp(ny * ntx);
  for (std::size_t t = 0; t < ntx; ++t) {
    row(0, t, std::span<Complex>(coeff));
    for (std::size_t iy = 0; iy < ny; ++iy) {
      Complex acc{0.0, 0.0};
      const Complex* src = in.data() + iy * nx;
      for (std::size_t j = 0; j < nx; ++j)
        acc += coeff[j] * src[j];
      tmp[iy * ntx + t] = acc;
    }
  }
  std::vector<Complex> out(nty * ntx);
  std::vector<Complex> coeff_y(ny);
  for (std::size_t t = 0; t < nty; ++t) {
    row(1, t, std::span<Complex>(coeff_y));
    for (std::size_t tx = 0; tx < ntx; ++tx) {
      Complex acc{0.0, 0.0};
      for (std::size_t j = 0; j < ny; ++j)
        acc += coeff_y[j] * tmp[j * ntx + tx];
      out[t * ntx + tx] = acc;
    }
  }
  return out;
}

inline PropagationMethod resolve_method(const GridSpec& g, double distance, double wavenumber,
                                        std::span<const std::vector<double>> targets, PropagationMethod requested,
                                        Diagnostics* diag)
{
  bool spectrum_ok = true;
  bool chirp_ok = distance > 0.0;
  for (int i = 0; i < g.dims(); ++i) {
    const Axis& a = g.axis(i);
    const auto& t = targets[static_cast<std::size_t>(i)];
    spectrum_ok = spectrum_ok && distance <= angular_spectrum_max_distance(a, wavenumber) && targets_inside(a, t);
    chirp_ok = chirp_ok && chirp_well_sampled(a, distance, wavenumber, max_separation(a, t));
  }

  PropagationMethod m = requested;
  if (distance == 0.0)
    m = PropagationMethod::angular_spectrum;
  else if (m == PropagationMethod::automatic)
    m = (spectrum_ok || !chirp_ok) ? PropagationMethod::angular_spectrum : PropagationMethod::quadrature;

  if (m == PropagationMethod::angular_spectrum && !spectrum_ok) {
    std::ostringstream os;
    os << "angular-spectrum propagation over " << distance
       << " m may wrap around the grid (distance limit k h L / 2pi exceeded or target outside grid)";
    warn(diag, "sampling.angular_spectrum", os.str());
  }
  if (m == PropagationMethod::quadrature && !chirp_ok) {
    std::ostringstream os;
    os << "Fresnel chirp over " << distance << " m is undersampled on the source grid (k |x - rho| / z >= 2pi / h)";
    warn(diag, "sampling.chirp", os.str());
  }
  return m;
}

inline Complex bare_factor(const GridSpec& g, double distance, double wavenumber, KernelNormalization n,
                           PropagationMethod m)
{
  // ASM is unitary by construction; quadrature is bare by construction.
  if (distance == 0.0)
    return {1.0, 0.0};
  Complex per_axis = detail::unitary_kernel_prefactor(distance, wavenumber);
  if (m == PropagationMethod::angular_spectrum)
    per_axis = n == KernelNormalization::unitary ? Complex{1.0, 0.0} : 1.0 / per_axis;
  else
    per_axis = n == KernelNormalization::unitary ? per_axis : Complex{1.0, 0.0};
  return g.dims() == 1 ? per_axis : per_axis * per_axis;
}

} // namespace detail

/// Fresnel field of `field` after `distance`, evaluated on the tensor grid of
/// per-axis target coordinates (one vector per axis).
inline std::vector<Complex> propagate_to_points(const TransverseField& field, double distance, double wavenumber,
                                                std::span<const std::vector<double>> targets,
                                                const PropagationOptions& options = {}, Diagnostics* diag = nullptr)
{
  const GridSpec& g = field.grid();
  if (!(distance >= 0.0))
    throw std::invalid_argument("propagate: distance must be >= 0");
  if (!(wavenumber > 0.0))
    throw std::invalid_argument("propagate: wavenumber must be positive");
  if (targets.size() != static_cast<std::size_t>(g.dims()))
    throw std::invalid_argument("propagate: target dimensionality does not match field");

  const PropagationMethod m = detail::resolve_method(g, distance, wavenumber, targets, options.method, diag);
  const Complex factor = detail::bare_factor(g, distance, wavenumber, options.normalization, m);

  std::vector<Complex> out;
  if (m == PropagationMethod::angular_spectrum) {
    const AngularSpectrum spec = to_angular_spectrum(field);
    out = detail::apply_separable(spec.values(), spec.grid(), targets, [&](int axis, std::size_t t, std::span<Complex> row) {
      const Axis& qa = spec.grid().axis(axis);
      const double x = targets[static_cast<std::size_t>(axis)][t];
      const double scale = qa.spacing() * detail::inv_sqrt_2pi();
      for (std::size_t mi = 0; mi < row.size(); ++mi) {
        const double q = spec.wavevector(axis, mi);
        row[mi] = std::polar(scale, q * x - q * q * distance / (2.0 * wavenumber));
      }
    });
  } else {
    out = detail::apply_separable(field.values(), g, targets, [&](int axis, std::size_t t, std::span<Complex> row) {
      const Axis& a = g.axis(axis);
      const double x = targets[static_cast<std::size_t>(axis)][t];
      const double h = a.spacing();
      for (std::size_t j = 0; j < row.size(); ++j) {
        const double d = x - a.position(j);
        row[j] = std::polar(h, wavenumber * d * d / (2.0 * distance));
      }
    });
  }
  if (factor != Complex{1.0, 0.0})
    for (auto& v : out)
      v *= factor;
  return out;
}

inline std::vector<Complex> propagate_to_points(const TransverseField& field, double distance, double wavenumber,
                                                std::span<const double> points, const PropagationOptions& options = {},
                                                Diagnostics* diag = nullptr)
{
  const std::vector<std::vector<double>> targets{std::vector<double>(points.begin(), points.end())};
  return propagate_to_points(field, distance, wavenumber, targets, options, diag);
}

/// Fresnel field on a target grid. When the target is the source grid and
/// the angular-spectrum route applies, this is a pair of FFTs.
inline TransverseField propagate_to_grid(const TransverseField& field, double distance, double wavenumber,
                                         const GridSpec& target, const PropagationOptions& options = {},
                                         Diagnostics* diag = nullptr)
{
  if (target.dims() != field.grid().dims())
    throw std::invalid_argument("propagate: target grid dimensionality does not match field");
  std::vector<std::vector<double>> targets;
  for (int i = 0; i < target.dims(); ++i)
    targets.push_back(target.axis(i).positions());

  if (target == field.grid()) {
    if (!(distance >= 0.0) || !(wavenumber > 0.0))
      throw std::invalid_argument("propagate: distance must be >= 0 and wavenumber positive");
    if (distance == 0.0)
      return field;
    const PropagationMethod m =
      detail::resolve_method(field.grid(), distance, wavenumber, targets, options.method, diag);
    if (m == PropagationMethod::angular_spectrum) {
      AngularSpectrum spec = to_angular_spectrum(field);
      const GridSpec& q = spec.grid();
      const double c = distance / (2.0 * wavenumber);
      if (q.dims() == 1) {
        for (std::size_t mi = 0; mi < q.size(); ++mi) {
          const double qq = spec.wavevector(0, mi);
          spec[mi] *= std::polar(1.0, -qq * qq * c);
        }
      } else {
        for (std::size_t my = 0; my < q.y().samples; ++my)
          for (std::size_t mx = 0; mx < q.x().samples; ++mx) {
            const double qx = spec.wavevector(0, mx), qy = spec.wavevector(1, my);
            spec[q.index(mx, my)] *= std::polar(1.0, -(qx * qx + qy * qy) * c);
          }
      }
      TransverseField out = from_angular_spectrum(spec);
      const Complex factor = detail::bare_factor(field.grid(), distance, wavenumber, options.normalization, m);
      if (factor != Complex{1.0, 0.0})
        out *= factor;
      return out;
    }
    PropagationOptions forced = options;
    forced.method = PropagationMethod::quadrature;
    return TransverseField(target, propagate_to_points(field, distance, wavenumber, targets, forced, nullptr));
  }
  return TransverseField(target, propagate_to_points(field, distance, wavenumber, targets, options, diag));
}

/// Unitary Fresnel propagation on the field's own grid. Distance 0 returns
/// the input unchanged.
inline TransverseField fresnel_propagate(const TransverseField& field, double distance, double wavenumber,
                                         PropagationMethod method = PropagationMethod::automatic,
                                         Diagnostics* diag = nullptr)
{
  return propagate_to_grid(field, distance, wavenumber, field.grid(), {method, KernelNormalization::unitary}, diag);
}

/// Band-limited (trigonometric) interpolation of a sampled field; exact at
/// the grid samples.
inline std::vector<Complex> sample_band_limited(const TransverseField& field, std::span<const double> points)
{
  return propagate_to_points(field, 0.0, 1.0, points, {PropagationMethod::angular_spectrum});
}

/// Spherical (paraxial) wave of a unit point source at `source`, evaluated
/// at `points` a distance `distance` downstream.
inline std::vector<Complex> point_source_field(double source, double distance, double wavenumber,
                                               std::span<const double> points,
                                               KernelNormalization n = KernelNormalization::bare)
{
  const Complex factor =
    n == KernelNormalization::unitary ? detail::unitary_kernel_prefactor(distance, wavenumber) : Complex{1.0, 0.0};
  std::vector<Complex> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = points[i] - source;
    out[i] = factor * std::polar(1.0, wavenumber * d * d / (2.0 * distance));
  }
  return out;
}

/// Field downstream of a delta-slit screen: sum over slits of the slit
/// amplitude times a point-source wave.
inline std::vector<Complex> propagate_slits(const SlitField& slits, double distance, double wavenumber,
                                            std::span<const double> points,
                                            KernelNormalization n = KernelNormalization::bare)
{
  if (!(distance > 0.0) || !(wavenumber > 0.0))
    throw std::invalid_argument("propagate_slits: distance and wavenumber must be positive");
  const Complex factor =
    n == KernelNormalization::unitary ? detail::unitary_kernel_prefactor(distance, wavenumber) : Complex{1.0, 0.0};
  std::vector<Complex> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    Complex acc{0.0, 0.0};
    for (std::size_t j = 0; j < slits.positions.size(); ++j) {
      const double d = points[i] - slits.positions[j];
      acc += slits.amplitudes[j] * std::polar(1.0, wavenumber * d * d / (2.0 * distance));
    }
    out[i] = factor * acc;
  }
  return out;
}

using ScreenField = std::variant<TransverseField, SlitField>;

/// Field just behind the screen. Sampled apertures multiply pointwise (grids
/// must match); delta slits return the field values at the slit centres.
inline ScreenField apply_aperture(const TransverseField& field, const Aperture& aperture)
{
  if (aperture.is_sampled()) {
    const TransverseField& t = aperture.transmission();
    if (!(t.grid() == field.grid()))
      throw GridMismatchError("apply_aperture: aperture grid does not match field grid");
    TransverseField out(field.grid());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = field[i] * t[i];
    return out;
  }
  if (field.grid().dims() != 1)
    throw std::invalid_argument("apply_aperture: delta slits need a 1D field");
  const Axis& a = field.grid().x();
  SlitField out;
  out.positions.assign(aperture.slit_positions().begin(), aperture.slit_positions().end());
  for (double p : out.positions)
    if (!detail::targets_inside(a, std::span<const double>(&p, 1)))
      throw SlitOffGridError("apply_aperture: slit at " + std::to_string(p) + " m lies outside the field grid");
  out.amplitudes = sample_band_limited(field, out.positions);
  return out;
}

/// Size of the quadratic phases dropped by the Fraunhofer replacement.
struct FraunhoferCheck
{
  double source_phase = 0.0; ///< k max|xi|^2 / (2 z_A)
  double screen_phase = 0.0; ///< k max|eta|^2 / (2 (z - z_A))
  double threshold = std::numbers::pi / 8.0;

  bool source_ok() const { return source_phase < threshold; }
  bool screen_ok() const { return screen_phase < threshold; }
  bool valid() const { return source_ok() && screen_ok(); }

  /// threshold / largest phase; >= 10 is the "comfortably valid" regime.
  double margin() const
  {
    const double worst = std::max(source_phase, screen_phase);
    return worst > 0.0 ? threshold / worst : std::numeric_limits<double>::infinity();
  }
};

inline double grid_radius(const GridSpec& g)
{
  double r2 = 0.0;
  for (int i = 0; i < g.dims(); ++i) {
    const Axis& a = g.axis(i);
    const double e = std::max(std::abs(a.lower()), std::abs(a.upper()));
    r2 += e * e;
  }
  return std::sqrt(r2);
}

inline FraunhoferCheck fraunhofer_phase_check(const OpticalGeometry& geometry, double source_radius,
                                              double screen_radius)
{
  FraunhoferCheck c;
  const double k = geometry.wavenumber();
  c.source_phase = k * source_radius * source_radius / (2.0 * geometry.screen_z());
  c.screen_phase = k * screen_radius * screen_radius / (2.0 * geometry.screen_to_detector());
  return c;
}

/// Same grid used for the source and the screen.
inline FraunhoferCheck fraunhofer_phase_check(const OpticalGeometry& geometry, const GridSpec& grid)
{
  const double r = grid_radius(grid);
  return fraunhofer_phase_check(geometry, r, r);
}

} // namespace stimspdc
