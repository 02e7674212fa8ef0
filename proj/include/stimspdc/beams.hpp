#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>
#include <utility>

#include "stimspdc/field.hpp"
#include "stimspdc/grid.hpp"

namespace stimspdc {

/// Analytic description of a transverse beam profile: an envelope times an
/// optional linear phase tilt exp(i q0 . x). Can be sampled onto any grid or
/// evaluated pointwise (the quadrature oracle does the latter).
struct BeamShape
{
  enum class Envelope
  {
    uniform,
    gaussian,
    mask,
  };

  Envelope envelope = Envelope::uniform;
  double amplitude = 1.0;
  double half_width = 0.0; ///< uniform: nonzero for |x - c| < half_width; 0 means unbounded
  double waist = 0.0;      ///< gaussian: exp(-r^2 / waist^2) amplitude, 1/e^2 intensity radius
  std::array<double, 2> center{0.0, 0.0};
  std::array<double, 2> tilt{0.0, 0.0}; ///< rad/m
  std::shared_ptr<const TransverseField> mask; ///< real transmission, nearest-sample lookup

  static BeamShape uniform(double amplitude, double half_width = 0.0, double center = 0.0)
  {
    BeamShape b;
    b.amplitude = amplitude;
    b.half_width = half_width;
    b.center = {center, 0.0};
    return b;
  }

  static BeamShape gaussian(double amplitude, double waist, double center = 0.0)
  {
    if (!(waist > 0.0))
      throw std::invalid_argument("BeamShape: gaussian waist must be positive");
    BeamShape b;
    b.envelope = Envelope::gaussian;
    b.amplitude = amplitude;
    b.waist = waist;
    b.center = {center, 0.0};
    return b;
  }

  static BeamShape from_mask(double amplitude, TransverseField mask)
  {
    BeamShape b;
    b.envelope = Envelope::mask;
    b.amplitude = amplitude;
    b.mask = std::make_shared<const TransverseField>(std::move(mask));
    return b;
  }

  BeamShape tilted(double qx, double qy = 0.0) const
  {
    BeamShape b = *this;
    b.tilt = {qx, qy};
    return b;
  }

  Complex operator()(double x, double y = 0.0) const
  {
    const double dx = x - center[0];
    const double dy = y - center[1];
    double env = 0.0;
    switch (envelope) {
    case Envelope::uniform:
      env = (half_width <= 0.0 || (std::abs(dx) < half_width && std::abs(dy) < half_width)) ? 1.0 : 0.0;
      break;
    case Envelope::gaussian:
      env = std::exp(-(dx * dx + dy * dy) / (waist * waist));
      break;
    case Envelope::mask:
      env = mask_value(x, y);
      break;
    }
    if (env == 0.0)
      return {0.0, 0.0};
    if (tilt[0] == 0.0 && tilt[1] == 0.0)
      return {amplitude * env, 0.0};
    return std::polar(amplitude * env, tilt[0] * x + tilt[1] * y);
  }

private:
  static bool nearest(const Axis& a, double x, std::size_t& idx)
  {
    if (x < a.lower() || x >= a.upper())
      return false;
    const double f = std::floor((x - a.lower()) / a.spacing());
    idx = std::min(static_cast<std::size_t>(f), a.samples - 1);
    return true;
  }

  double mask_value(double x, double y) const
  {
    if (!mask)
      return 0.0;
    const GridSpec& g = mask->grid();
    std::size_t ix = 0, iy = 0;
    if (!nearest(g.x(), x, ix))
      return 0.0;
    if (g.dims() == 2 && !nearest(g.y(), y, iy))
      return 0.0;
    return std::real((*mask)[g.index(ix, iy)]);
  }
};

inline TransverseField sample(const BeamShape& beam, const GridSpec& grid)
{
  TransverseField f(grid);
  const Axis& ax = grid.x();
  if (grid.dims() == 1) {
    for (std::size_t i = 0; i < ax.samples; ++i)
      f[i] = beam(ax.position(i));
    return f;
  }
  const Axis& ay = grid.y();
  for (std::size_t iy = 0; iy < ay.samples; ++iy)
    for (std::size_t ix = 0; ix < ax.samples; ++ix)
      f[grid.index(ix, iy)] = beam(ax.position(ix), ay.position(iy));
  return f;
}

} // namespace stimspdc
