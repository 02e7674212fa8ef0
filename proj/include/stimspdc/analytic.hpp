#pragma once

// Closed forms for a 1D uniform source of half width a (pump w_p,
// stimulating w_s on the same interval) behind two delta slits at +-d, with
// the overall constant set to 1:
//
//   I(x) = 4 a w_p^2 [1 + sinc(2 b1 d a) cos(2 b2 d x)]
//        + 8 a^2 w_p^2 w_s^2 sinc^2(b1 d a) [1 + cos(2 b2 d x)]
//        = I0 [1 + mu cos(2 b2 d x)],
//
// with I_SP = 4 a w_p^2, I_ST = 8 a^2 sinc^2(b1 d a) w_p^2 w_s^2,
// mu_SP = sinc(2 b1 d a), mu_ST = 1, I0 = I_SP + I_ST,
// mu = (I_SP mu_SP + I_ST mu_ST) / I0.

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "stimspdc/geometry.hpp"

namespace stimspdc {

/// sin(x)/x, with a series below |x| < 1e-4.
inline double sinc(double x)
{
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

struct DoubleSlitConfig
{
  double half_width = 0.0;            ///< a
  double half_separation = 0.0;       ///< d
  double pump_amplitude = 0.0;        ///< w_p
  double stimulating_amplitude = 0.0; ///< w_s
  double beta1 = 0.0;
  double beta2 = 0.0;

  /// Checks a > 0, d > 0, amplitudes >= 0, betas > 0. `allow_zero_separation`
  /// admits the d = 0 limit that the closed forms extend to continuously.
  void validate(bool allow_zero_separation = true) const
  {
    if (!(half_width > 0.0))
      throw std::invalid_argument("DoubleSlitConfig: half width a must be positive");
    if (!(half_separation > 0.0) && !(allow_zero_separation && half_separation == 0.0))
      throw std::invalid_argument("DoubleSlitConfig: half separation d must be positive");
    if (!(pump_amplitude >= 0.0) || !(stimulating_amplitude >= 0.0))
      throw std::invalid_argument("DoubleSlitConfig: amplitudes must be non-negative");
    if (!(beta1 > 0.0) || !(beta2 > 0.0))
      throw std::invalid_argument("DoubleSlitConfig: beta coefficients must be positive");
  }

  static DoubleSlitConfig from_geometry(double a, double d, double w_p, double w_s, const OpticalGeometry& geometry,
                                        BetaConvention convention = BetaConvention::derived)
  {
    DoubleSlitConfig c{a, d, w_p, w_s, geometry.beta1(convention), geometry.beta2(convention)};
    c.validate();
    return c;
  }

  /// Fringe period pi / (beta2 d) on the detector.
  double fringe_period() const { return std::numbers::pi / (beta2 * half_separation); }
  double fringe_wavenumber() const { return 2.0 * beta2 * half_separation; }
};

struct VisibilityDecomposition
{
  double spontaneous_intensity = 0.0;  ///< I_SP
  double stimulated_intensity = 0.0;   ///< I_ST
  double spontaneous_visibility = 0.0; ///< mu_SP
  double stimulated_visibility = 1.0;  ///< mu_ST
  double mean_intensity = 0.0;         ///< I0
  double visibility = 0.0;             ///< mu
};

/// The two-slit intensity written term by term, exactly as in the header.
inline double double_slit_intensity(const DoubleSlitConfig& c, double x)
{
  c.validate();
  const double a = c.half_width, d = c.half_separation;
  const double wp2 = c.pump_amplitude * c.pump_amplitude;
  const double ws2 = c.stimulating_amplitude * c.stimulating_amplitude;
  const double fringe = std::cos(2.0 * c.beta2 * d * x);
  const double s = sinc(c.beta1 * d * a);
  return wp2 * 4.0 * a * ((1.0 + sinc(2.0 * c.beta1 * d * a) * fringe) + ws2 * 2.0 * a * s * s * (1.0 + fringe));
}

inline VisibilityDecomposition visibility_decomposition(const DoubleSlitConfig& c)
{
  c.validate();
  const double a = c.half_width, d = c.half_separation;
  const double wp2 = c.pump_amplitude * c.pump_amplitude;
  const double ws2 = c.stimulating_amplitude * c.stimulating_amplitude;
  const double s = sinc(c.beta1 * d * a);

  VisibilityDecomposition v;
  v.spontaneous_intensity = 4.0 * a * wp2;
  v.stimulated_intensity = 8.0 * a * a * s * s * wp2 * ws2;
  v.spontaneous_visibility = sinc(2.0 * c.beta1 * d * a);
  v.stimulated_visibility = 1.0;
  v.mean_intensity = v.spontaneous_intensity + v.stimulated_intensity;
  if (v.stimulated_intensity == 0.0)
    v.visibility = v.spontaneous_intensity > 0.0 ? v.spontaneous_visibility : 0.0;
  else
    v.visibility = (v.spontaneous_intensity * v.spontaneous_visibility +
                    v.stimulated_intensity * v.stimulated_visibility) /
                   v.mean_intensity;
  return v;
}

/// I0 [1 + mu cos(2 beta2 d x)].
inline double reconstructed_intensity(const VisibilityDecomposition& v, const DoubleSlitConfig& c, double x)
{
  return v.mean_intensity * (1.0 + v.visibility * std::cos(2.0 * c.beta2 * c.half_separation * x));
}

/// Fringe visibility of a spatially incoherent uniform source of half width
/// a seen through slits at +-d: sinc(2 beta1 d a). Signed; negative past
/// the first zero means the central fringe is dark.
inline double van_cittert_zernike_visibility(double a, double d, double beta1)
{
  if (!(a > 0.0) || !(d >= 0.0))
    throw std::invalid_argument("van_cittert_zernike_visibility: need a > 0 and d >= 0");
  return sinc(2.0 * beta1 * d * a);
}

} // namespace stimspdc
