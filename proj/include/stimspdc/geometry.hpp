#pragma once

#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stimspdc {

/// Which Fraunhofer coefficients to use. `derived` follows from expanding
/// the quadratic phases (beta1 = k/z_A, beta2 = k/(z - z_A)); `paper`
/// halves both.
enum class BetaConvention
{
  derived,
  paper,
};

inline std::string_view to_string(BetaConvention c)
{
  return c == BetaConvention::derived ? "derived" : "paper";
}

inline std::optional<BetaConvention> parse_beta_convention(std::string_view s)
{
  if (s == "derived")
    return BetaConvention::derived;
  if (s == "paper")
    return BetaConvention::paper;
  return std::nullopt;
}

/// Idler wavenumber plus the longitudinal positions of the optional screen
/// and of the detection plane (crystal at z = 0).
class OpticalGeometry
{
public:
  OpticalGeometry(double wavenumber, double detector_z, std::optional<double> screen_z = std::nullopt)
    : k_(wavenumber), z_(detector_z), z_screen_(screen_z)
  {
    if (!(k_ > 0.0))
      throw std::invalid_argument("OpticalGeometry: wavenumber must be positive");
    if (!(z_ > 0.0))
      throw std::invalid_argument("OpticalGeometry: detector distance must be positive");
    if (z_screen_ && !(*z_screen_ > 0.0 && *z_screen_ < z_))
      throw std::invalid_argument("OpticalGeometry: screen plane must satisfy 0 < z_A < z");
  }

  static OpticalGeometry from_wavelength(double wavelength, double detector_z,
                                         std::optional<double> screen_z = std::nullopt)
  {
    if (!(wavelength > 0.0))
      throw std::invalid_argument("OpticalGeometry: wavelength must be positive");
    return OpticalGeometry(2.0 * std::numbers::pi / wavelength, detector_z, screen_z);
  }

  double wavenumber() const { return k_; }
  double detector_z() const { return z_; }
  bool has_screen() const { return z_screen_.has_value(); }

  double screen_z() const
  {
    if (!z_screen_)
      throw std::logic_error("OpticalGeometry: no screen configured");
    return *z_screen_;
  }

  double screen_to_detector() const { return z_ - screen_z(); }

  double beta1(BetaConvention c = BetaConvention::derived) const
  {
    const double b = k_ / screen_z();
    return c == BetaConvention::derived ? b : 0.5 * b;
  }

  double beta2(BetaConvention c = BetaConvention::derived) const
  {
    const double b = k_ / screen_to_detector();
    return c == BetaConvention::derived ? b : 0.5 * b;
  }

private:
  double k_;
  double z_;
  std::optional<double> z_screen_;
};

} // namespace stimspdc
