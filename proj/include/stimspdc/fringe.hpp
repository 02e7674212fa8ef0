#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "stimspdc/profile.hpp"

namespace stimspdc {

/// Result of a fringe analysis. For a fit, the model is
/// mean * [1 + signed_visibility cos(kx) + ...] = mean + amplitude cos(kx + phase).
struct FringeFit
{
  double mean = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
  double visibility = 0.0;        ///< (I_max - I_min) / (I_max + I_min), in [0, 1]
  double signed_visibility = 0.0; ///< cosine coefficient / mean, phase referenced to x = 0
  double residual_rms = 0.0;      ///< fit residual relative to the mean
  bool fitted = false;            ///< false when taken from raw extrema
  bool degenerate = false;        ///< constant (or all-zero) profile without a period hint
};

/// Least squares fit of y = A + B cos(kx) + C sin(kx) at a known angular
/// frequency k. Frequency is never fitted.
inline FringeFit fit_fringes(std::span<const double> x, std::span<const double> y, double angular_frequency)
{
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument("fit_fringes: need matching samples, at least 3");
  std::array<std::array<double, 4>, 3> m{}; // augmented normal equations
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::array<double, 3> basis{1.0, std::cos(angular_frequency * x[i]), std::sin(angular_frequency * x[i])};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c)
        m[r][c] += basis[r] * basis[c];
      m[r][3] += basis[r] * y[i];
    }
  }
  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col]))
        piv = r;
    std::swap(m[col], m[piv]);
    if (std::abs(m[col][col]) < 1e-300)
      throw std::invalid_argument("fit_fringes: singular normal equations (window too short?)");
    for (int r = col + 1; r < 3; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 4; ++c)
        m[r][c] -= f * m[col][c];
    }
  }
  std::array<double, 3> coef{};
  for (int r = 2; r >= 0; --r) {
    double s = m[r][3];
    for (int c = r + 1; c < 3; ++c)
      s -= m[r][c] * coef[c];
    coef[r] = s / m[r][r];
  }

  FringeFit f;
  f.fitted = true;
  f.mean = coef[0];
  f.amplitude = std::hypot(coef[1], coef[2]);
  f.phase = std::atan2(-coef[2], coef[1]);
  if (f.mean > 0.0) {
    f.visibility = std::clamp(f.amplitude / f.mean, 0.0, 1.0);
    f.signed_visibility = coef[1] / f.mean;
  } else {
    f.degenerate = true;
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (coef[0] + coef[1] * std::cos(angular_frequency * x[i]) +
                             coef[2] * std::sin(angular_frequency * x[i]));
    ss += r * r;
  }
  const double rms = std::sqrt(ss / static_cast<double>(x.size()));
  f.residual_rms = f.mean != 0.0 ? rms / std::abs(f.mean) : rms;
  return f;
}

/// Fringe visibility of sampled data. With a period hint the model is fitted
/// (window must cover two periods); otherwise raw extrema are used.
inline FringeFit fringe_visibility(std::span<const double> x, std::span<const double> y,
                                   std::optional<double> period = std::nullopt)
{
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fringe_visibility: need matching samples");
  if (period) {
    if (!(*period > 0.0))
      throw std::invalid_argument("fringe_visibility: period must be positive");
    const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
    if (x.back() - x.front() + h < 2.0 * *period)
      throw std::invalid_argument("fringe_visibility: profile covers fewer than two fringe periods");
    return fit_fringes(x, y, 2.0 * std::numbers::pi / *period);
  }
  FringeFit f;
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  f.mean = 0.5 * (*hi + *lo);
  f.amplitude = 0.5 * (*hi - *lo);
  if (*hi == *lo || *hi + *lo <= 0.0) {
    f.degenerate = true;
    return f;
  }
  f.visibility = std::clamp((*hi - *lo) / (*hi + *lo), 0.0, 1.0);
  f.signed_visibility = f.visibility;
  return f;
}

inline FringeFit fringe_visibility(const IntensityProfile& profile, ProfileComponent component,
                                   std::optional<double> period = std::nullopt)
{
  if (profile.grid().dims() != 1)
    throw std::invalid_argument("fringe_visibility: 1D profiles only");
  const std::vector<double> x = profile.grid().x().positions();
  return fringe_visibility(x, profile.component(component), period);
}

/// Fringe period from crossings of the mean level (linear interpolation
/// between samples). Needs at least three crossings.
inline std::optional<double> measure_period(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size() || x.size() < 4)
    return std::nullopt;
  double mean = 0.0;
  for (double v : y)
    mean += v;
  mean /= static_cast<double>(y.size());
  std::vector<double> crossings;
  for (std::size_t i = 0; i + 1 < y.size(); ++i) {
    const double a = y[i] - mean, b = y[i + 1] - mean;
    if ((a < 0.0 && b >= 0.0) || (a >= 0.0 && b < 0.0))
      crossings.push_back(x[i] + (x[i + 1] - x[i]) * a / (a - b));
  }
  if (crossings.size() < 3)
    return std::nullopt;
  return 2.0 * (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
}

} // namespace stimspdc
