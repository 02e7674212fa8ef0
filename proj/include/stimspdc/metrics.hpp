#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace stimspdc {

namespace detail {

inline double max_of(std::span<const double> a)
{
  double m = 0.0;
  for (double v : a)
    m = std::max(m, v);
  return m;
}

inline void require_same_size(std::span<const double> a, std::span<const double> b)
{
  if (a.size() != b.size())
    throw std::invalid_argument("metrics: sample counts differ");
}

} // namespace detail

/// max |a/max(a) - b/max(b)|.
inline double normalized_linf(std::span<const double> a, std::span<const double> b)
{
  detail::require_same_size(a, b);
  const double ma = detail::max_of(a), mb = detail::max_of(b);
  const double sa = ma > 0.0 ? 1.0 / ma : 0.0, sb = mb > 0.0 ? 1.0 / mb : 0.0;
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a[i] * sa - b[i] * sb));
  return d;
}

/// ||a/max(a) - b/max(b)||_2 / ||b/max(b)||_2.
inline double normalized_l2(std::span<const double> a, std::span<const double> b)
{
  detail::require_same_size(a, b);
  const double ma = detail::max_of(a), mb = detail::max_of(b);
  const double sa = ma > 0.0 ? 1.0 / ma : 0.0, sb = mb > 0.0 ? 1.0 / mb : 0.0;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] * sa - b[i] * sb;
    num += d * d;
    den += b[i] * sb * b[i] * sb;
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

/// Zero-mean normalised cross-correlation (Pearson coefficient).
inline double normalized_cross_correlation(std::span<const double> a, std::span<const double> b)
{
  detail::require_same_size(a, b);
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0)
    return 0.0;
  return sab / std::sqrt(saa * sbb);
}

/// Intensity-weighted mean position.
inline double centroid(std::span<const double> x, std::span<const double> w)
{
  detail::require_same_size(x, w);
  double s = 0.0, sw = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += x[i] * w[i];
    sw += w[i];
  }
  if (sw == 0.0)
    throw std::invalid_argument("centroid: zero total weight");
  return s / sw;
}

} // namespace stimspdc
