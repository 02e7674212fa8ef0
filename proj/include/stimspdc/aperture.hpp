#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "stimspdc/field.hpp"
#include "stimspdc/fourier.hpp"

namespace stimspdc {

/// Screen transmission. Either sampled on a grid (|t| <= 1) or a list of
/// ideal delta slits with unit weight, kept symbolic so that slit sums are
/// evaluated exactly.
class Aperture
{
public:
  static Aperture sampled(TransverseField transmission)
  {
    for (const auto& t : transmission.values())
      if (std::abs(t) > 1.0 + 1e-12)
        throw std::invalid_argument("Aperture: transmission magnitude exceeds 1");
    Aperture a;
    a.rep_ = std::move(transmission);
    return a;
  }

  static Aperture slits(std::vector<double> positions)
  {
    if (positions.empty())
      throw std::invalid_argument("Aperture: slit list must not be empty");
    std::vector<double> sorted = positions;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("Aperture: slit positions must be distinct");
    Aperture a;
    a.rep_ = std::move(positions);
    return a;
  }

  /// Slits at -d and +d.
  static Aperture double_slit(double half_separation)
  {
    if (!(half_separation > 0.0))
      throw std::invalid_argument("Aperture: double slit half separation must be positive");
    return slits({-half_separation, half_separation});
  }

  bool is_sampled() const { return std::holds_alternative<TransverseField>(rep_); }
  bool is_slits() const { return std::holds_alternative<std::vector<double>>(rep_); }

  const TransverseField& transmission() const { return std::get<TransverseField>(rep_); }
  std::span<const double> slit_positions() const { return std::get<std::vector<double>>(rep_); }

  /// Largest |eta| the screen can transmit through.
  double max_radius() const
  {
    if (is_slits()) {
      double r = 0.0;
      for (double p : slit_positions())
        r = std::max(r, std::abs(p));
      return r;
    }
    const GridSpec& g = transmission().grid();
    double r2 = 0.0;
    for (int i = 0; i < g.dims(); ++i) {
      const Axis& a = g.axis(i);
      const double e = std::max(std::abs(a.lower()), std::abs(a.upper()));
      r2 += e * e;
    }
    return std::sqrt(r2);
  }

private:
  Aperture() = default;
  std::variant<std::vector<double>, TransverseField> rep_;
};

/// Fields transmitted by a delta-slit screen: one complex amplitude per slit.
struct SlitField
{
  std::vector<double> positions;
  std::vector<Complex> amplitudes;
};

/// T(q) = integral A(eta) exp(-i q . eta) d eta (no 1/sqrt(2 pi)), so a unit
/// delta slit at x_j contributes exp(-i q x_j).
class ApertureSpectrum
{
public:
  explicit ApertureSpectrum(Aperture aperture) : aperture_(std::move(aperture)) {}

  const Aperture& aperture() const { return aperture_; }

  Complex operator()(double qx, double qy = 0.0) const
  {
    if (aperture_.is_slits()) {
      Complex sum{0.0, 0.0};
      for (double x : aperture_.slit_positions())
        sum += std::polar(1.0, -qx * x);
      return sum;
    }
    const TransverseField& t = aperture_.transmission();
    const GridSpec& g = t.grid();
    const Axis& ax = g.x();
    if (g.dims() == 1) {
      Complex sum{0.0, 0.0};
      for (std::size_t j = 0; j < ax.samples; ++j)
        sum += t[j] * std::polar(1.0, -qx * ax.position(j));
      return sum * ax.spacing();
    }
    const Axis& ay = g.y();
    std::vector<Complex> ex(ax.samples);
    for (std::size_t j = 0; j < ax.samples; ++j)
      ex[j] = std::polar(1.0, -qx * ax.position(j));
    Complex sum{0.0, 0.0};
    for (std::size_t iy = 0; iy < ay.samples; ++iy) {
      Complex row{0.0, 0.0};
      for (std::size_t ix = 0; ix < ax.samples; ++ix)
        row += t[g.index(ix, iy)] * ex[ix];
      sum += row * std::polar(1.0, -qy * ay.position(iy));
    }
    return sum * g.cell_measure();
  }

  /// T tabulated on the wavevector grid dual to `position_grid`. For a
  /// sampled aperture on that same grid this goes through the FFT.
  AngularSpectrum tabulate(const GridSpec& position_grid) const
  {
    if (aperture_.is_sampled() && aperture_.transmission().grid() == position_grid) {
      AngularSpectrum s = to_angular_spectrum(aperture_.transmission());
      const double scale = std::pow(2.0 * std::numbers::pi, 0.5 * position_grid.dims());
      for (auto& v : s.values())
        v *= scale;
      return s;
    }
    AngularSpectrum s(position_grid);
    const GridSpec& q = s.grid();
    if (q.dims() == 1) {
      for (std::size_t m = 0; m < q.size(); ++m)
        s[m] = (*this)(s.wavevector(0, m));
    } else {
      for (std::size_t my = 0; my < q.y().samples; ++my)
        for (std::size_t mx = 0; mx < q.x().samples; ++mx)
          s[q.index(mx, my)] = (*this)(s.wavevector(0, mx), s.wavevector(1, my));
    }
    return s;
  }

private:
  Aperture aperture_;
};

inline ApertureSpectrum aperture_spectrum(const Aperture& aperture) { return ApertureSpectrum(aperture); }

} // namespace stimspdc
