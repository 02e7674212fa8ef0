#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace stimspdc {

/// One uniformly sampled axis. Samples sit at cell centres,
/// x_j = center - extent/2 + (j + 1/2) * spacing, so a grid of extent 2a
/// covers [-a, a] with a midpoint rule.
struct Axis
{
  std::size_t samples = 0;
  double extent = 0.0;
  double center = 0.0;

  double spacing() const { return extent / static_cast<double>(samples); }
  double first() const { return center - 0.5 * extent + 0.5 * spacing(); }
  double last() const { return position(samples - 1); }
  double position(std::size_t j) const { return first() + static_cast<double>(j) * spacing(); }

  /// Edges of the covered interval.
  double lower() const { return center - 0.5 * extent; }
  double upper() const { return center + 0.5 * extent; }

  std::vector<double> positions() const
  {
    std::vector<double> out(samples);
    for (std::size_t j = 0; j < samples; ++j)
      out[j] = position(j);
    return out;
  }

  bool operator==(const Axis&) const = default;
};

/// Uniform 1D or 2D sampling grid. Storage order is row-major with x
/// fastest: index = iy * nx + ix.
class GridSpec
{
public:
  GridSpec() = default;

  explicit GridSpec(Axis x) : dims_(1), axes_{x, Axis{1, 1.0, 0.0}} { validate(); }

  GridSpec(Axis x, Axis y) : dims_(2), axes_{x, y} { validate(); }

  static GridSpec line(std::size_t samples, double extent, double center = 0.0)
  {
    return GridSpec(Axis{samples, extent, center});
  }

  static GridSpec square(std::size_t samples, double extent)
  {
    return GridSpec(Axis{samples, extent, 0.0}, Axis{samples, extent, 0.0});
  }

  int dims() const { return dims_; }

  const Axis& axis(int i) const
  {
    if (i < 0 || i >= dims_)
      throw std::out_of_range("GridSpec: axis index " + std::to_string(i) + " out of range");
    return axes_[static_cast<std::size_t>(i)];
  }

  const Axis& x() const { return axes_[0]; }
  const Axis& y() const { return axis(1); }

  std::size_t size() const { return dims_ == 1 ? axes_[0].samples : axes_[0].samples * axes_[1].samples; }

  std::size_t index(std::size_t ix, std::size_t iy = 0) const { return iy * axes_[0].samples + ix; }

  /// Area (or length) element of one sample.
  double cell_measure() const
  {
    return dims_ == 1 ? axes_[0].spacing() : axes_[0].spacing() * axes_[1].spacing();
  }

  bool operator==(const GridSpec& other) const
  {
    if (dims_ != other.dims_)
      return false;
    for (int i = 0; i < dims_; ++i)
      if (!(axes_[static_cast<std::size_t>(i)] == other.axes_[static_cast<std::size_t>(i)]))
        return false;
    return true;
  }

private:
  void validate() const
  {
    for (int i = 0; i < dims_; ++i) {
      const Axis& a = axes_[static_cast<std::size_t>(i)];
      if (a.samples < 2)
        throw std::invalid_argument("GridSpec: samples per axis must be >= 2");
      if (!(a.extent > 0.0))
        throw std::invalid_argument("GridSpec: extent must be positive");
    }
  }

  int dims_ = 0;
  std::array<Axis, 2> axes_{};
};

/// Index of the zero-frequency bin on a Fourier-dual axis.
inline std::size_t zero_frequency_index(std::size_t samples) { return samples / 2; }

/// Fourier-dual of a position axis: spacing 2*pi/extent with q = 0 at
/// index samples/2.
inline Axis dual_axis(const Axis& a)
{
  const double dq = 2.0 * std::numbers::pi / a.extent;
  const double n = static_cast<double>(a.samples);
  const double m = static_cast<double>(zero_frequency_index(a.samples));
  // first bin at -m*dq, so center = -m*dq + (n-1)*dq/2
  return Axis{a.samples, n * dq, (0.5 * (n - 1.0) - m) * dq};
}

inline GridSpec dual(const GridSpec& g)
{
  return g.dims() == 1 ? GridSpec(dual_axis(g.x())) : GridSpec(dual_axis(g.x()), dual_axis(g.y()));
}

} // namespace stimspdc
