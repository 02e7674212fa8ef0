#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stimspdc/grid.hpp"

namespace stimspdc {

using Complex = std::complex<double>;

/// Complex scalar amplitude sampled on a position grid.
class TransverseField
{
public:
  TransverseField() = default;

  explicit TransverseField(GridSpec grid) : grid_(std::move(grid)), values_(grid_.size()) {}

  TransverseField(GridSpec grid, std::vector<Complex> values) : grid_(std::move(grid)), values_(std::move(values))
  {
    if (values_.size() != grid_.size())
      throw std::invalid_argument("TransverseField: amplitude count does not match grid");
  }

  const GridSpec& grid() const { return grid_; }
  std::span<Complex> values() { return values_; }
  std::span<const Complex> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  Complex& operator[](std::size_t i) { return values_[i]; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }

  TransverseField& operator*=(Complex s)
  {
    for (auto& v : values_)
      v *= s;
    return *this;
  }

private:
  GridSpec grid_;
  std::vector<Complex> values_;
};

/// Angular spectrum: amplitudes over transverse wavevector. Keeps the
/// position grid it is dual to so the inverse transform can restore
/// absolute positions.
class AngularSpectrum
{
public:
  AngularSpectrum() = default;

  explicit AngularSpectrum(GridSpec position_grid)
    : position_grid_(std::move(position_grid)), grid_(dual(position_grid_)), values_(grid_.size())
  {}

  AngularSpectrum(GridSpec position_grid, std::vector<Complex> values)
    : position_grid_(std::move(position_grid)), grid_(dual(position_grid_)), values_(std::move(values))
  {
    if (values_.size() != grid_.size())
      throw std::invalid_argument("AngularSpectrum: amplitude count does not match grid");
  }

  /// Wavevector grid (rad/m).
  const GridSpec& grid() const { return grid_; }
  const GridSpec& position_grid() const { return position_grid_; }

  std::span<Complex> values() { return values_; }
  std::span<const Complex> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  Complex& operator[](std::size_t i) { return values_[i]; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }

  /// Wavevector of bin m along an axis; q = 0 sits at bin samples/2.
  double wavevector(int axis, std::size_t m) const
  {
    const Axis& a = grid_.axis(axis);
    return (static_cast<double>(m) - static_cast<double>(zero_frequency_index(a.samples))) * a.spacing();
  }

private:
  GridSpec position_grid_;
  GridSpec grid_;
  std::vector<Complex> values_;
};

/// Riemann sum of |W|^2 over the grid.
inline double total_power(const TransverseField& field)
{
  double sum = 0.0;
  for (const auto& v : field.values())
    sum += std::norm(v);
  return sum * field.grid().cell_measure();
}

/// Riemann sum of |v|^2 over the wavevector grid. With the unitary
/// transform this equals total_power of the source field.
inline double total_power(const AngularSpectrum& spectrum)
{
  double sum = 0.0;
  for (const auto& v : spectrum.values())
    sum += std::norm(v);
  return sum * spectrum.grid().cell_measure();
}

/// Pointwise product a * conj(b) on a shared grid.
inline TransverseField multiply_conjugate(const TransverseField& a, const TransverseField& b)
{
  if (!(a.grid() == b.grid()))
    throw std::invalid_argument("multiply_conjugate: fields live on different grids");
  TransverseField out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i)
    out[i] = a[i] * std::conj(b[i]);
  return out;
}

} // namespace stimspdc
