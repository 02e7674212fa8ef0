#pragma once

// Unitary transform between a sampled transverse field and its angular
// spectrum:
//
//   v(q_m) = (h / sqrt(2 pi)) sum_j W(x_j) exp(-i q_m x_j)     (per axis)
//   W(x_j) = (dq / sqrt(2 pi)) sum_m v(q_m) exp(+i q_m x_j)
//
// so that sum |W|^2 h = sum |v|^2 dq. Positions come from the grid (cell
// centred, arbitrary offset); wavevectors are q_m = (m - N/2) * 2 pi / L.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstring>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include <fftw3.h>

#include "stimspdc/field.hpp"
#include "stimspdc/grid.hpp"

namespace stimspdc {

namespace detail {

// The FFTW planner is not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex()
{
  static std::mutex m;
  return m;
}

class FftwBuffer
{
public:
  explicit FftwBuffer(std::size_t n) : data_(fftw_alloc_complex(n)), n_(n)
  {
    if (data_ == nullptr)
      throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data_); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  fftw_complex* get() { return data_; }
  Complex* as_complex() { return reinterpret_cast<Complex*>(data_); }
  std::size_t size() const { return n_; }

private:
  fftw_complex* data_;
  std::size_t n_;
};

/// In-place unnormalised DFT over the grid layout. sign = FFTW_FORWARD
/// computes sum_j a_j exp(-2 pi i m j / N).
///
/// Data is staged through an fftw_malloc buffer so plan selection never
/// depends on the caller's allocation alignment; results are then
/// reproducible run to run.
inline void dft_inplace(std::span<Complex> data, const GridSpec& grid, int sign)
{
  FftwBuffer buf(data.size());
  fftw_plan plan = nullptr;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    if (grid.dims() == 1)
      plan = fftw_plan_dft_1d(static_cast<int>(grid.x().samples), buf.get(), buf.get(), sign, FFTW_ESTIMATE);
    else
      plan = fftw_plan_dft_2d(static_cast<int>(grid.y().samples), static_cast<int>(grid.x().samples), buf.get(),
                              buf.get(), sign, FFTW_ESTIMATE);
  }
  if (plan == nullptr)
    throw std::runtime_error("fftw: plan creation failed");
  std::memcpy(static_cast<void*>(buf.as_complex()), data.data(), data.size() * sizeof(Complex));
  fftw_execute(plan);
  std::memcpy(static_cast<void*>(data.data()), buf.as_complex(), data.size() * sizeof(Complex));
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

/// exp(i * 2 pi * t) with t reduced to [-1/2, 1/2] first.
inline Complex unit_phase_turns(double turns)
{
  turns -= std::round(turns);
  const double a = 2.0 * std::numbers::pi * turns;
  return {std::cos(a), std::sin(a)};
}

/// Per-axis twiddles linking the cell-centred, offset grid to the plain DFT.
struct AxisTwiddle
{
  std::vector<Complex> index_shift; // exp(+2 pi i M j / N)
  std::vector<Complex> origin_phase; // exp(-i q_m x_0)

  explicit AxisTwiddle(const Axis& a)
  {
    const std::size_t n = a.samples;
    const std::size_t m0 = zero_frequency_index(n);
    index_shift.resize(n);
    origin_phase.resize(n);
    for (std::size_t j = 0; j < n; ++j)
      index_shift[j] = unit_phase_turns(static_cast<double>((m0 * j) % n) / static_cast<double>(n));
    // q_m x_0 / (2 pi) = (m - M) * x_0 / L
    const double s = a.center / a.extent - 0.5 + 0.5 / static_cast<double>(n);
    for (std::size_t m = 0; m < n; ++m)
      origin_phase[m] = unit_phase_turns(-(static_cast<double>(m) - static_cast<double>(m0)) * s);
  }
};

inline double inv_sqrt_2pi() { return 1.0 / std::sqrt(2.0 * std::numbers::pi); }

} // namespace detail

/// Position space -> angular spectrum (unitary convention).
inline AngularSpectrum to_angular_spectrum(const TransverseField& field)
{
  const GridSpec& g = field.grid();
  std::vector<Complex> work(field.values().begin(), field.values().end());

  const detail::AxisTwiddle tx(g.x());
  if (g.dims() == 1) {
    for (std::size_t j = 0; j < work.size(); ++j)
      work[j] *= tx.index_shift[j];
    detail::dft_inplace(work, g, FFTW_FORWARD);
    const double scale = g.x().spacing() * detail::inv_sqrt_2pi();
    for (std::size_t m = 0; m < work.size(); ++m)
      work[m] *= tx.origin_phase[m] * scale;
  } else {
    const detail::AxisTwiddle ty(g.y());
    const std::size_t nx = g.x().samples, ny = g.y().samples;
    for (std::size_t iy = 0; iy < ny; ++iy)
      for (std::size_t ix = 0; ix < nx; ++ix)
        work[iy * nx + ix] *= tx.index_shift[ix] * ty.index_shift[iy];
    detail::dft_inplace(work, g, FFTW_FORWARD);
    const double scale = g.x().spacing() * g.y().spacing() * detail::inv_sqrt_2pi() * detail::inv_sqrt_2pi();
    for (std::size_t my = 0; my < ny; ++my)
      for (std::size_t mx = 0; mx < nx; ++mx)
        work[my * nx + mx] *= tx.origin_phase[mx] * ty.origin_phase[my] * scale;
  }
  return AngularSpectrum(g, std::move(work));
}

/// Angular spectrum -> position space; exact inverse of to_angular_spectrum.
inline TransverseField from_angular_spectrum(const AngularSpectrum& spectrum)
{
  const GridSpec& g = spectrum.position_grid();
  std::vector<Complex> work(spectrum.values().begin(), spectrum.values().end());

  const detail::AxisTwiddle tx(g.x());
  if (g.dims() == 1) {
    for (std::size_t m = 0; m < work.size(); ++m)
      work[m] *= std::conj(tx.origin_phase[m]);
    detail::dft_inplace(work, g, FFTW_BACKWARD);
    const double scale = spectrum.grid().x().spacing() * detail::inv_sqrt_2pi();
    for (std::size_t j = 0; j < work.size(); ++j)
      work[j] *= std::conj(tx.index_shift[j]) * scale;
  } else {
    const detail::AxisTwiddle ty(g.y());
    const std::size_t nx = g.x().samples, ny = g.y().samples;
    for (std::size_t my = 0; my < ny; ++my)
      for (std::size_t mx = 0; mx < nx; ++mx)
        work[my * nx + mx] *= std::conj(tx.origin_phase[mx] * ty.origin_phase[my]);
    detail::dft_inplace(work, g, FFTW_BACKWARD);
    const double scale =
      spectrum.grid().x().spacing() * spectrum.grid().y().spacing() * detail::inv_sqrt_2pi() * detail::inv_sqrt_2pi();
    for (std::size_t iy = 0; iy < ny; ++iy)
      for (std::size_t ix = 0; ix < nx; ++ix)
        work[iy * nx + ix] *= std::conj(tx.index_shift[ix] * ty.index_shift[iy]) * scale;
  }
  return TransverseField(g, std::move(work));
}

} // namespace stimspdc
