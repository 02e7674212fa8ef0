#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "stimspdc/beams.hpp"
#include "stimspdc/field.hpp"
#include "stimspdc/fourier.hpp"
#include "stimspdc/grid.hpp"

using namespace stimspdc;

namespace {

constexpr double pi = std::numbers::pi;

TransverseField random_field(const GridSpec& g, std::mt19937_64& rng)
{
  std::normal_distribution<double> n(0.0, 1.0);
  TransverseField f(g);
  for (auto& v : f.values())
    v = {n(rng), n(rng)};
  return f;
}

double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b)
{
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(std::span<const Complex> a)
{
  double m = 0.0;
  for (auto v : a)
    m = std::max(m, std::abs(v));
  return m;
}

// v_m = h / sqrt(2 pi) sum_j W_j exp(-i q_m x_j), summed directly.
std::vector<Complex> direct_spectrum_1d(const TransverseField& f)
{
  const Axis& a = f.grid().x();
  const Axis q = dual_axis(a);
  std::vector<Complex> out(a.samples);
  for (std::size_t m = 0; m < a.samples; ++m) {
    Complex s{0.0, 0.0};
    for (std::size_t j = 0; j < a.samples; ++j)
      s += f[j] * std::polar(1.0, -q.position(m) * a.position(j));
    out[m] = s * a.spacing() / std::sqrt(2.0 * pi);
  }
  return out;
}

} // namespace

TEST(Grid, CellCentredPositions)
{
  const GridSpec g = GridSpec::line(8, 4.0, 1.0);
  EXPECT_DOUBLE_EQ(g.x().spacing(), 0.5);
  EXPECT_DOUBLE_EQ(g.x().first(), -0.75);
  EXPECT_DOUBLE_EQ(g.x().last(), 2.75);
  EXPECT_EQ(g.size(), 8u);
  EXPECT_DOUBLE_EQ(g.cell_measure(), 0.5);
}

TEST(Grid, DualSpacingIsTwoPiOverExtent)
{
  const GridSpec g = GridSpec::square(16, 2.0);
  const GridSpec d = dual(g);
  EXPECT_NEAR(d.x().spacing(), 2.0 * pi / 2.0, 1e-15);
  EXPECT_NEAR(d.y().spacing(), pi, 1e-15);
  EXPECT_NEAR(d.x().position(zero_frequency_index(16)), 0.0, 1e-12);
  const GridSpec odd = GridSpec::line(15, 3.0);
  EXPECT_NEAR(dual(odd).x().position(zero_frequency_index(15)), 0.0, 1e-12);
}

TEST(Grid, RejectsDegenerateAxes)
{
  EXPECT_THROW(GridSpec::line(1, 1.0), std::invalid_argument);
  EXPECT_THROW(GridSpec::line(8, 0.0), std::invalid_argument);
  EXPECT_THROW(GridSpec::line(8, -1.0), std::invalid_argument);
}

TEST(AngularSpectrum, ConstantFieldIsDeltaAtZero)
{
  const GridSpec g = GridSpec::line(64, 3.0, 0.4);
  TransverseField f(g);
  for (auto& v : f.values())
    v = 1.0;
  const AngularSpectrum s = to_angular_spectrum(f);
  const std::size_t m0 = zero_frequency_index(64);
  EXPECT_NEAR(std::abs(s[m0]), 3.0 / std::sqrt(2.0 * pi), 1e-12);
  for (std::size_t m = 0; m < s.size(); ++m)
    if (m != m0) {
      EXPECT_LT(std::abs(s[m]), 1e-12);
    }
}

TEST(AngularSpectrum, PlaneWaveLandsOnItsBin)
{
  const GridSpec g = GridSpec::line(128, 2.0);
  const double dq = 2.0 * pi / 2.0;
  TransverseField f = sample(BeamShape::uniform(1.0).tilted(5.0 * dq), g);
  const AngularSpectrum s = to_angular_spectrum(f);
  const std::size_t target = zero_frequency_index(128) + 5;
  EXPECT_NEAR(s.wavevector(0, target), 5.0 * dq, 1e-12);
  for (std::size_t m = 0; m < s.size(); ++m) {
    if (m == target)
      EXPECT_NEAR(std::abs(s[m]), 2.0 / std::sqrt(2.0 * pi), 1e-12);
    else
      EXPECT_LT(std::abs(s[m]), 1e-11);
  }
}

TEST(AngularSpectrum, MatchesDirectSummationOffCentreGrid)
{
  std::mt19937_64 rng(7);
  for (std::size_t n : {16u, 17u, 64u}) {
    const GridSpec g = GridSpec::line(n, 1.7, -0.31);
    const TransverseField f = random_field(g, rng);
    const auto direct = direct_spectrum_1d(f);
    const AngularSpectrum s = to_angular_spectrum(f);
    EXPECT_LT(max_abs_diff(s.values(), direct), 1e-12 * max_abs(direct)) << "n=" << n;
  }
}

TEST(AngularSpectrum, GaussianSpectrumRadiusByMoments)
{
  const double w0 = 1e-4;
  const GridSpec g = GridSpec::line(1024, 4e-3);
  const AngularSpectrum s = to_angular_spectrum(sample(BeamShape::gaussian(1.0, w0), g));
  double m2 = 0.0, p = 0.0;
  for (std::size_t m = 0; m < s.size(); ++m) {
    const double q = s.wavevector(0, m);
    m2 += q * q * std::norm(s[m]);
    p += std::norm(s[m]);
  }
  // 1/e^2 radius of a Gaussian intensity is twice its rms width.
  EXPECT_NEAR(2.0 * std::sqrt(m2 / p), 2.0 / w0, 1e-6 * 2.0 / w0);
}

TEST(AngularSpectrum, RoundTripRandomFields)
{
  std::mt19937_64 rng(11);
  for (const GridSpec& g : {GridSpec::line(100, 2.5, 0.3), GridSpec::line(33, 1.0),
                            GridSpec(Axis{24, 1.0, 0.2}, Axis{18, 0.7, -0.1})}) {
    const TransverseField f = random_field(g, rng);
    const TransverseField back = from_angular_spectrum(to_angular_spectrum(f));
    EXPECT_LT(max_abs_diff(back.values(), f.values()), 1e-12 * max_abs(f.values()));
  }
}

TEST(AngularSpectrum, ZeroSpectrumGivesZeroField)
{
  const AngularSpectrum s(GridSpec::line(32, 1.0));
  const TransverseField f = from_angular_spectrum(s);
  EXPECT_EQ(max_abs(f.values()), 0.0);
}

TEST(AngularSpectrum, DeltaBinAmplitudeConvention)
{
  const double amp = 2.5;
  {
    const GridSpec g = GridSpec::line(50, 4.0, 0.7);
    AngularSpectrum s(g);
    s[zero_frequency_index(50)] = amp;
    const TransverseField f = from_angular_spectrum(s);
    const double expected = amp * s.grid().x().spacing() / std::sqrt(2.0 * pi);
    for (auto v : f.values())
      EXPECT_NEAR(std::abs(v - Complex{expected, 0.0}), 0.0, 1e-14);
  }
  {
    const GridSpec g(Axis{16, 2.0, 0.0}, Axis{12, 3.0, 0.5});
    AngularSpectrum s(g);
    s[s.grid().index(zero_frequency_index(16), zero_frequency_index(12))] = amp;
    const TransverseField f = from_angular_spectrum(s);
    const double expected = amp * s.grid().cell_measure() / (2.0 * pi);
    for (auto v : f.values())
      EXPECT_NEAR(std::abs(v - Complex{expected, 0.0}), 0.0, 1e-14);
  }
}

TEST(TotalPower, RectangleAndZero)
{
  const double a = 0.3, wp = 1.7;
  const TransverseField f = sample(BeamShape::uniform(wp), GridSpec::line(200, 2.0 * a));
  EXPECT_NEAR(total_power(f), 2.0 * a * wp * wp, 1e-13);
  EXPECT_EQ(total_power(TransverseField(GridSpec::line(10, 1.0))), 0.0);
}

TEST(TotalPower, GaussianIntegral)
{
  const double w0 = 2e-4;
  const TransverseField f = sample(BeamShape::gaussian(1.0, w0), GridSpec::line(512, 4e-3));
  EXPECT_NEAR(total_power(f), w0 * std::sqrt(pi / 2.0), 1e-6 * w0 * std::sqrt(pi / 2.0));
}

TEST(Properties, ParsevalRandomFields)
{
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> n(8, 300);
  std::uniform_real_distribution<double> u(0.1, 5.0), c(-1.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const GridSpec g = trial % 3 == 0 ? GridSpec(Axis{n(rng) / 8 + 2, u(rng), c(rng)}, Axis{n(rng) / 8 + 2, u(rng), c(rng)})
                                      : GridSpec::line(n(rng), u(rng), c(rng));
    const TransverseField f = random_field(g, rng);
    const double p = total_power(f);
    EXPECT_LT(std::abs(p - total_power(to_angular_spectrum(f))) / p, 1e-10);
  }
}

TEST(Properties, Linearity)
{
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (const GridSpec& g : {GridSpec::line(77, 1.3, 0.2), GridSpec::square(20, 0.5)}) {
    for (int trial = 0; trial < 10; ++trial) {
      const TransverseField f = random_field(g, rng), h = random_field(g, rng);
      const Complex alpha{n(rng), n(rng)}, beta{n(rng), n(rng)};
      TransverseField mix(g);
      for (std::size_t i = 0; i < mix.size(); ++i)
        mix[i] = alpha * f[i] + beta * h[i];
      const AngularSpectrum sf = to_angular_spectrum(f), sh = to_angular_spectrum(h), sm = to_angular_spectrum(mix);
      std::vector<Complex> combined(sm.size());
      for (std::size_t i = 0; i < sm.size(); ++i)
        combined[i] = alpha * sf[i] + beta * sh[i];
      EXPECT_LT(max_abs_diff(sm.values(), combined), 1e-12 * max_abs(combined));
    }
  }
}

TEST(Field, MultiplyConjugateRejectsGridMismatch)
{
  const TransverseField a(GridSpec::line(16, 1.0)), b(GridSpec::line(16, 2.0));
  EXPECT_THROW(multiply_conjugate(a, b), std::invalid_argument);
}

TEST(Field, MultiplyConjugateValues)
{
  const GridSpec g = GridSpec::line(4, 1.0);
  const TransverseField a(g, {{1, 2}, {3, 0}, {0, 1}, {2, 2}});
  const TransverseField b(g, {{0, 1}, {1, 1}, {1, 0}, {2, -2}});
  const TransverseField p = multiply_conjugate(a, b);
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_EQ(p[i], a[i] * std::conj(b[i]));
}
