#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "stimspdc/beams.hpp"
#include "stimspdc/fringe.hpp"
#include "stimspdc/propagation.hpp"

using namespace stimspdc;

namespace {

constexpr double pi = std::numbers::pi;
const double k800 = 2.0 * pi / 800e-9;

// Paraxial Gaussian beam exp(-x^2/w0^2) after z, unitary 1D kernel:
// sqrt(q0 / (q0 + z)) exp(i k x^2 / 2 (q0 + z)), q0 = -i k w0^2 / 2.
Complex gaussian_beam(double x, double z, double k, double w0)
{
  const Complex q0{0.0, -k * w0 * w0 / 2.0};
  const Complex q = q0 + z;
  return std::sqrt(q0 / q) * std::exp(Complex{0.0, k * x * x / 2.0} / q);
}

double rms_radius(const TransverseField& f)
{
  const auto xs = f.grid().x().positions();
  double m2 = 0.0, p = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    m2 += xs[i] * xs[i] * std::norm(f[i]);
    p += std::norm(f[i]);
  }
  return 2.0 * std::sqrt(m2 / p);
}

double max_abs(std::span<const Complex> a)
{
  double m = 0.0;
  for (auto v : a)
    m = std::max(m, std::abs(v));
  return m;
}

TransverseField smooth_random_field(const GridSpec& g, std::mt19937_64& rng)
{
  // A few Gaussians with random centres, waists and tilts, well inside the grid.
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double L = g.x().extent;
  TransverseField f(g);
  for (int n = 0; n < 4; ++n) {
    const double c = 0.1 * L * u(rng), w = 0.05 * L * (1.5 + u(rng)), tilt = 20.0 / L * u(rng);
    const Complex amp{u(rng), u(rng)};
    BeamShape b = BeamShape::gaussian(1.0, w, c).tilted(tilt);
    if (g.dims() == 2)
      b.center[1] = -c;
    const TransverseField part = sample(b, g);
    for (std::size_t i = 0; i < f.size(); ++i)
      f[i] += amp * part[i];
  }
  return f;
}

} // namespace

TEST(Fresnel, ZeroDistanceIsIdentity)
{
  std::mt19937_64 rng(1);
  const GridSpec g = GridSpec::line(64, 1e-3);
  const TransverseField f = smooth_random_field(g, rng);
  const TransverseField out = fresnel_propagate(f, 0.0, k800);
  for (std::size_t i = 0; i < f.size(); ++i)
    EXPECT_EQ(out[i], f[i]);
}

TEST(Fresnel, GaussianBeamRadius)
{
  const double w0 = 1e-4;
  const double zr = k800 * w0 * w0 / 2.0;
  const GridSpec g = GridSpec::line(2048, 1.2e-2);
  const TransverseField f0 = sample(BeamShape::gaussian(1.0, w0), g);
  for (double z : {0.3 * zr, zr, 2.5 * zr}) {
    Diagnostics d;
    const TransverseField f = fresnel_propagate(f0, z, k800, PropagationMethod::automatic, &d);
    const double expected = w0 * std::sqrt(1.0 + std::pow(2.0 * z / (k800 * w0 * w0), 2));
    EXPECT_NEAR(rms_radius(f), expected, 1e-3 * expected) << "z=" << z;
    EXPECT_TRUE(d.empty());
  }
}

TEST(Fresnel, GaussianBeamFieldBothMethods)
{
  const double w0 = 1e-4;
  const GridSpec g = GridSpec::line(1024, 6e-3);
  const TransverseField f0 = sample(BeamShape::gaussian(1.0, w0), g);
  const double z_asm = 0.5 * angular_spectrum_max_distance(g.x(), k800);
  const double z_quad = 2.0 * angular_spectrum_max_distance(g.x(), k800);
  for (auto [z, m] : {std::pair{z_asm, PropagationMethod::angular_spectrum}, std::pair{z_quad, PropagationMethod::quadrature}}) {
    Diagnostics d;
    const TransverseField f = fresnel_propagate(f0, z, k800, m, &d);
    EXPECT_TRUE(d.empty());
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      err = std::max(err, std::abs(f[i] - gaussian_beam(g.x().position(i), z, k800, w0)));
    EXPECT_LT(err, 1e-9) << "z=" << z;
  }
}

TEST(Fresnel, PlaneWavePhase)
{
  const GridSpec g = GridSpec::line(256, 2e-3);
  const double q0 = 7.0 * 2.0 * pi / 2e-3;
  const TransverseField f0 = sample(BeamShape::uniform(1.0).tilted(q0), g);
  const double z = 0.01;
  const TransverseField f = fresnel_propagate(f0, z, k800, PropagationMethod::angular_spectrum);
  const Complex phase = std::polar(1.0, -q0 * q0 * z / (2.0 * k800));
  for (std::size_t i : {0u, 17u, 128u, 200u, 255u})
    EXPECT_LT(std::abs(f[i] - f0[i] * phase), 1e-9);
}

TEST(Fresnel, EnergyConservation)
{
  std::mt19937_64 rng(2);
  for (const GridSpec& g : {GridSpec::line(512, 4e-3), GridSpec::square(96, 4e-3)}) {
    for (int trial = 0; trial < 5; ++trial) {
      const TransverseField f = smooth_random_field(g, rng);
      const double z = (0.05 + 0.9 * trial / 4.0) * angular_spectrum_max_distance(g.x(), k800);
      const double p0 = total_power(f);
      EXPECT_LT(std::abs(total_power(fresnel_propagate(f, z, k800)) - p0) / p0, 1e-9);
    }
  }
}

TEST(Fresnel, Semigroup)
{
  std::mt19937_64 rng(4);
  for (const GridSpec& g : {GridSpec::line(512, 4e-3), GridSpec::square(64, 4e-3)}) {
    const TransverseField f = smooth_random_field(g, rng);
    const double zmax = angular_spectrum_max_distance(g.x(), k800);
    const double z1 = 0.3 * zmax, z2 = 0.45 * zmax;
    const TransverseField direct = fresnel_propagate(f, z1 + z2, k800);
    const TransverseField stepped = fresnel_propagate(fresnel_propagate(f, z1, k800), z2, k800);
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      err = std::max(err, std::abs(direct[i] - stepped[i]));
    EXPECT_LT(err, 1e-9 * max_abs(direct.values()));
  }
}

TEST(Propagation, AutomaticMethodAndWarnings)
{
  const GridSpec g = GridSpec::line(256, 2e-3);
  const TransverseField f = sample(BeamShape::gaussian(1.0, 2e-4), g);
  const double zc = angular_spectrum_max_distance(g.x(), k800);
  EXPECT_NEAR(zc, k800 * g.x().spacing() * 2e-3 / (2.0 * pi), 1e-15);

  Diagnostics ok_near, ok_far;
  fresnel_propagate(f, 0.5 * zc, k800, PropagationMethod::automatic, &ok_near);
  fresnel_propagate(f, 3.0 * zc, k800, PropagationMethod::automatic, &ok_far);
  EXPECT_TRUE(ok_near.empty());
  EXPECT_TRUE(ok_far.empty());

  Diagnostics forced_asm, forced_quad;
  fresnel_propagate(f, 3.0 * zc, k800, PropagationMethod::angular_spectrum, &forced_asm);
  fresnel_propagate(f, 0.3 * zc, k800, PropagationMethod::quadrature, &forced_quad);
  EXPECT_TRUE(forced_asm.has("sampling.angular_spectrum"));
  EXPECT_TRUE(forced_quad.has("sampling.chirp"));
}

TEST(Propagation, OnGridChirpCriterionMatchesNyquistEdgeRule)
{
  // For targets on the grid the quadrature criterion is k (L/2) / z < pi / h.
  const Axis a{128, 1e-3, 0.0};
  const double z_edge = k800 * (a.extent / 2.0) * a.spacing() / pi;
  EXPECT_FALSE(chirp_well_sampled(a, 0.99 * z_edge, k800, a.extent));
  EXPECT_TRUE(chirp_well_sampled(a, 1.01 * z_edge, k800, a.extent));
}

TEST(Propagation, PointsAgreeWithGrid)
{
  const GridSpec g = GridSpec::line(256, 2e-3);
  const TransverseField f = sample(BeamShape::gaussian(1.0, 1e-4, 1e-4), g);
  const double z = 0.02;
  const TransverseField on_grid = propagate_to_grid(f, z, k800, g, {PropagationMethod::automatic, KernelNormalization::unitary});
  const std::vector<double> pts{g.x().position(3), g.x().position(100), g.x().position(180)};
  const auto at = propagate_to_points(f, z, k800, pts, {PropagationMethod::automatic, KernelNormalization::unitary});
  EXPECT_LT(std::abs(at[0] - on_grid[3]), 1e-12);
  EXPECT_LT(std::abs(at[1] - on_grid[100]), 1e-12);
  EXPECT_LT(std::abs(at[2] - on_grid[180]), 1e-12);
}

TEST(Propagation, BareNormalizationDropsPrefactor)
{
  const GridSpec g = GridSpec::line(512, 4e-3);
  const TransverseField f = sample(BeamShape::gaussian(1.0, 1e-4), g);
  const double z = 0.05;
  const auto unitary = propagate_to_grid(f, z, k800, g, {PropagationMethod::automatic, KernelNormalization::unitary});
  const auto bare = propagate_to_grid(f, z, k800, g, {PropagationMethod::automatic, KernelNormalization::bare});
  const Complex pref = std::sqrt(k800 / (2.0 * pi * z)) / std::polar(1.0, pi / 4.0);
  for (std::size_t i = 0; i < f.size(); i += 37)
    EXPECT_LT(std::abs(unitary[i] - pref * bare[i]), 1e-12 * std::abs(pref));
}

TEST(Propagation, PointSourceIsUnitModulusChirp)
{
  const std::vector<double> pts{-1e-3, 0.0, 2e-4};
  const auto w = point_source_field(1e-4, 0.5, k800, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = pts[i] - 1e-4;
    EXPECT_LT(std::abs(w[i] - std::polar(1.0, k800 * d * d / 1.0)), 1e-12);
  }
  SlitField s{{-1e-3, 1e-3}, {1.0, 1.0}};
  const auto y = propagate_slits(s, 1.0, k800, std::vector<double>{0.0});
  EXPECT_NEAR(std::abs(y[0]), 2.0, 1e-12);
}

TEST(Aperture, UnitAndZeroTransmission)
{
  std::mt19937_64 rng(8);
  const GridSpec g = GridSpec::line(64, 1e-3);
  const TransverseField f = smooth_random_field(g, rng);
  TransverseField ones(g), zeros(g);
  for (auto& v : ones.values())
    v = 1.0;
  const auto a = std::get<TransverseField>(apply_aperture(f, Aperture::sampled(ones)));
  const auto b = std::get<TransverseField>(apply_aperture(f, Aperture::sampled(zeros)));
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_EQ(a[i], f[i]);
    EXPECT_EQ(b[i], Complex(0.0, 0.0));
  }
}

TEST(Aperture, DoubleSlitOnConstantField)
{
  const GridSpec g = GridSpec::line(64, 1e-3);
  const TransverseField f = sample(BeamShape::uniform(1.0), g);
  const double d = 1.234e-4;
  const auto s = std::get<SlitField>(apply_aperture(f, Aperture::double_slit(d)));
  ASSERT_EQ(s.positions.size(), 2u);
  EXPECT_DOUBLE_EQ(s.positions[0], -d);
  EXPECT_DOUBLE_EQ(s.positions[1], d);
  EXPECT_LT(std::abs(s.amplitudes[0] - 1.0), 1e-12);
  EXPECT_LT(std::abs(s.amplitudes[1] - 1.0), 1e-12);
}

TEST(Aperture, Errors)
{
  const GridSpec g = GridSpec::line(64, 1e-3);
  const TransverseField f(g);
  EXPECT_THROW(apply_aperture(f, Aperture::double_slit(0.6e-3)), SlitOffGridError);
  EXPECT_THROW(apply_aperture(f, Aperture::sampled(TransverseField(GridSpec::line(32, 1e-3)))), GridMismatchError);
  EXPECT_THROW(Aperture::slits({}), std::invalid_argument);
  EXPECT_THROW(Aperture::slits({1e-4, 1e-4}), std::invalid_argument);
}

TEST(ApertureSpectrum, SingleAndDoubleSlit)
{
  const ApertureSpectrum one(Aperture::slits({0.0}));
  const double d = 3e-4;
  const ApertureSpectrum two(Aperture::double_slit(d));
  for (double q : {-5e4, 0.0, 1e3, 2.2e4, 1e5}) {
    EXPECT_LT(std::abs(one(q) - 1.0), 1e-15);
    EXPECT_NEAR(std::norm(two(q)), 4.0 * std::pow(std::cos(q * d), 2), 1e-12);
  }
}

TEST(ApertureSpectrum, RectangleFirstZero)
{
  const GridSpec g = GridSpec::line(1024, 4e-3);
  const double b = 64.0 * g.x().spacing(); // whole number of cells
  const Aperture rect = Aperture::sampled(sample(BeamShape::uniform(1.0, b / 2.0), g));
  const AngularSpectrum t = ApertureSpectrum(rect).tabulate(g);
  const std::size_t m0 = zero_frequency_index(g.x().samples);
  EXPECT_NEAR(std::abs(t[m0]), b, 1e-12);
  std::size_t m = m0 + 1;
  while (m + 1 < t.size() && !(std::abs(t[m]) <= std::abs(t[m - 1]) && std::abs(t[m]) <= std::abs(t[m + 1])))
    ++m;
  EXPECT_NEAR(t.wavevector(0, m), 2.0 * pi / b, t.grid().x().spacing());
  // The FFT table agrees with direct summation.
  const ApertureSpectrum direct(rect);
  for (std::size_t j = m0; j < m0 + 40; ++j)
    EXPECT_LT(std::abs(t[j] - direct(t.wavevector(0, j))), 1e-15);
}

TEST(ApertureSpectrum, DoubleSlitFringePeriodOnDetector)
{
  const double d = 2e-4, beta2 = k800 / 0.5;
  const ApertureSpectrum T(Aperture::double_slit(d));
  const GridSpec det = GridSpec::line(1000, 10.0 * pi / (beta2 * d));
  const auto xs = det.x().positions();
  std::vector<double> y(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    y[i] = std::norm(T(beta2 * xs[i]));
  const auto period = measure_period(xs, y);
  ASSERT_TRUE(period.has_value());
  EXPECT_NEAR(*period, pi / (beta2 * d), det.x().spacing());
}

TEST(FraunhoferCheck, Examples)
{
  const OpticalGeometry near(8e6, 0.2, 0.1);
  const FraunhoferCheck a = fraunhofer_phase_check(near, 1e-3, 0.0);
  EXPECT_NEAR(a.source_phase, 40.0, 1e-9);
  EXPECT_FALSE(a.valid());

  const OpticalGeometry far(8e6, 2e4, 1e4);
  const FraunhoferCheck b = fraunhofer_phase_check(far, 1e-3, 0.0);
  EXPECT_NEAR(b.source_phase, 4e-4, 1e-15);
  EXPECT_TRUE(b.valid());

  const FraunhoferCheck tiny = fraunhofer_phase_check(near, GridSpec::line(8, 1e-9));
  EXPECT_TRUE(tiny.valid());
  EXPECT_LT(tiny.source_phase, 1e-9);
}

TEST(Fresnel, FraunhoferConsistencyLadder)
{
  // Uniform source of half width a; at large z the Fresnel intensity at x
  // approaches |T(k x / z)|^2 = (2a sinc(k x a / z))^2 up to scale.
  const double a = 5e-5;
  const GridSpec src = GridSpec::line(400, 2.0 * a);
  const TransverseField f = sample(BeamShape::uniform(1.0), src);
  double previous = std::numeric_limits<double>::infinity();
  for (double z : {0.002, 0.008, 0.032, 0.128, 0.512}) {
    const double first_zero = pi * z / (k800 * a);
    const GridSpec det = GridSpec::line(301, 6.0 * first_zero);
    const auto xs = det.x().positions();
    const auto w = propagate_to_points(f, z, k800, xs, {PropagationMethod::quadrature, KernelNormalization::bare});
    double num = 0.0, den = 0.0;
    const double peak_w = std::norm(w[150]);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double u = k800 * xs[i] * a / z;
      const double s = u == 0.0 ? 1.0 : std::sin(u) / u;
      const double diff = std::norm(w[i]) / peak_w - s * s;
      num += diff * diff;
      den += s * s * s * s;
    }
    const double rel = std::sqrt(num / den);
    EXPECT_LT(rel, previous) << "z=" << z;
    previous = rel;
  }
  EXPECT_LT(previous, 1e-3);
}
