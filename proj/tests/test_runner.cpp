#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "stimspdc/app/pgm.hpp"
#include "stimspdc/app/runner.hpp"

using namespace stimspdc;
using namespace stimspdc::app;

namespace fs = std::filesystem;

namespace {

const fs::path configs = STIMSPDC_CONFIG_DIR;

ScenarioConfig demo(const std::string& name)
{
  return load_config((configs / (name + ".cfg")).string());
}

fs::path scratch(const std::string& name)
{
  const fs::path p = fs::path(::testing::TempDir()) / ("stimspdc_runner_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text)
{
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ','))
      cells.push_back(cell.substr(cell.find_first_not_of(' ')));
    rows.push_back(cells);
  }
  return rows;
}

const char* small_doubleslit = R"(name = small
pipeline = screened

[geometry]
wavelength_m = 800e-9
z_m = 1.0
screen_z_m = 0.5

[source_grid]
samples = 128
extent_m = 20e-6

[detector]
samples = 256
extent_m = 400e-6

[stimulating]
amplitude = 150

[aperture]
type = double-slit
half_separation_m = 4e-3
)";

int run_cli(const std::string& args)
{
  const std::string cmd = std::string(STIMSPDC_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Runner, DoubleSlitDemoMatchesClosedForm)
{
  const RunReport r = run(demo("eq204-doubleslit"), configs);
  ASSERT_TRUE(r.fringes.has_value());
  ASSERT_TRUE(r.analytic.has_value());
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_NEAR(r.fringes->total.visibility, r.analytic->visibility, 1e-6);
  EXPECT_NEAR(r.fringes->spontaneous.visibility, r.analytic->spontaneous_visibility, 1e-6);
  EXPECT_GE(r.fringes->stimulated.visibility, 1.0 - 1e-9);
  ASSERT_TRUE(r.fringes->measured_period.has_value());
  EXPECT_NEAR(*r.fringes->measured_period, r.fringes->expected_period, demo("eq204-doubleslit").detector->extent_m / 512);
}

TEST(Runner, AdjudicationDemoPicksDerivedConvention)
{
  const RunReport r = run(demo("beta-adjudication"), configs);
  ASSERT_TRUE(r.adjudication.has_value());
  EXPECT_TRUE(r.adjudication->conclusive);
  EXPECT_EQ(r.adjudication->matched, BetaConvention::derived);
  EXPECT_EQ(r.adjudication->matched, demo("beta-adjudication").beta_convention);
}

TEST(Runner, SweepFollowsVanCittertZernike)
{
  const RunReport r = run(demo("vcz-sweep"), configs);
  ASSERT_EQ(r.sweep.size(), 50u);
  bool negative = false;
  for (const auto& p : r.sweep) {
    EXPECT_NEAR(p.measured, p.predicted, 1e-3) << p.half_separation;
    negative = negative || p.predicted < 0.0;
  }
  EXPECT_TRUE(negative);
}

TEST(Runner, PhaseConjugationDemo)
{
  const RunReport r = run(demo("phase-conjugation"), configs);
  ASSERT_TRUE(r.centroid.has_value());
  EXPECT_TRUE(r.centroid->within_bin);
  EXPECT_TRUE(r.centroid->opposite);
  EXPECT_LT(r.centroid->expected_shift, 0.0);
}

TEST(Runner, NoStimulationGivesZeroStimulatedColumn)
{
  std::string text = small_doubleslit;
  text.replace(text.find("amplitude = 150"), 15, "amplitude = 0");
  text.replace(text.find("pipeline = screened"), 19, "pipeline = free");
  text.replace(text.find("screen_z_m = 0.5\n"), 17, "");
  text.replace(text.find("type = double-slit\nhalf_separation_m = 4e-3\n"), 43, "type = none\n");
  const RunReport r = run(parse_config(text), configs);
  const auto rows = csv_rows(profile_csv(r.profile));
  ASSERT_EQ(rows.size(), 257u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(std::stod(rows[i][2]), 0.0);
    EXPECT_EQ(std::stod(rows[i][3]), 1.0);
  }
}

TEST(Runner, DeterministicOutput)
{
  const ScenarioConfig c = parse_config(small_doubleslit);
  const RunReport a = run(c, configs), b = run(c, configs);
  EXPECT_EQ(profile_csv(a.profile), profile_csv(b.profile));
  EXPECT_EQ(a.config_hash, b.config_hash);
}

TEST(Runner, CsvHeaderAndFullPrecision)
{
  const RunReport r = run(parse_config(small_doubleslit), configs);
  const std::string csv = profile_csv(r.profile);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x_m, spontaneous, stimulated, total");
  const auto rows = csv_rows(csv);
  const IntensityProfile n = r.profile.normalized();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), 4u);
    EXPECT_EQ(std::stod(rows[i][0]), r.profile.grid().x().position(i - 1));
    EXPECT_EQ(std::stod(rows[i][3]), n.total()[i - 1]);
  }
}

TEST(Compare, ScreenedAgreesWithBruteForce)
{
  const ComparisonReport c = compare(parse_config(small_doubleslit), {"screened", "brute"}, configs);
  ASSERT_EQ(c.pairs.size(), 1u);
  EXPECT_LT(c.pairs[0].linf, 1e-6);
  EXPECT_TRUE(c.warnings.empty());
}

TEST(Compare, AnalyticAgreesWithBruteForce)
{
  ScenarioConfig cfg = parse_config(small_doubleslit);
  cfg.source_grid.samples = 512;
  const ComparisonReport c = compare(cfg, {"analytic", "brute", "screened"}, configs);
  ASSERT_EQ(c.pairs.size(), 3u);
  EXPECT_LT(c.pairs[0].linf, 1e-4);
  ASSERT_TRUE(c.pairs[0].visibility_difference.has_value());
  EXPECT_LT(*c.pairs[0].visibility_difference, 1e-4);
  const std::string text = format_comparison(c);
  EXPECT_NE(text.find("analytic"), std::string::npos);
}

TEST(Compare, FraunhoferOutsideValidityIsFlagged)
{
  ScenarioConfig cfg = parse_config(small_doubleslit);
  cfg.source_grid.extent_m = 2e-3;
  const ComparisonReport c = compare(cfg, {"screened", "fraunhofer"}, configs);
  bool flagged = false;
  for (const auto& w : c.warnings)
    flagged = flagged || w.code == "fraunhofer.validity";
  EXPECT_TRUE(flagged);
}

TEST(Compare, NeedsTwoPipelines)
{
  EXPECT_THROW(compare(parse_config(small_doubleslit), {"screened"}, configs), ConfigError);
}

TEST(Outputs, ImageTransferWritesPgms)
{
  const RunReport r = run(demo("image-transfer"), configs);
  ASSERT_TRUE(r.image_ncc.has_value());
  EXPECT_GE(*r.image_ncc, 0.99);
  const fs::path dir = scratch("image");
  write_outputs(r, dir);
  for (const char* name : {"total.pgm", "spontaneous.pgm", "stimulated.pgm", "profile.csv", "report.txt"})
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  const GrayImage img = read_pgm((dir / "stimulated.pgm").string());
  EXPECT_EQ(img.width, 128u);
  EXPECT_EQ(img.height, 128u);
  // Bars sit at rows 40-87 of the mask; the idler image keeps them there.
  EXPECT_GT(img.at(44, 64), 0.5);
  EXPECT_LT(img.at(64, 64), 0.2);
  EXPECT_LT(img.at(44, 10), 0.2);
}

TEST(Outputs, PgmRoundTrip)
{
  const fs::path dir = scratch("pgm");
  std::vector<double> v(6 * 4);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = static_cast<double>(i) / static_cast<double>(v.size() - 1);
  v[3] = 2.0;
  v[4] = -1.0;
  write_pgm((dir / "t.pgm").string(), 6, 4, v);
  const GrayImage img = read_pgm((dir / "t.pgm").string());
  ASSERT_EQ(img.width, 6u);
  ASSERT_EQ(img.height, 4u);
  for (std::size_t i = 0; i < v.size(); ++i)
    EXPECT_NEAR(img.pixels[i], std::clamp(v[i], 0.0, 1.0), 0.5 / 255.0 + 1e-12) << i;

  std::ofstream(dir / "ascii.pgm") << "P2\n# comment\n3 1\n10\n0 5 10\n";
  const GrayImage a = read_pgm((dir / "ascii.pgm").string());
  EXPECT_DOUBLE_EQ(a.at(1, 0), 0.5);
  std::ofstream(dir / "bad.pgm") << "P6\n1 1\n255\nabc";
  EXPECT_THROW(read_pgm((dir / "bad.pgm").string()), std::runtime_error);
}

TEST(Outputs, ReportCarriesHashAndConfig)
{
  const ScenarioConfig c = parse_config(small_doubleslit);
  const std::string report = format_report(run(c, configs));
  EXPECT_NE(report.find("config_hash = " + config_hash_hex(c)), std::string::npos);
  EXPECT_NE(report.find(canonical_config(c)), std::string::npos);
}

TEST(Cli, ExitCodes)
{
  const fs::path dir = scratch("cli");
  std::ofstream(dir / "ok.cfg") << small_doubleslit;
  std::ofstream(dir / "bad.cfg") << small_doubleslit << "bogus = 1\n";
  EXPECT_EQ(run_cli("run --config " + (dir / "ok.cfg").string() + " --out " + (dir / "o1").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "o1" / "profile.csv"));
  EXPECT_EQ(run_cli("run --config " + (dir / "bad.cfg").string()), 1);
  EXPECT_EQ(run_cli("run --config " + (dir / "missing.cfg").string()), 1);
  EXPECT_EQ(run_cli("run --config " + (dir / "ok.cfg").string() + " --pipeline warp"), 1);
  EXPECT_EQ(run_cli("run"), 1);
  EXPECT_EQ(run_cli("run --config " + (dir / "ok.cfg").string() + " --out " + (dir / "o2").string() +
                    " --pipeline analytic --grid 64"),
            0);
  EXPECT_EQ(run_cli("compare --config " + (dir / "ok.cfg").string() + " --out " + (dir / "o3").string() +
                    " --pipelines screened,brute"),
            0);
  EXPECT_TRUE(fs::exists(dir / "o3" / "compare.txt"));
  EXPECT_TRUE(fs::exists(dir / "o3" / "profile-brute.csv"));
}

TEST(Cli, RuntimeErrorExitsTwo)
{
  const fs::path dir = scratch("cli2");
  std::string text = small_doubleslit;
  // Uniform beams with a tilt defeat the analytic double-slit model.
  text += "\n[pump]\ntilt_rad_per_m = 10\n";
  std::ofstream(dir / "tilted.cfg") << text;
  EXPECT_EQ(run_cli("run --config " + (dir / "tilted.cfg").string() + " --out " + (dir / "o").string() +
                    " --pipeline analytic"),
            2);
  EXPECT_EQ(run_cli("run --config " + (configs / "image-transfer.cfg").string() + " --out " + (dir / "o2").string() +
                    " --pipeline brute"),
            2);
}

TEST(Cli, RepeatedRunsAreByteIdentical)
{
  const fs::path dir = scratch("cli3");
  std::ofstream(dir / "ok.cfg") << small_doubleslit;
  ASSERT_EQ(run_cli("run --config " + (dir / "ok.cfg").string() + " --out " + (dir / "a").string()), 0);
  ASSERT_EQ(run_cli("run --config " + (dir / "ok.cfg").string() + " --out " + (dir / "b").string()), 0);
  EXPECT_EQ(slurp(dir / "a" / "profile.csv"), slurp(dir / "b" / "profile.csv"));
}
