#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "mipt/analysis.hpp"
#include "mipt/config.hpp"
#include "mipt/errors.hpp"
#include "mipt/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

mipt::KeyValueConfig parse(const std::string& text) {
  std::istringstream in(text);
  return mipt::KeyValueConfig::parse(in, "test");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mipt-test-" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(KeyValueConfig, ParsesCommentsAndLists) {
  const auto kv = parse("# grid\nalpha = 2, 3\n\np=0.1:0.3:0.1  # inline\nscheme = a,b\nseed=7\n");
  EXPECT_EQ(kv.get_doubles("alpha"), (std::vector<double>{2.0, 3.0}));
  EXPECT_EQ(kv.get_doubles("p"), (std::vector<double>{0.1, 0.2, 0.3}));
  EXPECT_EQ(kv.get_strings("scheme"), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(kv.get_int("seed", 0), 7);
  EXPECT_EQ(kv.get_int("R", 5), 5);
}

TEST(KeyValueConfig, RejectsMalformedInput) {
  EXPECT_THROW(parse("alpha 4\n"), mipt::ConfigError);
  EXPECT_THROW(parse("alpha=4\nalpha=5\n"), mipt::ConfigError);
  EXPECT_THROW(parse("R=ten\n").get_int("R", 0), mipt::ConfigError);
  EXPECT_THROW(parse("x=maybe\n").get_bool("x", false), mipt::ConfigError);
}

TEST(NumberList, RangeMatchesTypedList) {
  const auto r = mipt::parse_number_list("0.18:0.23:0.005");
  ASSERT_EQ(r.size(), 11u);
  EXPECT_EQ(r[4], 0.2);
  EXPECT_EQ(r.back(), 0.23);
  EXPECT_EQ(mipt::parse_number_list("0.195"), (std::vector<double>{0.195}));
  EXPECT_THROW(mipt::parse_number_list("0.1:0.2:0"), mipt::ConfigError);
}

TEST(SimulationConfig, UnknownKeyIsError) {
  EXPECT_THROW(mipt::SimulationConfig::from(parse("p=0.2\nL=16\nrealizations=10\n")), mipt::ConfigError);
}

TEST(SimulationConfig, CellsAreSortedAndValidated) {
  const auto cfg = mipt::SimulationConfig::from(parse("alpha=3\np=0.3,0.1\nL=32,16\nscheme=b,a\n"));
  const auto cells = cfg.cells();
  ASSERT_EQ(cells.size(), 8u);
  EXPECT_EQ(cells[0].scheme, mipt::Scheme::a);
  EXPECT_EQ(cells[0].L, 16u);
  EXPECT_EQ(cells[0].p, 0.1);
  EXPECT_EQ(cells[1].p, 0.3);
  EXPECT_EQ(cells[4].scheme, mipt::Scheme::b);

  EXPECT_THROW(mipt::SimulationConfig::from(parse("p=1\nL=16\n")).validate(), mipt::ConfigError);
  EXPECT_NO_THROW(mipt::SimulationConfig::from(parse("p=1\nL=16\nallow_unit_p=true\n")).validate());
  EXPECT_THROW(mipt::SimulationConfig::from(parse("p=0.2\nL=24\nscheme=b\n")).validate(), mipt::ConfigError);
  EXPECT_THROW(mipt::SimulationConfig::from(parse("p=0.2\nL=16\nR=0\n")).validate(), mipt::ConfigError);
  EXPECT_NO_THROW(mipt::SimulationConfig::from(parse("p=0.2\nL=16\nR=1\n")).validate());
}

TEST(ResultsCsv, GoldenHeaderAndRoundTrip) {
  mipt::SteadyStateEstimate row;
  row.alpha = 4.0;
  row.p = 0.2;
  row.L = 64;
  row.mean = 1.0512345678901;
  row.std_error = 0.0031;
  row.R = 1000;
  row.n_t = 397;
  row.delta_t = 10;
  row.t_min = 128;
  row.seed = 1;
  std::ostringstream out;
  mipt::write_results_csv(out, {row});
  EXPECT_EQ(out.str(),
            "alpha,p,L,scheme,I_mean,I_stderr,R,N_t,delta_t,t_min,seed\n"
            "4,0.2,64,a,1.05123457,0.0031,1000,397,10,128,1\n");
  std::istringstream in(out.str());
  const auto back = mipt::read_results_csv(in);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_NEAR(back[0].mean, row.mean, 1e-8);
  EXPECT_EQ(back[0].L, 64u);
  EXPECT_EQ(back[0].delta_t, 10);

  std::istringstream bad("alpha,p\n1,2\n");
  EXPECT_THROW(mipt::read_results_csv(bad), mipt::AnalysisError);
}

mipt::SimulationConfig tiny_sweep(const fs::path& dir) {
  auto cfg = mipt::SimulationConfig::from(parse("alpha=4\np=0.1,0.3\nL=8,16\nR=6\nR_pilot=8\nt_max=96\nseed=3\n"));
  cfg.threads = 1;
  cfg.output_dir = dir;
  return cfg;
}

TEST(Simulation, ResumeAfterInterruptionIsByteIdentical) {
  const fs::path dir = scratch("resume");
  const auto cfg = tiny_sweep(dir);
  const auto first = mipt::run_simulation(cfg);
  EXPECT_EQ(first.computed, 4u);
  const std::string csv = slurp(first.csv);

  // Drop one finished cell from the manifest as if the run had been killed before it.
  nlohmann::json manifest = nlohmann::json::parse(slurp(first.manifest));
  ASSERT_EQ(manifest["cells"].size(), 4u);
  manifest["cells"].erase(manifest["cells"].begin());
  std::ofstream(first.manifest) << manifest.dump();
  fs::remove(first.csv);

  const auto second = mipt::run_simulation(cfg);
  EXPECT_EQ(second.computed, 1u);
  EXPECT_EQ(second.reused, 3u);
  EXPECT_EQ(slurp(second.csv), csv);

  fs::remove_all(dir);
  EXPECT_EQ(slurp(mipt::run_simulation(cfg).csv), csv);
  fs::remove_all(dir);
}

TEST(Simulation, ChangedProtocolInvalidatesCache) {
  const fs::path dir = scratch("fingerprint");
  auto cfg = tiny_sweep(dir);
  mipt::run_simulation(cfg);
  cfg.R = 7;
  EXPECT_EQ(mipt::run_simulation(cfg).computed, 4u);
  cfg.output_dir = dir;
  EXPECT_EQ(mipt::run_simulation(cfg).reused, 4u);
  fs::remove_all(dir);
}

TEST(EntropyProfileRun, FullMeasurementGivesZeroEntropy) {
  const fs::path dir = scratch("profile");
  auto cfg = mipt::SimulationConfig::from(
      parse("alpha=4\np=1\nallow_unit_p=true\nL=32\nscheme=a,b\nR=4\nR_pilot=8\nt_max=100\n"));
  cfg.threads = 1;
  cfg.output_dir = dir;
  const auto summary = mipt::run_entropy_profile(cfg);
  ASSERT_EQ(summary.rows.size(), 6u);
  for (const auto& r : summary.rows) {
    EXPECT_EQ(r.S_mean, 0.0) << r.subsystem;
    EXPECT_GT(r.chord_length, 0.0);
  }
  const std::string text = slurp(summary.csv);
  EXPECT_EQ(text.substr(0, text.find('\n')), mipt::kEntropyCsvHeader);
  fs::remove_all(dir);
}

std::vector<mipt::SteadyStateEstimate> synthetic_rows(double p_c, double nu, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<mipt::SteadyStateEstimate> rows;
  for (std::size_t L : {16, 32, 64, 128, 256}) {
    for (int k = 0; k <= 10; ++k) {
      mipt::SteadyStateEstimate r;
      r.alpha = 4.0;
      r.p = 0.18 + 0.005 * k;
      r.L = L;
      const double x = (r.p - p_c) * std::pow(static_cast<double>(L), 1.0 / nu);
      r.mean = 1.0 - 0.8 * std::tanh(x) + 0.3 * std::pow(static_cast<double>(L), -0.7) + noise * n01(rng);
      r.std_error = noise;
      r.R = 1000;
      rows.push_back(r);
    }
  }
  return rows;
}

TEST(Analysis, EmptyInputIsError) {
  EXPECT_THROW(mipt::analyze_results({}, mipt::AnalysisConfig{}), mipt::AnalysisError);
  EXPECT_THROW(mipt::crossing_table({}, mipt::AnalysisConfig{}), mipt::AnalysisError);
}

TEST(Analysis, RecoversInjectedCriticalPoint) {
  mipt::AnalysisConfig cfg;
  cfg.bootstrap = 100;
  cfg.crossing_bootstrap = 100;
  cfg.restarts = 2;
  cfg.threads = 1;
  const auto report = mipt::analyze_results(synthetic_rows(0.2, 1.3, 0.002, 4), cfg);
  ASSERT_EQ(report.groups.size(), 1u);
  const auto& g = report.groups[0];
  ASSERT_TRUE(g.p_c());
  EXPECT_NEAR(*g.p_c(), 0.2, 0.002);
  EXPECT_NEAR(*g.nu(), 1.3, 0.1);
  EXPECT_EQ(g.lmin_table.size(), 3u);
  EXPECT_EQ(g.crossings.size(), 4u);
  EXPECT_FALSE(g.extrapolation);
  EXPECT_FALSE(g.gaps.empty());
  for (const auto& c : g.crossings) EXPECT_NEAR(c.p_cross, 0.2, 0.005);
  EXPECT_FALSE(g.collapsed.empty());

  const auto json = nlohmann::json::parse(mipt::report_json(report));
  EXPECT_EQ(json["groups"][0]["scheme"], "a");
  EXPECT_TRUE(json["groups"][0]["extrapolation"].is_null());
  EXPECT_EQ(json["groups"][0]["crossing_table"].size(), 4u);
}

TEST(Analysis, WritesOutputs) {
  mipt::AnalysisConfig cfg;
  cfg.bootstrap = 0;
  cfg.crossing_bootstrap = 0;
  cfg.restarts = 1;
  cfg.output_dir = scratch("analysis");
  const auto report = mipt::analyze_results(synthetic_rows(0.2, 1.3, 0.002, 5), cfg);
  const auto paths = mipt::write_analysis(report, cfg);
  ASSERT_EQ(paths.size(), 3u);
  const std::string cross = slurp(cfg.output_dir / "crossings.csv");
  EXPECT_EQ(cross.substr(0, cross.find('\n')), "alpha,scheme,L,p_cross,p_cross_err,I_cross,I_cross_err,multiple_roots");
  EXPECT_EQ(std::count(cross.begin(), cross.end(), '\n'), 5);
  const std::string collapse = slurp(cfg.output_dir / "collapse_alpha4_a.csv");
  EXPECT_EQ(collapse.substr(0, collapse.find('\n')), "x,y,y_err,L");
  fs::remove_all(cfg.output_dir);
}

}  // namespace
