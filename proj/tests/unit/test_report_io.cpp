#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "wigchar/config.hpp"
#include "wigchar/error.hpp"
#include "wigchar/report_io.hpp"

using namespace wigchar;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::size_t columns(const std::string& line) { return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1; }

ExperimentConfig tiny() {
  ExperimentConfig c;
  c.n_values = {40};
  c.trials = 2;
  c.seed = 4;
  c.schedule.steps = 20;
  c.domain.im_levels = 2;
  c.domain.re_points = 2;
  c.domain.flow_steps = 10;
  c.marginal_times = {1.0};
  c.probe_times = {1.0};
  c.write_curves = true;
  return c;
}

}  // namespace

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1e-300), "1e-300");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  const double x = 0.123456789012345678;
  EXPECT_EQ(std::stod(format_double(x)), x);
}

TEST(Csv, LscLayout) {
  const ExperimentConfig c = tiny();
  const LscReport r = run_lsc(c, calibrate(c.density));
  const auto rows = lines(lsc_csv(r, c.seed, 40));
  ASSERT_EQ(rows.size(), 1u + 2u * 4u);
  EXPECT_EQ(rows[0], "n,trial,seed,trial_key,re_z,im_z,error,normalizer,scaled_error,self_energy_ratio");
  for (const auto& row : rows) EXPECT_EQ(columns(row), 10u);
  EXPECT_EQ(rows[1].substr(0, 7), "40,0,4,");
  EXPECT_EQ(lines(lsc_csv(r, c.seed, 99)).size(), 1u);
}

TEST(Outputs, FilesAndSummaries) {
  const ExperimentConfig c = tiny();
  const CalibratedDensity cd = calibrate(c.density);
  const fs::path dir = fs::temp_directory_path() / "wigchar_report_io_test";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const auto lsc_files = write_outputs(run_lsc(c, cd), c, dir.string());
  EXPECT_EQ(lsc_files, (std::vector<std::string>{"lsc-40-4.csv", "lsc-summary.json"}));
  const auto char_files = write_outputs(run_characteristic(c, cd), c, dir.string());
  EXPECT_NE(std::find(char_files.begin(), char_files.end(), "characteristics-40-4.csv"), char_files.end());
  EXPECT_NE(std::find(char_files.begin(), char_files.end(), "contraction-40-4.csv"), char_files.end());
  for (const auto& f : char_files) EXPECT_TRUE(fs::exists(dir / f)) << f;

  const json summary = json::parse(read_text_file((dir / "lsc-summary.json").string()));
  EXPECT_EQ(summary["experiment"], "lsc");
  EXPECT_EQ(summary["config"]["experiments"]["seed"], 4);
  EXPECT_EQ(summary["per_n"].size(), 1u);
  EXPECT_EQ(summary["failures"]["attempted"], 2);
  EXPECT_TRUE(summary.contains("fit_sup_vs_n_eta"));
  EXPECT_TRUE(summary.contains("fit_pooled_vs_n_im_z"));
  fs::remove_all(dir);
}

TEST(Outputs, WriteToMissingDirectoryFails) {
  EXPECT_THROW(write_text_file("/nonexistent-dir/x/y.txt", "x"), Error);
}

TEST(Calibration, OutcomeCapturesErrors) {
  const CalibrationOutcome ok = calibrate_and_verify(DensitySpec::standard_gaussian(), {});
  EXPECT_TRUE(ok.passed());
  const json j = json::parse(calibration_json(ok));
  EXPECT_EQ(j["status"], "pass");
  EXPECT_DOUBLE_EQ(j["a_sup"].get<double>(), 1.0);
  for (const char* key : {"lipschitz_estimate", "mean", "variance", "integral_a_rho", "clamp_count"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }

  std::vector<double> x, y;
  for (int k = -300; k <= 300; ++k) {
    x.push_back(0.1 * k);
    y.push_back(std::exp(-std::abs(0.1 * k)));
  }
  const CalibrationOutcome bad = calibrate_and_verify(DensitySpec::tabulated(x, y), {});
  EXPECT_FALSE(bad.passed());
  EXPECT_EQ(bad.error_kind, "UnboundedA");
  EXPECT_EQ(json::parse(calibration_json(bad))["status"], "fail");
}

TEST(Manifest, ListsExperiments) {
  RunManifest m;
  m.config_path = "c.json";
  m.config_text = "{}";
  m.config_echo = config_to_json(tiny());
  m.version = "test";
  m.started = utc_timestamp();
  m.finished = m.started;
  m.experiments.push_back({"lsc", {"lsc-40-4.csv"}, "ok", 0.0});
  const json j = json::parse(manifest_json(m));
  EXPECT_EQ(j["experiments"].size(), 1u);
  EXPECT_EQ(j["experiments"][0]["experiment"], "lsc");
  EXPECT_EQ(m.started.size(), 20u);
  EXPECT_EQ(m.started.back(), 'Z');
}
