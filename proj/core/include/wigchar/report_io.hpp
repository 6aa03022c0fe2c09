#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wigchar/config.hpp"
#include "wigchar/density.hpp"
#include "wigchar/harness.hpp"

namespace wigchar {

/// Shortest round-trip decimal form; "nan", "inf" and "-inf" for non-finite values.
std::string format_double(double v);

/// Writes (truncating) a whole file; throws IOFailure.
void write_text_file(const std::string& path, const std::string& content);

// CSV tables, one per N. Column layouts are documented in docs/outputs.md.
std::string lsc_csv(const LscReport& report, std::uint64_t seed, std::size_t n);
std::string entrywise_csv(const EntrywiseReport& report, std::uint64_t seed, std::size_t n);
std::string marginal_csv(const MarginalReport& report, std::size_t n);
std::string characteristic_csv(const CharacteristicReport& report, std::uint64_t seed, std::size_t n);
std::string contraction_csv(const CharacteristicReport& report, std::size_t n);
std::string curves_csv(const CharacteristicReport& report, std::size_t n);

// JSON summaries: {experiment, config, per_n, fits, failures}.
std::string summary_json(const LscReport& report, const ExperimentConfig& config);
std::string summary_json(const EntrywiseReport& report, const ExperimentConfig& config);
std::string summary_json(const MarginalReport& report, const ExperimentConfig& config);
std::string summary_json(const CharacteristicReport& report, const ExperimentConfig& config);

/// Writes {experiment}-{N}-{seed}.csv for every N plus {experiment}-summary.json
/// into `dir`; returns the file names written (relative to `dir`).
std::vector<std::string> write_outputs(const LscReport& report, const ExperimentConfig& config, const std::string& dir);
std::vector<std::string> write_outputs(const EntrywiseReport& report, const ExperimentConfig& config,
                                       const std::string& dir);
std::vector<std::string> write_outputs(const MarginalReport& report, const ExperimentConfig& config,
                                       const std::string& dir);
std::vector<std::string> write_outputs(const CharacteristicReport& report, const ExperimentConfig& config,
                                       const std::string& dir);

/// Calibration outcome. `error_kind` is empty when calibration succeeded.
struct CalibrationOutcome {
  std::string density_id;
  AssumptionReport report;
  bool calibrated = false;
  std::string error_kind;
  std::string error_message;

  bool passed() const { return calibrated && report.passed; }
};

/// Calibrates and verifies the assumption, capturing density errors instead of throwing.
CalibrationOutcome calibrate_and_verify(const DensitySpec& spec, const CalibrationGrid& grid);
std::string calibration_json(const CalibrationOutcome& outcome);

struct ManifestEntry {
  std::string experiment;
  std::vector<std::string> files;
  std::string status;  ///< "ok", "excess-failures" or "error"
  double failure_fraction = 0.0;
};

struct RunManifest {
  std::string config_path;
  std::string config_text;  ///< the config file bytes, verbatim
  std::string config_echo;  ///< canonical parsed form
  std::string version;
  std::string started;  ///< ISO-8601 UTC
  std::string finished;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::vector<ManifestEntry> experiments;
};

std::string manifest_json(const RunManifest& manifest);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace wigchar
