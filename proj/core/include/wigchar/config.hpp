#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wigchar/density.hpp"
#include "wigchar/martingale.hpp"

namespace wigchar {

enum class Experiment { Lsc, Characteristics, Marginal, Entrywise };

std::string to_string(Experiment e);
/// "lsc", "characteristics", "marginal" or "entrywise"; throws InvalidConfig.
Experiment experiment_from_string(const std::string& name);

struct DomainParams {
  double kappa = 0.5;
  double theta = 0.5;
  double w1 = -1.0;
  double w2 = 1.0;
  std::size_t im_levels = 8;
  std::size_t re_points = 9;
  /// Explicit Im z levels; when non-empty they replace the log-spaced levels.
  std::vector<double> im_values;
  /// Fixed RK4 steps on [0, 1] for the characteristic flows.
  std::size_t flow_steps = 100;
};

struct ExperimentConfig {
  DensitySpec density;
  CalibrationGrid grid;
  ScheduleSpec schedule;
  DomainParams domain;

  std::vector<Experiment> experiments = {Experiment::Lsc, Experiment::Characteristics, Experiment::Marginal,
                                         Experiment::Entrywise};
  std::vector<std::size_t> n_values = {125, 250, 500, 1000};
  std::size_t trials = 20;
  std::uint64_t seed = 1;

  /// Checkpoints of the marginal-law experiment.
  std::vector<double> marginal_times = {0.25, 0.5, 1.0};
  /// Extra step counts for the marginal-law convergence study.
  std::vector<std::size_t> marginal_step_counts;
  /// Times at which self-energy ratios are measured along characteristics.
  std::vector<double> probe_times = {0.5, 1.0};
  /// Measure the self-energy ratio at t = 1 in the lsc experiment.
  bool lsc_self_energy = true;
  /// Drive the characteristics experiment with the frozen-semicircle stub.
  bool stub = false;

  std::string output_dir = "out";
  bool write_curves = false;

  /// Throws InvalidConfig if any invariant fails.
  void validate() const;
};

/// Parses the JSON config document. Sections: density, path, domain,
/// experiments, output. Unknown keys are errors. Throws InvalidConfig.
ExperimentConfig parse_config(std::string_view json_text);
/// Reads and parses a file; throws IOFailure or InvalidConfig.
ExperimentConfig load_config(const std::string& path);
/// Canonical JSON rendering of a config (all fields, defaults filled in).
std::string config_to_json(const ExperimentConfig& config);

/// Reads a whole file; throws IOFailure.
std::string read_text_file(const std::string& path);

}  // namespace wigchar
