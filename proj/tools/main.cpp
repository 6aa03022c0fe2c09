// wigchar command-line front end. Exit codes: 0 success, 1 config/IO,
// 2 assumption failure, 3 excess trial failures, 4 stub verification failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wigchar/config.hpp"
#include "wigchar/density.hpp"
#include "wigchar/error.hpp"
#include "wigchar/harness.hpp"
#include "wigchar/martingale.hpp"
#include "wigchar/report_io.hpp"

namespace fs = std::filesystem;
using namespace wigchar;

namespace {

enum Exit : int { kOk = 0, kConfig = 1, kAssumption = 2, kTrials = 3, kStub = 4 };

constexpr double kMaxFailureFraction = 0.10;

void log(const std::string& msg) { std::cerr << "[wigchar] " << msg << std::endl; }

/// Creates `dir`; refuses a non-empty existing directory unless `overwrite`.
void prepare_output_dir(const std::string& dir, bool overwrite) {
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir, ec)) throw Error(ErrorKind::IOFailure, "'" + dir + "' exists and is not a directory");
    if (!fs::is_empty(dir, ec) && !overwrite) {
      throw Error(ErrorKind::IOFailure, "output directory '" + dir + "' is not empty (pass --overwrite)");
    }
    return;
  }
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IOFailure, "cannot create '" + dir + "': " + ec.message());
}

struct RunArgs {
  std::string config;
  std::string experiment;
  std::string out;
  std::size_t threads = 0;
  bool overwrite = false;
  std::optional<std::uint64_t> seed;
};

int cmd_calibrate(const std::string& config_path, const std::string& out_file) {
  const ExperimentConfig config = load_config(config_path);
  const CalibrationOutcome outcome = calibrate_and_verify(config.density, config.grid);
  const std::string report = calibration_json(outcome);
  if (!out_file.empty()) {
    const fs::path parent = fs::path(out_file).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    write_text_file(out_file, report);
  }
  std::cout << report;
  if (!outcome.calibrated) {
    log("assumption failure: " + outcome.error_message);
    return kAssumption;
  }
  if (!outcome.report.passed) {
    log("assumption checks failed (see report)");
    return kAssumption;
  }
  return kOk;
}

int cmd_run(const RunArgs& args) {
  const std::string started = utc_timestamp();
  const std::string config_text = read_text_file(args.config);
  ExperimentConfig config = parse_config(config_text);
  if (args.seed) config.seed = *args.seed;
  if (!args.out.empty()) config.output_dir = args.out;
  if (!args.experiment.empty()) {
    if (args.experiment == "all") {
      config.experiments = {Experiment::Lsc, Experiment::Characteristics, Experiment::Marginal, Experiment::Entrywise};
    } else {
      config.experiments = {experiment_from_string(args.experiment)};
    }
  }
  config.validate();

  const CalibrationOutcome outcome = calibrate_and_verify(config.density, config.grid);
  if (!outcome.passed()) {
    log("density fails the assumption: " + (outcome.calibrated ? std::string("see calibrate") : outcome.error_kind));
    return kAssumption;
  }
  const CalibratedDensity density = calibrate(config.density, config.grid);
  prepare_output_dir(config.output_dir, args.overwrite);

  RunOptions options;
  options.threads = args.threads;
  RunManifest manifest;
  manifest.config_path = args.config;
  manifest.config_text = config_text;
  manifest.config_echo = config_to_json(config);
  manifest.version = WIGCHAR_VERSION;
  manifest.started = started;
  manifest.seed = config.seed;
  manifest.threads = args.threads;

  bool excess = false;
  for (Experiment e : config.experiments) {
    const std::string name = to_string(e);
    log("running " + name + " (seed " + std::to_string(config.seed) + ")");
    ManifestEntry entry;
    entry.experiment = name;
    FailureSummary failures;
    switch (e) {
      case Experiment::Lsc: {
        const LscReport r = run_lsc(config, density, options);
        entry.files = write_outputs(r, config, config.output_dir);
        failures = r.failures;
        if (r.fit.points > 0) log("lsc slope " + format_double(r.fit.slope) + " +- " + format_double(r.fit.stderr_slope));
        break;
      }
      case Experiment::Characteristics: {
        const CharacteristicReport r = run_characteristic(config, density, options);
        entry.files = write_outputs(r, config, config.output_dir);
        failures = r.failures;
        break;
      }
      case Experiment::Marginal: {
        const MarginalReport r = run_marginal(config, density, options);
        entry.files = write_outputs(r, config, config.output_dir);
        failures = r.failures;
        break;
      }
      case Experiment::Entrywise: {
        const EntrywiseReport r = run_entrywise_experiment(config, density, options);
        entry.files = write_outputs(r, config, config.output_dir);
        failures = r.failures;
        break;
      }
    }
    entry.failure_fraction = failures.fraction();
    entry.status = entry.failure_fraction > kMaxFailureFraction ? "excess-failures" : "ok";
    if (!failures.failures.empty()) {
      log(name + ": " + std::to_string(failures.failures.size()) + " of " + std::to_string(failures.attempted) +
          " trials failed");
    }
    excess = excess || entry.failure_fraction > kMaxFailureFraction;
    manifest.experiments.push_back(std::move(entry));
  }
  manifest.finished = utc_timestamp();
  write_text_file((fs::path(config.output_dir) / "manifest.json").string(), manifest_json(manifest));
  log("wrote " + (fs::path(config.output_dir) / "manifest.json").string());
  return excess ? kTrials : kOk;
}

int cmd_stub_verify(std::size_t steps, bool flip) {
  StubVerifyOptions options;
  options.steps = steps;
  options.flip_msc_branch = flip;
  bool ok = true;
  for (const StubCheck& c : stub_verify(options)) {
    std::printf("%-4s %-52s %-12s (tolerance %s)\n", c.passed ? "ok" : "FAIL", c.name.c_str(),
                format_double(c.value).c_str(), format_double(c.tolerance).c_str());
    ok = ok && c.passed;
  }
  if (!ok) {
    std::printf("stub verification failed\n");
    return kStub;
  }
  return kOk;
}

int cmd_evolve(const std::string& config_path, std::size_t n, std::size_t trial, const std::string& out_file) {
  const ExperimentConfig config = load_config(config_path);
  const CalibrationOutcome outcome = calibrate_and_verify(config.density, config.grid);
  if (!outcome.passed()) return kAssumption;
  const CalibratedDensity density = calibrate(config.density, config.grid);
  PathConfig pc;
  pc.n = n;
  pc.schedule = merge_times(make_schedule(config.schedule), config.marginal_times);
  pc.checkpoints = config.marginal_times;
  pc.seed = config.seed;
  pc.trial = trial_key(n, trial);
  const MatrixPath path = evolve(density, pc);
  PathDumpHeader header;
  header.n = static_cast<std::uint32_t>(n);
  header.seed = pc.seed;
  header.trial = pc.trial;
  header.density_id = density.id();
  header.schedule = pc.schedule;
  write_path_dump(out_file, header, path);
  log("wrote " + std::to_string(path.checkpoints.size()) + " checkpoints to " + out_file);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Characteristics-method local law experiments for Wigner-type matrix martingales"};
  app.require_subcommand(1);
  app.set_version_flag("--version", WIGCHAR_VERSION);

  std::string config_path;
  std::string out;

  auto* calibrate_cmd = app.add_subcommand("calibrate", "Calibrate the configured density and check the assumption");
  std::string report_file;
  calibrate_cmd->add_option("--config", config_path, "JSON config file")->required();
  calibrate_cmd->add_option("--report", report_file, "Also write the JSON report to this file");

  auto* run_cmd = app.add_subcommand("run", "Run experiments and write CSV/JSON reports plus manifest.json");
  RunArgs run_args;
  std::uint64_t seed = 0;
  run_cmd->add_option("--config", run_args.config, "JSON config file")->required();
  run_cmd->add_option("--experiment", run_args.experiment, "lsc, characteristics, marginal, entrywise or all")
      ->check(CLI::IsMember({"lsc", "characteristics", "marginal", "entrywise", "all"}));
  run_cmd->add_option("--out", run_args.out, "Output directory (overrides output.dir)");
  run_cmd->add_option("--threads", run_args.threads, "Worker threads (0 = available parallelism)");
  run_cmd->add_flag("--overwrite", run_args.overwrite, "Allow writing into a non-empty output directory");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Base seed (overrides experiments.seed)");

  auto* stub_cmd = app.add_subcommand("stub-verify", "Closed-form checks of the flows under the frozen semicircle");
  std::size_t stub_steps = 200;
  bool flip = false;
  stub_cmd->add_option("--steps", stub_steps, "RK4 steps on [0, 1]")->check(CLI::PositiveNumber);
  stub_cmd->add_flag("--flip-msc-branch", flip, "Fault injection: use the wrong root of m^2 + z m + 1 = 0");

  auto* evolve_cmd = app.add_subcommand("evolve", "Evolve one path and write a binary checkpoint dump");
  std::size_t n = 0;
  std::size_t trial = 0;
  std::string dump_file;
  evolve_cmd->add_option("--config", config_path, "JSON config file")->required();
  evolve_cmd->add_option("--n", n, "Matrix dimension")->required()->check(CLI::Range(1, 1 << 16));
  evolve_cmd->add_option("--trial", trial, "Trial index");
  evolve_cmd->add_option("--out", dump_file, "Dump file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kConfig;
  }

  try {
    if (*calibrate_cmd) return cmd_calibrate(config_path, report_file);
    if (*run_cmd) {
      if (*seed_opt) run_args.seed = seed;
      return cmd_run(run_args);
    }
    if (*stub_cmd) return cmd_stub_verify(stub_steps, flip);
    if (*evolve_cmd) return cmd_evolve(config_path, n, trial, dump_file);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::NonPositiveDensity:
      case ErrorKind::UnboundedA:
      case ErrorKind::MomentFailure:
        return kAssumption;
      default:
        return kConfig;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
  return kConfig;
}
