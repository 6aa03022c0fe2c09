#include "wigchar/report_io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "wigchar/error.hpp"

namespace wigchar {
namespace {

using nlohmann::json;

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      if (!first) out_ += ',';
      out_ += h;
      first = false;
    }
    out_ += '\n';
  }

  Csv& num(double v) { return field(format_double(v)); }
  Csv& num(std::uint64_t v) { return field(std::to_string(v)); }
  Csv& flag(bool v) { return field(v ? "1" : "0"); }
  Csv& end() {
    out_ += '\n';
    fresh_ = true;
    return *this;
  }
  const std::string& str() const { return out_; }

 private:
  Csv& field(const std::string& s) {
    if (!fresh_) out_ += ',';
    out_ += s;
    fresh_ = false;
    return *this;
  }

  std::string out_;
  bool fresh_ = true;
};

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json fit_json(const ScalingFit& f) {
  if (f.points == 0) return nullptr;
  return {{"slope", f.slope},
          {"intercept", f.intercept},
          {"stderr_slope", f.stderr_slope},
          {"stderr_intercept", f.stderr_intercept},
          {"slope_ci95", {f.slope - 1.96 * f.stderr_slope, f.slope + 1.96 * f.stderr_slope}},
          {"points", f.points}};
}

json failures_json(const FailureSummary& f) {
  json list = json::array();
  for (const auto& e : f.failures) {
    list.push_back({{"n", e.n}, {"trial", e.trial}, {"kind", e.kind}, {"message", e.message}});
  }
  return {{"attempted", f.attempted}, {"failed", f.failures.size()}, {"fraction", f.fraction()}, {"list", list}};
}

json base(const std::string& experiment, const ExperimentConfig& config) {
  return {{"experiment", experiment}, {"config", json::parse(config_to_json(config))}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string csv_name(const std::string& experiment, std::size_t n, std::uint64_t seed) {
  return experiment + "-" + std::to_string(n) + "-" + std::to_string(seed) + ".csv";
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IOFailure, "cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw Error(ErrorKind::IOFailure, "cannot write '" + path + "'");
}

// ---------------------------------------------------------------------------

std::string lsc_csv(const LscReport& report, std::uint64_t seed, std::size_t n) {
  Csv csv({"n", "trial", "seed", "trial_key", "re_z", "im_z", "error", "normalizer", "scaled_error",
           "self_energy_ratio"});
  for (const auto& o : report.observations) {
    if (o.n != n) continue;
    csv.num(std::uint64_t{o.n}).num(std::uint64_t{o.trial}).num(seed).num(trial_key(o.n, o.trial));
    csv.num(o.z.real()).num(o.z.imag()).num(o.error).num(o.normalizer).num(o.error / o.normalizer);
    csv.num(o.self_energy_ratio).end();
  }
  return csv.str();
}

std::string entrywise_csv(const EntrywiseReport& report, std::uint64_t seed, std::size_t n) {
  Csv csv({"n", "trial", "seed", "trial_key", "re_z", "im_z", "diag_err", "offdiag", "schur", "schur_ratio",
           "trace_err"});
  for (const auto& o : report.observations) {
    if (o.n != n) continue;
    const auto& p = o.point;
    csv.num(std::uint64_t{o.n}).num(std::uint64_t{o.trial}).num(seed).num(trial_key(o.n, o.trial));
    csv.num(p.z.real()).num(p.z.imag()).num(p.diag_err).num(p.offdiag).num(p.schur).num(p.schur_ratio);
    csv.num(p.trace_err).end();
  }
  return csv.str();
}

std::string marginal_csv(const MarginalReport& report, std::size_t n) {
  Csv csv({"steps", "n", "t", "pooled", "ks", "p_value", "clamp_count"});
  for (const auto& r : report.rows) {
    if (r.n != n) continue;
    csv.num(std::uint64_t{r.steps}).num(std::uint64_t{r.n}).num(r.t).num(std::uint64_t{r.pooled});
    csv.num(r.ks).num(r.p_value).num(std::uint64_t{r.clamp_count}).end();
  }
  return csv.str();
}

std::string characteristic_csv(const CharacteristicReport& report, std::uint64_t seed, std::size_t n) {
  Csv csv({"n", "trial", "seed", "trial_key", "re_z", "im_z", "re_w", "im_w", "map_residual", "roundtrip", "in_d0",
           "outside_delta", "drift_sup", "drift_ratio", "tau", "tau_prime", "stopped", "self_energy_ratio"});
  for (const auto& o : report.observations) {
    if (o.n != n) continue;
    csv.num(std::uint64_t{o.n}).num(std::uint64_t{o.trial}).num(seed).num(trial_key(o.n, o.trial));
    csv.num(o.z.real()).num(o.z.imag()).num(o.w.real()).num(o.w.imag()).num(o.map_residual).num(o.roundtrip);
    csv.flag(o.in_d0).flag(o.outside_delta).num(o.drift_sup).num(o.drift_ratio).num(o.tau).num(o.tau_prime);
    csv.flag(o.stopped).num(o.self_energy_ratio).end();
  }
  return csv.str();
}

std::string contraction_csv(const CharacteristicReport& report, std::size_t n) {
  Csv csv({"n", "trial", "first", "second", "worst_ratio"});
  for (const auto& c : report.contractions) {
    if (c.n != n) continue;
    csv.num(std::uint64_t{c.n}).num(std::uint64_t{c.trial}).num(std::uint64_t{c.first});
    csv.num(std::uint64_t{c.second}).num(c.worst_ratio).end();
  }
  return csv.str();
}

std::string curves_csv(const CharacteristicReport& report, std::size_t n) {
  Csv csv({"n", "trial", "z_index", "t", "re_xi", "im_xi", "re_trace", "im_trace", "stopped"});
  for (const auto& r : report.curves) {
    if (r.n != n) continue;
    for (std::size_t k = 0; k < r.curve.size(); ++k) {
      csv.num(std::uint64_t{r.n}).num(std::uint64_t{r.trial}).num(std::uint64_t{r.z_index}).num(r.curve.t[k]);
      csv.num(r.curve.xi[k].real()).num(r.curve.xi[k].imag()).num(r.curve.trace[k].real());
      csv.num(r.curve.trace[k].imag()).flag(r.curve.stopped[k] != 0).end();
    }
  }
  return csv.str();
}

// ---------------------------------------------------------------------------

std::string summary_json(const LscReport& report, const ExperimentConfig& config) {
  json j = base("lsc", config);
  json per = json::array();
  for (const auto& p : report.per_n) {
    per.push_back({{"n", p.n},
                   {"eta", p.eta},
                   {"n_eta", p.n_eta},
                   {"trials", p.trials_ok},
                   {"median_sup_error", number(p.median_sup)},
                   {"q05_sup_error", number(p.q05_sup)},
                   {"q95_sup_error", number(p.q95_sup)},
                   {"median_error_top_im", number(p.median_error_im1)},
                   {"normalizer", 1.0 / std::sqrt(p.n_eta)},
                   {"self_energy_q95", number(p.self_energy_q95)},
                   {"epsilon_hat", number(p.epsilon_hat)},
                   {"epsilon_stderr", number(p.epsilon_stderr)}});
  }
  j["per_n"] = per;
  j["fit_sup_vs_n_eta"] = fit_json(report.fit);
  j["fit_pooled_vs_n_im_z"] = fit_json(report.pooled_fit);
  j["failures"] = failures_json(report.failures);
  return dump(j);
}

std::string summary_json(const EntrywiseReport& report, const ExperimentConfig& config) {
  json j = base("entrywise", config);
  json per = json::array();
  for (const auto& p : report.per_n) {
    per.push_back({{"n", p.n},
                   {"eta", p.eta},
                   {"diag_fit", fit_json(p.diag_fit)},
                   {"offdiag_fit", fit_json(p.offdiag_fit)},
                   {"diag_fit_over_msc2", fit_json(p.diag_fit_msc)},
                   {"offdiag_fit_over_msc2", fit_json(p.offdiag_fit_msc)},
                   {"offdiag_scaled_q95", number(p.offdiag_scaled_q95)},
                   {"schur_ratio_q95", number(p.schur_ratio_q95)},
                   {"diag_to_trace_median", number(p.diag_to_trace_median)}});
  }
  j["per_n"] = per;
  j["failures"] = failures_json(report.failures);
  return dump(j);
}

std::string summary_json(const MarginalReport& report, const ExperimentConfig& config) {
  json j = base("marginal", config);
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"steps", r.steps},
                    {"n", r.n},
                    {"t", r.t},
                    {"pooled", r.pooled},
                    {"ks", r.ks},
                    {"p_value", r.p_value},
                    {"clamp_count", r.clamp_count}});
  }
  j["rows"] = rows;
  j["failures"] = failures_json(report.failures);
  return dump(j);
}

std::string summary_json(const CharacteristicReport& report, const ExperimentConfig& config) {
  json j = base("characteristics", config);
  json per = json::array();
  for (const auto& p : report.per_n) {
    per.push_back({{"n", p.n},
                   {"eta", p.eta},
                   {"curves", p.curves},
                   {"drift_ratio_q95", number(p.drift_ratio_q95)},
                   {"drift_ratio_max", number(p.drift_ratio_max)},
                   {"map_ok_fraction", number(p.map_ok_fraction)},
                   {"roundtrip_ok_fraction", number(p.roundtrip_ok_fraction)},
                   {"roundtrip_max", number(p.roundtrip_max)},
                   {"in_d0", p.in_d0},
                   {"outside_delta", p.outside_delta},
                   {"contraction_pairs", p.pairs},
                   {"contraction_worst", number(p.contraction_worst)},
                   {"contraction_violations", p.contraction_violations},
                   {"self_energy_q95", number(p.self_energy_q95)},
                   {"epsilon_hat", number(p.epsilon_hat)}});
  }
  j["per_n"] = per;
  j["failures"] = failures_json(report.failures);
  return dump(j);
}

// ---------------------------------------------------------------------------

std::vector<std::string> write_outputs(const LscReport& report, const ExperimentConfig& config,
                                       const std::string& dir) {
  std::vector<std::string> files;
  for (std::size_t n : config.n_values) {
    files.push_back(csv_name("lsc", n, config.seed));
    write_text_file(join(dir, files.back()), lsc_csv(report, config.seed, n));
  }
  files.push_back("lsc-summary.json");
  write_text_file(join(dir, files.back()), summary_json(report, config));
  return files;
}

std::vector<std::string> write_outputs(const EntrywiseReport& report, const ExperimentConfig& config,
                                       const std::string& dir) {
  std::vector<std::string> files;
  for (std::size_t n : config.n_values) {
    files.push_back(csv_name("entrywise", n, config.seed));
    write_text_file(join(dir, files.back()), entrywise_csv(report, config.seed, n));
  }
  files.push_back("entrywise-summary.json");
  write_text_file(join(dir, files.back()), summary_json(report, config));
  return files;
}

std::vector<std::string> write_outputs(const MarginalReport& report, const ExperimentConfig& config,
                                       const std::string& dir) {
  std::vector<std::string> files;
  for (std::size_t n : config.n_values) {
    files.push_back(csv_name("marginal", n, config.seed));
    write_text_file(join(dir, files.back()), marginal_csv(report, n));
  }
  files.push_back("marginal-summary.json");
  write_text_file(join(dir, files.back()), summary_json(report, config));
  return files;
}

std::vector<std::string> write_outputs(const CharacteristicReport& report, const ExperimentConfig& config,
                                       const std::string& dir) {
  std::vector<std::string> files;
  for (std::size_t n : config.n_values) {
    files.push_back(csv_name("characteristics", n, config.seed));
    write_text_file(join(dir, files.back()), characteristic_csv(report, config.seed, n));
    files.push_back(csv_name("contraction", n, config.seed));
    write_text_file(join(dir, files.back()), contraction_csv(report, n));
    if (config.write_curves) {
      files.push_back(csv_name("curves", n, config.seed));
      write_text_file(join(dir, files.back()), curves_csv(report, n));
    }
  }
  files.push_back("characteristics-summary.json");
  write_text_file(join(dir, files.back()), summary_json(report, config));
  return files;
}

// ---------------------------------------------------------------------------

CalibrationOutcome calibrate_and_verify(const DensitySpec& spec, const CalibrationGrid& grid) {
  CalibrationOutcome out;
  out.density_id = spec.id();
  try {
    const CalibratedDensity cd = calibrate(spec, grid);
    out.calibrated = true;
    out.report = verify_assumption(cd);
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::NonPositiveDensity:
      case ErrorKind::UnboundedA:
      case ErrorKind::MomentFailure:
      case ErrorKind::QuadratureFailure:
        out.error_kind = std::string(to_string(e.kind()));
        out.error_message = e.what();
        break;
      default:
        throw;
    }
  }
  return out;
}

std::string calibration_json(const CalibrationOutcome& o) {
  json j;
  j["density"] = o.density_id;
  j["status"] = o.passed() ? "pass" : "fail";
  if (o.calibrated) {
    const AssumptionReport& r = o.report;
    j["a_sup"] = r.a_sup;
    j["lipschitz_estimate"] = r.lipschitz_estimate;
    j["mean"] = r.mean;
    j["variance"] = r.variance;
    j["integral_a_rho"] = r.integral_a_rho;
    j["mass"] = r.mass;
    j["clamp_count"] = r.clamp_count;
    j["checks"] = {{"a_bounded", r.a_bounded},
                   {"a_lipschitz", r.a_lipschitz},
                   {"moments_ok", r.moments_ok},
                   {"integral_ok", r.integral_ok}};
    j["error"] = nullptr;
  } else {
    j["error"] = {{"kind", o.error_kind}, {"message", o.error_message}};
  }
  return dump(j);
}

std::string manifest_json(const RunManifest& m) {
  json j;
  j["version"] = m.version;
  j["config_path"] = m.config_path;
  j["config_text"] = m.config_text;
  j["config"] = m.config_echo.empty() ? json(nullptr) : json::parse(m.config_echo);
  j["seed"] = m.seed;
  j["threads"] = m.threads;
  j["started"] = m.started;
  j["finished"] = m.finished;
  json list = json::array();
  for (const auto& e : m.experiments) {
    list.push_back({{"experiment", e.experiment},
                    {"files", e.files},
                    {"status", e.status},
                    {"failure_fraction", e.failure_fraction}});
  }
  j["experiments"] = list;
  return dump(j);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace wigchar
