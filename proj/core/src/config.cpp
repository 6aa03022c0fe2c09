#include "wigchar/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wigchar/error.hpp"

namespace wigchar {
namespace {

using nlohmann::json;

void only_keys(const json& obj, const std::string& section, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw Error(ErrorKind::InvalidConfig, "'" + section + "' must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!ok.count(it.key())) throw Error(ErrorKind::InvalidConfig, "unknown key '" + section + "." + it.key() + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, const std::string& section, T& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
      if (!it->is_number_unsigned() && !(it->is_number_integer() && it->template get<long long>() >= 0)) {
        throw Error(ErrorKind::InvalidConfig, "'" + section + "." + key + "' must be a non-negative integer");
      }
    }
    out = it->template get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, "'" + section + "." + key + "': " + e.what());
  }
}

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::Lsc: return "lsc";
    case Experiment::Characteristics: return "characteristics";
    case Experiment::Marginal: return "marginal";
    case Experiment::Entrywise: return "entrywise";
  }
  return "unknown";
}

Experiment experiment_from_string(const std::string& name) {
  if (name == "lsc") return Experiment::Lsc;
  if (name == "characteristics") return Experiment::Characteristics;
  if (name == "marginal") return Experiment::Marginal;
  if (name == "entrywise") return Experiment::Entrywise;
  throw Error(ErrorKind::InvalidConfig, "unknown experiment '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (n_values.empty()) throw Error(ErrorKind::InvalidConfig, "experiments.n_values is empty");
  for (std::size_t n : n_values) {
    if (n < 32) throw Error(ErrorKind::InvalidConfig, "N values must be >= 32 (got " + std::to_string(n) + ")");
  }
  if (trials < 1) throw Error(ErrorKind::InvalidConfig, "experiments.trials must be >= 1");
  if (!(domain.theta > 0.0 && domain.theta < 1.0)) throw Error(ErrorKind::InvalidConfig, "domain.theta must lie in (0, 1)");
  if (!(domain.kappa > 0.0) || domain.w1 > domain.w2 || domain.w1 < -2.0 + domain.kappa ||
      domain.w2 > 2.0 - domain.kappa) {
    throw Error(ErrorKind::InvalidConfig, "domain.w must lie within [-2 + kappa, 2 - kappa]");
  }
  if (domain.im_levels < 1 || domain.re_points < 1) throw Error(ErrorKind::InvalidConfig, "z-grid needs >= 1 point per axis");
  for (double im : domain.im_values) {
    if (!(im > 0.0 && im <= 1.0)) throw Error(ErrorKind::InvalidConfig, "domain.im_values must lie in (0, 1]");
  }
  if (domain.flow_steps < 1) throw Error(ErrorKind::InvalidConfig, "domain.flow_steps must be >= 1");
  if (2 * domain.flow_steps > 0 && 1.0 / (2.0 * static_cast<double>(domain.flow_steps)) < schedule.t_init) {
    throw Error(ErrorKind::InvalidConfig, "flow snapshot spacing 1/(2 flow_steps) must not undercut path.t_init");
  }
  if (!(schedule.t_init > 0.0 && schedule.t_init < 1.0)) throw Error(ErrorKind::InvalidConfig, "path.t_init must lie in (0, 1)");
  if (schedule.steps < 2) throw Error(ErrorKind::InvalidConfig, "path.steps must be >= 2");
  if (!(schedule.geometric_fraction >= 0.0 && schedule.geometric_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "path.geometric_fraction must lie in [0, 1)");
  }
  for (std::size_t s : marginal_step_counts) {
    if (s < 2) throw Error(ErrorKind::InvalidConfig, "experiments.marginal_step_counts entries must be >= 2");
  }
  for (double t : marginal_times) {
    if (!(t >= schedule.t_init && t <= 1.0)) throw Error(ErrorKind::InvalidConfig, "marginal_times must lie in [t_init, 1]");
  }
  for (double t : probe_times) {
    if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorKind::InvalidConfig, "probe_times must lie in (0, 1]");
  }
  if (experiments.empty()) throw Error(ErrorKind::InvalidConfig, "experiments.run is empty");
  if (output_dir.empty()) throw Error(ErrorKind::InvalidConfig, "output.dir is empty");
  if (grid.resolution < 101) throw Error(ErrorKind::InvalidConfig, "density.resolution must be >= 101");
  if (!(grid.h_max > 1.0)) throw Error(ErrorKind::InvalidConfig, "density.h_max must exceed 1");
}

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("malformed JSON: ") + e.what());
  }
  only_keys(doc, "config", {"density", "path", "domain", "experiments", "output"});
  if (!doc.contains("density")) throw Error(ErrorKind::InvalidConfig, "missing 'density' section");

  ExperimentConfig c;
  {
    const json& d = doc["density"];
    only_keys(d, "density", {"kind", "weights", "sigmas", "abscissae", "values", "resolution", "h_max"});
    std::string kind = "standard-gaussian";
    read(d, "kind", "density", kind);
    c.density.kind = density_kind_from_string(kind);
    read(d, "weights", "density", c.density.weights);
    read(d, "sigmas", "density", c.density.sigmas);
    read(d, "abscissae", "density", c.density.abscissae);
    read(d, "values", "density", c.density.values);
    read(d, "resolution", "density", c.grid.resolution);
    read(d, "h_max", "density", c.grid.h_max);
    if (c.density.kind == DensityKind::StandardGaussian) {
      c.density.weights = {1.0};
      c.density.sigmas = {1.0};
    }
  }
  if (doc.contains("path")) {
    const json& p = doc["path"];
    only_keys(p, "path", {"t_init", "steps", "geometric_fraction"});
    read(p, "t_init", "path", c.schedule.t_init);
    read(p, "steps", "path", c.schedule.steps);
    read(p, "geometric_fraction", "path", c.schedule.geometric_fraction);
  }
  if (doc.contains("domain")) {
    const json& d = doc["domain"];
    only_keys(d, "domain", {"kappa", "theta", "w", "im_levels", "re_points", "im_values", "flow_steps"});
    read(d, "kappa", "domain", c.domain.kappa);
    read(d, "theta", "domain", c.domain.theta);
    if (d.contains("w")) {
      std::vector<double> w;
      read(d, "w", "domain", w);
      if (w.size() != 2) throw Error(ErrorKind::InvalidConfig, "domain.w must be [W1, W2]");
      c.domain.w1 = w[0];
      c.domain.w2 = w[1];
    }
    read(d, "im_levels", "domain", c.domain.im_levels);
    read(d, "re_points", "domain", c.domain.re_points);
    read(d, "im_values", "domain", c.domain.im_values);
    read(d, "flow_steps", "domain", c.domain.flow_steps);
  }
  if (doc.contains("experiments")) {
    const json& e = doc["experiments"];
    only_keys(e, "experiments",
              {"run", "n_values", "trials", "seed", "marginal_times", "marginal_step_counts", "probe_times",
               "lsc_self_energy", "stub"});
    if (e.contains("run")) {
      std::vector<std::string> names;
      read(e, "run", "experiments", names);
      c.experiments.clear();
      for (const auto& n : names) {
        if (n == "all") {
          c.experiments = {Experiment::Lsc, Experiment::Characteristics, Experiment::Marginal, Experiment::Entrywise};
          break;
        }
        c.experiments.push_back(experiment_from_string(n));
      }
    }
    read(e, "n_values", "experiments", c.n_values);
    read(e, "trials", "experiments", c.trials);
    read(e, "seed", "experiments", c.seed);
    read(e, "marginal_times", "experiments", c.marginal_times);
    read(e, "marginal_step_counts", "experiments", c.marginal_step_counts);
    read(e, "probe_times", "experiments", c.probe_times);
    read(e, "lsc_self_energy", "experiments", c.lsc_self_energy);
    read(e, "stub", "experiments", c.stub);
  }
  if (doc.contains("output")) {
    const json& o = doc["output"];
    only_keys(o, "output", {"dir", "curves"});
    read(o, "dir", "output", c.output_dir);
    read(o, "curves", "output", c.write_curves);
  }
  c.validate();
  return c;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IOFailure, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::IOFailure, "cannot read '" + path + "'");
  return os.str();
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

std::string config_to_json(const ExperimentConfig& c) {
  json doc;
  json d;
  d["kind"] = c.density.id();
  if (c.density.kind == DensityKind::GaussianMixture) {
    d["weights"] = c.density.weights;
    d["sigmas"] = c.density.sigmas;
  } else if (c.density.kind == DensityKind::Tabulated) {
    d["abscissae"] = c.density.abscissae;
    d["values"] = c.density.values;
  }
  d["resolution"] = c.grid.resolution;
  d["h_max"] = c.grid.h_max;
  doc["density"] = d;
  doc["path"] = {{"t_init", c.schedule.t_init}, {"steps", c.schedule.steps},
                 {"geometric_fraction", c.schedule.geometric_fraction}};
  doc["domain"] = {{"kappa", c.domain.kappa},         {"theta", c.domain.theta},
                   {"w", {c.domain.w1, c.domain.w2}}, {"im_levels", c.domain.im_levels},
                   {"re_points", c.domain.re_points}, {"im_values", c.domain.im_values},
                   {"flow_steps", c.domain.flow_steps}};
  std::vector<std::string> run;
  for (Experiment e : c.experiments) run.push_back(to_string(e));
  doc["experiments"] = {{"run", run},
                        {"n_values", c.n_values},
                        {"trials", c.trials},
                        {"seed", c.seed},
                        {"marginal_times", c.marginal_times},
                        {"marginal_step_counts", c.marginal_step_counts},
                        {"probe_times", c.probe_times},
                        {"lsc_self_energy", c.lsc_self_energy},
                        {"stub", c.stub}};
  doc["output"] = {{"dir", c.output_dir}, {"curves", c.write_curves}};
  return doc.dump(2);
}

}  // namespace wigchar
