#include <gtest/gtest.h>

#include <string>

#include "wigchar/config.hpp"
#include "wigchar/error.hpp"

using namespace wigchar;

namespace {

ErrorKind kind_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::IOFailure;  // sentinel: accepted
}

}  // namespace

TEST(Config, MinimalDocumentGetsDefaults) {
  const ExperimentConfig c = parse_config(R"({"density": {"kind": "standard-gaussian"}})");
  EXPECT_EQ(c.density.kind, DensityKind::StandardGaussian);
  EXPECT_EQ(c.n_values, (std::vector<std::size_t>{125, 250, 500, 1000}));
  EXPECT_EQ(c.trials, 20u);
  EXPECT_EQ(c.experiments.size(), 4u);
  EXPECT_DOUBLE_EQ(c.schedule.t_init, 1e-3);
  EXPECT_EQ(c.output_dir, "out");
}

TEST(Config, FullDocument) {
  const ExperimentConfig c = parse_config(R"({
    "density": {"kind": "gaussian-mixture", "weights": [0.5, 0.5], "sigmas": [0.7, 1.2], "resolution": 4001},
    "path": {"t_init": 0.002, "steps": 300, "geometric_fraction": 0.2},
    "domain": {"kappa": 0.4, "theta": 0.6, "w": [-1.5, 1.2], "im_levels": 3, "re_points": 4,
               "im_values": [0.1, 0.5], "flow_steps": 40},
    "experiments": {"run": ["lsc", "marginal"], "n_values": [64, 128], "trials": 3, "seed": 99,
                    "marginal_times": [0.5, 1.0], "marginal_step_counts": [50], "probe_times": [1.0],
                    "lsc_self_energy": false, "stub": true},
    "output": {"dir": "results", "curves": true}
  })");
  EXPECT_EQ(c.density.kind, DensityKind::GaussianMixture);
  EXPECT_EQ(c.density.sigmas, (std::vector<double>{0.7, 1.2}));
  EXPECT_EQ(c.grid.resolution, 4001u);
  EXPECT_EQ(c.schedule.steps, 300u);
  EXPECT_DOUBLE_EQ(c.domain.w1, -1.5);
  EXPECT_DOUBLE_EQ(c.domain.w2, 1.2);
  EXPECT_EQ(c.domain.im_values, (std::vector<double>{0.1, 0.5}));
  EXPECT_EQ(c.experiments, (std::vector<Experiment>{Experiment::Lsc, Experiment::Marginal}));
  EXPECT_EQ(c.seed, 99u);
  EXPECT_FALSE(c.lsc_self_energy);
  EXPECT_TRUE(c.stub);
  EXPECT_EQ(c.output_dir, "results");
  EXPECT_TRUE(c.write_curves);
}

TEST(Config, RoundTripThroughCanonicalJson) {
  const ExperimentConfig a = parse_config(R"({
    "density": {"kind": "tabulated", "abscissae": [-3, 0, 3], "values": [0.01, 1, 0.01]},
    "experiments": {"run": ["all"], "n_values": [40], "seed": 7}
  })");
  const std::string text = config_to_json(a);
  const ExperimentConfig b = parse_config(text);
  EXPECT_EQ(config_to_json(b), text);
  EXPECT_EQ(b.density.values, a.density.values);
  EXPECT_EQ(b.experiments.size(), 4u);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_EQ(kind_of(R"({"density": {"kind": "standard-gaussian"}, "extra": 1})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of(R"({"density": {"kind": "standard-gaussian", "colour": 1}})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of(R"({"density": {"kind": "cauchy"}})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of(R"({"path": {"steps": 10}})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of(R"({"density": {}, "path": {"steps": -5}})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of(R"({"density": {}, "domain": {"theta": 1.0}})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of(R"({"density": {}, "domain": {"w": [-1.9, 1.0]}})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of(R"({"density": {}, "experiments": {"n_values": [16]}})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of(R"({"density": {}, "experiments": {"run": ["bogus"]}})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of(R"({"density": {}, "experiments": {"trials": "many"}})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of(R"({"density": {}, )"), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of(R"({"density": {}})"), ErrorKind::IOFailure);
}

TEST(Config, MissingFileIsIoFailure) {
  try {
    load_config("/nonexistent/wigchar.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IOFailure);
  }
}

TEST(Config, ExperimentNames) {
  for (Experiment e : {Experiment::Lsc, Experiment::Characteristics, Experiment::Marginal, Experiment::Entrywise}) {
    EXPECT_EQ(experiment_from_string(to_string(e)), e);
  }
  EXPECT_THROW(experiment_from_string("LSC"), Error);
}
