#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wigchar/density.hpp"
#include "wigchar/rng.hpp"

namespace wigchar {

/// Geometric-then-uniform time schedule on [t_init, 1].
struct ScheduleSpec {
  double t_init = 1e-3;
  std::size_t steps = 2000;
  /// Fraction of the steps spent on the geometric part near t_init.
  double geometric_fraction = 0.1;
};

/// Strictly increasing times from t_init to exactly 1. The geometric part
/// hands over to the uniform part where the step sizes match.
std::vector<double> make_schedule(const ScheduleSpec& spec);

/// Sorted union of `schedule` and those `extra` times inside (schedule.front(), 1].
/// Times closer than 1e-12 are treated as equal.
std::vector<double> merge_times(std::vector<double> schedule, std::span<const double> extra);

struct PathConfig {
  std::size_t n = 0;
  std::vector<double> schedule;     ///< t_init = schedule.front() < ... < schedule.back() = 1
  std::vector<double> checkpoints;  ///< times at which states are reported; each must be in `schedule`
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;

  double t_init() const { return schedule.front(); }
  /// Throws InvalidConfig if the invariants do not hold.
  void validate() const;
};

/// Symmetric matrix martingale H(t) together with its variance rates
/// sigma_ij(t) = a(sqrt(N/t) H_ij(t)) / N.
struct MatrixState {
  double t = 0.0;
  std::size_t step_index = 0;  ///< index into the schedule that produced this state
  Eigen::MatrixXd h;
  Eigen::MatrixXd sigma;
  std::uint64_t clamp_count = 0;  ///< a(h) evaluations clamped to the working interval so far

  std::size_t n() const { return static_cast<std::size_t>(h.rows()); }
};

struct MatrixPath {
  std::vector<MatrixState> checkpoints;
  std::uint64_t clamp_count = 0;
};

using CheckpointObserver = std::function<void(const MatrixState&)>;

/// Scalar Madan-Yor martingale dh = a(h / sqrt(t))^{1/2} db started from the
/// exact marginal sqrt(t_init) X, X ~ rho. Returns h at every grid time.
std::vector<double> evolve_scalar(const CalibratedDensity& density, std::span<const double> t_grid,
                                  RandomStream& stream);

/// H_ij(t_init) = sqrt(t_init / N) X_ij with X_ij iid ~ rho for i <= j, mirrored.
MatrixState init_exact(const CalibratedDensity& density, std::size_t n, double t_init, RandomStream& stream);

/// One Euler-Maruyama step of length dt. Throws InvalidStep for dt <= 0 or t + dt > 1.
MatrixState step(const CalibratedDensity& density, const MatrixState& state, double dt, RandomStream& stream);
void step_in_place(const CalibratedDensity& density, MatrixState& state, double dt, RandomStream& stream);

/// sigma_ij = a(sqrt(N/t) H_ij) / N recomputed from the state's H and t.
Eigen::MatrixXd sigma_profile(const CalibratedDensity& density, const MatrixState& state);

/// Streams every checkpoint to `observer` without retaining states.
/// Stream layout: initial entries use (seed, trial, InitialEntries, 0); the
/// increments of step k use (seed, trial, Increments, k).
void evolve(const CalibratedDensity& density, const PathConfig& config, const CheckpointObserver& observer);

MatrixPath evolve(const CalibratedDensity& density, const PathConfig& config);

// ---------------------------------------------------------------------------
// Binary path dump (see docs/path-format.md).

struct PathDumpHeader {
  std::uint32_t n = 0;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  std::string density_id;
  std::vector<double> schedule;
};

struct PathDump {
  PathDumpHeader header;
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> matrices;
};

void write_path_dump(const std::string& file, const PathDumpHeader& header, const MatrixPath& path);
PathDump read_path_dump(const std::string& file);

}  // namespace wigchar
