#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "wigchar/characteristics.hpp"

namespace wigchar {

/// Spectra of H(t) at snapshot times, answering <G(t, w)> for the flows.
///
/// At a snapshot time (within 1e-12) the value is exact. Between snapshots
/// <G> is interpolated linearly in t. Before the first snapshot t_1 the
/// spectrum is rescaled by sqrt(t / t_1), which is exact in law for the
/// martingale started from H(0) = 0, and <G(0, w)> = -1/w.
class SpectralPath {
 public:
  SpectralPath() = default;

  /// Snapshots must be added in strictly increasing time order.
  void add(double t, Eigen::VectorXd eigenvalues);
  void add_matrix(double t, const Eigen::MatrixXd& h);

  cplx trace_mean(double t, cplx w) const;
  /// Callable bound to this object; the object must outlive it.
  TraceMeanFn function() const;

  const std::vector<double>& times() const { return times_; }
  const Eigen::VectorXd& eigenvalues(std::size_t k) const { return spectra_[k]; }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }

  /// j / (2 steps) for j = 1..2 steps: every RK4 node and stage time of a
  /// uniform flow grid with `steps` steps, and of its time reversal.
  static std::vector<double> snapshot_times(std::size_t flow_steps);

 private:
  std::vector<double> times_;
  std::vector<Eigen::VectorXd> spectra_;
};

}  // namespace wigchar
