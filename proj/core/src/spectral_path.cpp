#include "wigchar/spectral_path.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wigchar/error.hpp"

namespace wigchar {
namespace {

constexpr double kTimeEps = 1e-12;

}  // namespace

void SpectralPath::add(double t, Eigen::VectorXd eigenvalues) {
  if (!(t > 0.0) || t > 1.0 + kTimeEps) throw Error(ErrorKind::InvalidConfig, "snapshot time must lie in (0, 1]");
  if (!times_.empty() && !(t > times_.back() + kTimeEps)) {
    throw Error(ErrorKind::InvalidConfig, "snapshots must be added in increasing time order");
  }
  if (!spectra_.empty() && eigenvalues.size() != spectra_.front().size()) {
    throw Error(ErrorKind::DimensionMismatch, "snapshot dimension changed");
  }
  if (eigenvalues.size() == 0) throw Error(ErrorKind::DimensionMismatch, "empty spectrum");
  times_.push_back(t);
  spectra_.push_back(std::move(eigenvalues));
}

void SpectralPath::add_matrix(double t, const Eigen::MatrixXd& h) {
  add(t, SpectralResolvent(h, false).eigenvalues());
}

cplx SpectralPath::trace_mean(double t, cplx w) const {
  if (times_.empty()) throw Error(ErrorKind::InvalidConfig, "spectral path has no snapshots");
  if (t <= 0.0) return -1.0 / w;
  if (t > times_.back() + kTimeEps) {
    throw Error(ErrorKind::OutOfRange, "time " + std::to_string(t) + " beyond the last snapshot");
  }
  if (t < times_.front() - kTimeEps) {
    return trace_mean_from_eigenvalues(spectra_.front(), w, std::sqrt(t / times_.front()));
  }
  const auto it = std::lower_bound(times_.begin(), times_.end(), t - kTimeEps);
  const auto k = static_cast<std::size_t>(it - times_.begin());
  if (std::abs(times_[k] - t) <= kTimeEps) return trace_mean_from_eigenvalues(spectra_[k], w);
  // times_[k - 1] < t < times_[k]
  const double t0 = times_[k - 1];
  const double t1 = times_[k];
  const double s = (t - t0) / (t1 - t0);
  return (1.0 - s) * trace_mean_from_eigenvalues(spectra_[k - 1], w) + s * trace_mean_from_eigenvalues(spectra_[k], w);
}

TraceMeanFn SpectralPath::function() const {
  return [this](double t, cplx w) { return trace_mean(t, w); };
}

std::vector<double> SpectralPath::snapshot_times(std::size_t flow_steps) {
  std::vector<double> out;
  const std::size_t m = 2 * flow_steps;
  out.reserve(m);
  for (std::size_t j = 1; j <= m; ++j) out.push_back(static_cast<double>(j) / static_cast<double>(m));
  out.back() = 1.0;
  return out;
}

}  // namespace wigchar
