#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wigchar/rng.hpp"

namespace wigchar {

enum class DensityKind { StandardGaussian, GaussianMixture, Tabulated };

/// User-facing description of an entry density before calibration.
///
/// Mixtures are centred Gaussian mixtures given by weights and component
/// standard deviations. Tabulated densities are interpolated linearly in
/// log-space between the given abscissae, so the values must be strictly
/// positive. Both are rescaled to mean 0 and variance 1 by `calibrate`.
struct DensitySpec {
  DensityKind kind = DensityKind::StandardGaussian;
  std::vector<double> weights;
  std::vector<double> sigmas;
  std::vector<double> abscissae;
  std::vector<double> values;

  static DensitySpec standard_gaussian();
  static DensitySpec mixture(std::vector<double> weights, std::vector<double> sigmas);
  static DensitySpec tabulated(std::vector<double> abscissae, std::vector<double> values);

  /// "standard-gaussian", "gaussian-mixture" or "tabulated".
  std::string id() const;
};

std::string to_string(DensityKind kind);
DensityKind density_kind_from_string(const std::string& name);

struct CalibrationGrid {
  /// Number of grid points on [-h_max, h_max]; forced odd.
  std::size_t resolution = 20001;
  /// Working half-width in standard deviations.
  double h_max = 10.0;
  /// The working interval is shrunk to where the density drops below this.
  double truncation_density = 1e-20;
  /// UnboundedA is raised if a grows by more than this fraction across the
  /// outer tenth of either half of the working interval.
  double unbounded_growth = 0.10;
};

/// Quadrature deviations measured during calibration.
struct CalibrationTolerances {
  double mass_error = 0.0;
  double mean_error = 0.0;
  double variance_error = 0.0;
  double integral_a_rho_error = 0.0;
};

struct AssumptionThresholds {
  double a_sup_max = 100.0;
  double lipschitz_max = 100.0;
  double moment_tolerance = 1e-8;
  double integral_tolerance = 1e-8;
};

struct AssumptionReport {
  double a_sup = 0.0;
  double lipschitz_estimate = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double integral_a_rho = 0.0;
  double mass = 0.0;
  std::uint64_t clamp_count = 0;

  bool a_bounded = false;
  bool a_lipschitz = false;
  bool moments_ok = false;
  bool integral_ok = false;
  bool passed = false;
};

/// Evaluates rho(h) = C / a(h) * exp(-int_0^h k / a(k) dk) from a diffusion
/// coefficient alone, with C fixed by normalisation on [-h_max, h_max].
class ReconstructedDensity {
 public:
  ReconstructedDensity() = default;
  ReconstructedDensity(std::function<double(double)> a, double h_max, std::size_t resolution);

  double operator()(double h) const;
  /// Same as operator() with a(h) supplied by the caller.
  double evaluate(double h, double a_at_h) const;
  double h_max() const noexcept { return h_max_; }

  /// Drops the stored coefficient; only `evaluate` remains usable.
  void forget_coefficient() noexcept { a_ = nullptr; }

 private:
  std::function<double(double)> a_;
  double h_max_ = 0.0;
  double step_ = 0.0;
  double normalization_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> exponent_;  // int_0^h k / a(k) dk at the nodes
  std::vector<double> slope_;     // h / a(h) at the nodes
};

/// Standardised density with its diffusion coefficient a(h) = T(h) / rho(h),
/// where T(h) = int_h^inf k rho(k) dk. Immutable after construction and safe
/// to share across threads.
class CalibratedDensity {
 public:
  double h_max() const noexcept { return h_max_; }
  DensityKind kind() const noexcept { return spec_.kind; }
  std::string id() const { return spec_.id(); }

  /// The standardised spec actually evaluated (mixture sigmas rescaled, etc.).
  const DensitySpec& standardized_spec() const noexcept { return spec_; }

  double pdf(double h) const;
  double cdf(double h) const;
  double quantile(double p) const;
  double tail_moment(double h) const;

  /// a(h); throws OutOfRange for |h| > h_max.
  double a(double h) const;
  /// a(h) with h clamped to the working interval; sets `clamped` when it was.
  double a_clamped(double h, bool& clamped) const noexcept;

  double a_sup() const noexcept { return a_sup_; }
  double lipschitz_estimate() const noexcept { return lipschitz_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }
  double mass() const noexcept { return mass_; }
  double integral_a_rho() const noexcept { return integral_a_rho_; }
  const CalibrationTolerances& tolerances() const noexcept { return tolerances_; }
  const CalibrationGrid& grid() const noexcept { return grid_; }

  const ReconstructedDensity& reconstruction() const noexcept { return reconstruction_; }

 private:
  friend CalibratedDensity calibrate(const DensitySpec& spec, const CalibrationGrid& grid);

  double a_unchecked(double h) const noexcept;
  double tabulated_pdf(double h) const noexcept;
  double tabulated_cumulative(const std::vector<double>& values, const std::vector<double>& slopes,
                              double h) const noexcept;

  DensitySpec spec_;
  CalibrationGrid grid_;
  double h_max_ = 0.0;

  // Tabulated representation (standardised coordinates).
  std::vector<double> table_x_;
  std::vector<double> table_log_rho_;
  double table_scale_ = 1.0;  // maps standardised h to raw table abscissa
  double table_shift_ = 0.0;
  double table_log_norm_ = 0.0;
  std::vector<double> fine_x_;
  std::vector<double> fine_cdf_;
  std::vector<double> fine_pdf_;
  std::vector<double> fine_tail_;
  std::vector<double> fine_tail_slope_;

  // Working-interval grid used for diagnostics and quantile bracketing.
  std::vector<double> grid_x_;
  std::vector<double> grid_cdf_;
  double cdf_low_ = 0.0;
  double cdf_high_ = 1.0;

  double a_sup_ = 0.0;
  double lipschitz_ = 0.0;
  double mean_ = 0.0;
  double variance_ = 0.0;
  double mass_ = 0.0;
  double integral_a_rho_ = 0.0;
  CalibrationTolerances tolerances_;
  ReconstructedDensity reconstruction_;
};

/// Standardises `spec`, builds the evaluators and checks the positivity,
/// moment and sub-Gaussian (bounded a) hypotheses.
/// Throws NonPositiveDensity, UnboundedA, MomentFailure or InvalidConfig.
CalibratedDensity calibrate(const DensitySpec& spec, const CalibrationGrid& grid = {});

double a_of_h(const CalibratedDensity& density, double h);

/// Density rebuilt from a(h) alone; agrees with `density.pdf` up to quadrature error.
double reconstruct_pdf(const CalibratedDensity& density, double h);

/// n draws by inverse-CDF sampling.
std::vector<double> sample_iid(const CalibratedDensity& density, std::size_t n, RandomStream& stream);

AssumptionReport verify_assumption(const CalibratedDensity& density, const AssumptionThresholds& thresholds = {});

}  // namespace wigchar
