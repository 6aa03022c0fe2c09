#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wigchar/rng.hpp"

namespace wigchar {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  std::size_t m = 0;  ///< second sample size (0 for the one-sample test)
};

/// Kolmogorov survival function Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_survival(double x);

/// One-sample test against a continuous CDF; asymptotic p-value with
/// Stephens' small-sample correction. Throws EmptySample.
KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Two-sample test; asymptotic p-value with Stephens' correction on the
/// effective size nm / (n + m). Throws EmptySample.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Linear-interpolation (type 7) quantile. Throws EmptySample.
double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);
double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double stddev(std::span<const double> values);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double stderr_intercept = 0.0;
  std::size_t points = 0;
};

/// OLS of log y on log x. Throws InvalidConfig for fewer than 3 points or
/// non-positive values, DegenerateFit if log x has zero variance.
ScalingFit fit_scaling(std::span<const double> xs, std::span<const double> ys);

/// log_N of the q-quantile of `ratios`. Throws EmptySample, InvalidConfig for
/// non-positive samples or N < 2.
double domination_quantile(std::span<const double> ratios, double q, double n);

struct BootstrapResult {
  double estimate = 0.0;
  double standard_error = 0.0;
  double lower = 0.0;  ///< 2.5% percentile
  double upper = 0.0;  ///< 97.5% percentile
};

/// Nonparametric bootstrap of `statistic` with resamples drawn from `stream`.
BootstrapResult bootstrap(std::span<const double> values, const std::function<double(std::vector<double>&)>& statistic,
                          std::size_t resamples, RandomStream& stream);

}  // namespace wigchar
