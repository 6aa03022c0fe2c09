#include "wigchar/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wigchar/error.hpp"

namespace wigchar {
namespace {

double stephens_p_value(double d, double effective_n) {
  const double en = std::sqrt(effective_n);
  return kolmogorov_survival((en + 0.12 + 0.11 / en) * d);
}

}  // namespace

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;  // the alternating series is 1 to double precision here
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += sign * term;
    if (term < 1e-17 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw Error(ErrorKind::EmptySample, "KS test needs a non-empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  KsResult r;
  r.statistic = d;
  r.n = sample.size();
  r.p_value = stephens_p_value(d, n);
  return r;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::EmptySample, "KS test needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult r;
  r.statistic = d;
  r.n = a.size();
  r.m = b.size();
  r.p_value = stephens_p_value(d, na * nb / (na + nb));
  return r;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorKind::EmptySample, "quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorKind::InvalidConfig, "quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double mean(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::EmptySample, "mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

ScalingFit fit_scaling(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorKind::DimensionMismatch, "fit needs equally many x and y values");
  if (xs.size() < 3) throw Error(ErrorKind::InvalidConfig, "fit needs at least 3 points");
  const std::size_t n = xs.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw Error(ErrorKind::InvalidConfig, "log-log fit needs positive values");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  const double mx = mean(lx);
  const double my = mean(ly);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 1e-300)) throw Error(ErrorKind::DegenerateFit, "x values have zero variance");
  ScalingFit fit;
  fit.points = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - fit.intercept - fit.slope * lx[i];
    rss += r * r;
  }
  const double s2 = n > 2 ? rss / static_cast<double>(n - 2) : 0.0;
  fit.stderr_slope = std::sqrt(s2 / sxx);
  fit.stderr_intercept = std::sqrt(s2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
  return fit;
}

double domination_quantile(std::span<const double> ratios, double q, double n) {
  if (ratios.empty()) throw Error(ErrorKind::EmptySample, "no ratios");
  if (!(n >= 2.0)) throw Error(ErrorKind::InvalidConfig, "domination exponent needs N >= 2");
  for (double r : ratios) {
    if (!(r > 0.0)) throw Error(ErrorKind::InvalidConfig, "ratios must be positive");
  }
  return std::log(quantile(std::vector<double>(ratios.begin(), ratios.end()), q)) / std::log(n);
}

BootstrapResult bootstrap(std::span<const double> values, const std::function<double(std::vector<double>&)>& statistic,
                          std::size_t resamples, RandomStream& stream) {
  if (values.empty()) throw Error(ErrorKind::EmptySample, "bootstrap of an empty sample");
  BootstrapResult out;
  std::vector<double> work(values.begin(), values.end());
  out.estimate = statistic(work);
  std::vector<double> stats;
  stats.reserve(resamples);
  const std::size_t n = values.size();
  for (std::size_t b = 0; b < resamples; ++b) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto idx = std::min(n - 1, static_cast<std::size_t>(stream.uniform() * static_cast<double>(n)));
      work[i] = values[idx];
    }
    stats.push_back(statistic(work));
  }
  if (!stats.empty()) {
    out.standard_error = stddev(stats);
    out.lower = quantile(stats, 0.025);
    out.upper = quantile(stats, 0.975);
  }
  return out;
}

}  // namespace wigchar
