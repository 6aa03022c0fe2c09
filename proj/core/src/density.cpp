#include "wigchar/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "wigchar/error.hpp"

namespace wigchar {
namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343818684758586311649;

inline double std_normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
inline double std_normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Simpson's rule on a uniform grid with an odd number of samples.
double simpson(const std::vector<double>& f, double step) {
  const std::size_t n = f.size();
  double sum = f.front() + f.back();
  for (std::size_t i = 1; i + 1 < n; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
  return sum * step / 3.0;
}

// Cubic Hermite interpolation on [x0, x1].
inline double hermite(double x0, double x1, double y0, double y1, double d0, double d1, double x) noexcept {
  const double h = x1 - x0;
  const double s = (x - x0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * d1;
}

void check_mixture(const DensitySpec& spec) {
  if (spec.weights.empty() || spec.weights.size() != spec.sigmas.size()) {
    throw Error(ErrorKind::InvalidConfig, "mixture needs matching non-empty weights and sigmas");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < spec.weights.size(); ++i) {
    if (!(spec.weights[i] > 0.0)) throw Error(ErrorKind::InvalidConfig, "mixture weights must be positive");
    if (!(spec.sigmas[i] > 0.0)) throw Error(ErrorKind::InvalidConfig, "mixture sigmas must be positive");
    total += spec.weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorKind::InvalidConfig, "mixture weights must sum to 1 (got " + std::to_string(total) + ")");
  }
}

void check_table(const DensitySpec& spec) {
  if (spec.abscissae.size() < 3 || spec.abscissae.size() != spec.values.size()) {
    throw Error(ErrorKind::InvalidConfig, "tabulated density needs >= 3 matching abscissae and values");
  }
  for (std::size_t i = 1; i < spec.abscissae.size(); ++i) {
    if (!(spec.abscissae[i] > spec.abscissae[i - 1])) {
      throw Error(ErrorKind::InvalidConfig, "tabulated abscissae must be strictly increasing");
    }
  }
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    if (!(spec.values[i] > 0.0) || !std::isfinite(spec.values[i])) {
      throw Error(ErrorKind::NonPositiveDensity,
                  "tabulated value at x = " + std::to_string(spec.abscissae[i]) + " is not strictly positive");
    }
  }
}

// Raw moments of the log-linear interpolant, Simpson per table segment.
struct RawMoments {
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
};

RawMoments table_moments(const std::vector<double>& x, const std::vector<double>& v) {
  RawMoments out;
  const double target = (x.back() - x.front()) / 200000.0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double len = x[k + 1] - x[k];
    std::size_t m = static_cast<std::size_t>(std::ceil(len / target));
    m = std::max<std::size_t>(2, m + (m % 2));
    const double la = std::log(v[k]);
    const double beta = (std::log(v[k + 1]) - la) / len;
    const double h = len / static_cast<double>(m);
    for (std::size_t j = 0; j <= m; ++j) {
      const double xx = x[k] + h * static_cast<double>(j);
      const double f = std::exp(la + beta * (xx - x[k]));
      const double w = (j == 0 || j == m) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
      out.m0 += w * h / 3.0 * f;
      out.m1 += w * h / 3.0 * f * xx;
      out.m2 += w * h / 3.0 * f * xx * xx;
    }
  }
  return out;
}

}  // namespace

DensitySpec DensitySpec::standard_gaussian() { return DensitySpec{}; }

DensitySpec DensitySpec::mixture(std::vector<double> weights, std::vector<double> sigmas) {
  DensitySpec spec;
  spec.kind = DensityKind::GaussianMixture;
  spec.weights = std::move(weights);
  spec.sigmas = std::move(sigmas);
  return spec;
}

DensitySpec DensitySpec::tabulated(std::vector<double> abscissae, std::vector<double> values) {
  DensitySpec spec;
  spec.kind = DensityKind::Tabulated;
  spec.abscissae = std::move(abscissae);
  spec.values = std::move(values);
  return spec;
}

std::string DensitySpec::id() const { return to_string(kind); }

std::string to_string(DensityKind kind) {
  switch (kind) {
    case DensityKind::StandardGaussian: return "standard-gaussian";
    case DensityKind::GaussianMixture: return "gaussian-mixture";
    case DensityKind::Tabulated: return "tabulated";
  }
  return "unknown";
}

DensityKind density_kind_from_string(const std::string& name) {
  if (name == "standard-gaussian") return DensityKind::StandardGaussian;
  if (name == "gaussian-mixture") return DensityKind::GaussianMixture;
  if (name == "tabulated") return DensityKind::Tabulated;
  throw Error(ErrorKind::InvalidConfig, "unknown density kind '" + name + "'");
}

// ---------------------------------------------------------------------------
// ReconstructedDensity

ReconstructedDensity::ReconstructedDensity(std::function<double(double)> a, double h_max, std::size_t resolution)
    : a_(std::move(a)), h_max_(h_max) {
  if (resolution % 2 == 0) ++resolution;
  if (resolution < 5 || !(h_max > 0.0)) throw Error(ErrorKind::InvalidConfig, "reconstruction grid too small");
  const std::size_t n = resolution;
  const std::size_t centre = n / 2;
  step_ = 2.0 * h_max / static_cast<double>(n - 1);
  nodes_.resize(n);
  slope_.resize(n);
  exponent_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    nodes_[i] = i == centre ? 0.0 : -h_max + step_ * static_cast<double>(i);
    slope_[i] = nodes_[i] / a_(nodes_[i]);
  }
  // Third-order cumulative rule: int_{x_i}^{x_{i+1}} f = h/12 (5 f_i + 8 f_{i+1} - f_{i+2}).
  const double w = step_ / 12.0;
  for (std::size_t i = centre; i + 1 < n; ++i) {
    const double inc = (i + 2 < n) ? w * (5 * slope_[i] + 8 * slope_[i + 1] - slope_[i + 2])
                                    : w * (-slope_[i - 1] + 8 * slope_[i] + 5 * slope_[i + 1]);
    exponent_[i + 1] = exponent_[i] + inc;
  }
  for (std::size_t i = centre; i > 0; --i) {
    const double inc = (i >= 2) ? w * (5 * slope_[i] + 8 * slope_[i - 1] - slope_[i - 2])
                                : w * (-slope_[i + 1] + 8 * slope_[i] + 5 * slope_[i - 1]);
    exponent_[i - 1] = exponent_[i] - inc;
  }
  std::vector<double> unnormalized(n);
  for (std::size_t i = 0; i < n; ++i) unnormalized[i] = std::exp(-exponent_[i]) / a_(nodes_[i]);
  const double mass = simpson(unnormalized, step_);
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw Error(ErrorKind::QuadratureFailure, "reconstruction normalisation is not finite");
  }
  normalization_ = 1.0 / mass;
}

double ReconstructedDensity::operator()(double h) const {
  if (!a_) throw Error(ErrorKind::QuadratureFailure, "reconstruction has no coefficient attached");
  return evaluate(h, a_(h));
}

double ReconstructedDensity::evaluate(double h, double a_at_h) const {
  if (!(std::abs(h) <= h_max_)) throw Error(ErrorKind::OutOfRange, "reconstruction outside working interval");
  const std::size_t n = nodes_.size();
  auto k = static_cast<std::size_t>((h + h_max_) / step_);
  k = std::min(k, n - 2);
  const double exponent = hermite(nodes_[k], nodes_[k + 1], exponent_[k], exponent_[k + 1], slope_[k],
                                  slope_[k + 1], h);
  return normalization_ * std::exp(-exponent) / a_at_h;
}

// ---------------------------------------------------------------------------
// CalibratedDensity evaluators

double CalibratedDensity::tabulated_pdf(double h) const noexcept {
  const auto& x = table_x_;
  if (h <= x.front() || h >= x.back()) {
    if (h == x.front()) return std::exp(table_log_rho_.front());
    if (h == x.back()) return std::exp(table_log_rho_.back());
    return 0.0;
  }
  const auto it = std::upper_bound(x.begin(), x.end(), h);
  const std::size_t k = static_cast<std::size_t>(it - x.begin()) - 1;
  const double s = (h - x[k]) / (x[k + 1] - x[k]);
  return std::exp(table_log_rho_[k] + s * (table_log_rho_[k + 1] - table_log_rho_[k]));
}

double CalibratedDensity::tabulated_cumulative(const std::vector<double>& values, const std::vector<double>& slopes,
                                               double h) const noexcept {
  const auto& x = fine_x_;
  if (h <= x.front()) return values.front();
  if (h >= x.back()) return values.back();
  const auto it = std::upper_bound(x.begin(), x.end(), h);
  const std::size_t k = static_cast<std::size_t>(it - x.begin()) - 1;
  return hermite(x[k], x[k + 1], values[k], values[k + 1], slopes[k], slopes[k + 1], h);
}

double CalibratedDensity::pdf(double h) const {
  if (spec_.kind == DensityKind::Tabulated) return tabulated_pdf(h);
  double sum = 0.0;
  for (std::size_t i = 0; i < spec_.weights.size(); ++i) {
    sum += spec_.weights[i] * std_normal_pdf(h / spec_.sigmas[i]) / spec_.sigmas[i];
  }
  return sum;
}

double CalibratedDensity::cdf(double h) const {
  double raw;
  if (spec_.kind == DensityKind::Tabulated) {
    raw = tabulated_cumulative(fine_cdf_, fine_pdf_, h);
  } else {
    raw = 0.0;
    for (std::size_t i = 0; i < spec_.weights.size(); ++i) raw += spec_.weights[i] * std_normal_cdf(h / spec_.sigmas[i]);
  }
  return raw;
}

double CalibratedDensity::tail_moment(double h) const {
  if (spec_.kind == DensityKind::Tabulated) {
    const auto& x = fine_x_;
    if (h <= x.front()) return fine_tail_.front();
    if (h >= x.back()) return 0.0;
    return tabulated_cumulative(fine_tail_, fine_tail_slope_, h);
  }
  // int_h^inf k phi_s(k) dk = s^2 phi_s(h) = s * phi(h / s).
  double sum = 0.0;
  for (std::size_t i = 0; i < spec_.weights.size(); ++i) {
    sum += spec_.weights[i] * spec_.sigmas[i] * std_normal_pdf(h / spec_.sigmas[i]);
  }
  return sum;
}

double CalibratedDensity::a_unchecked(double h) const noexcept {
  if (spec_.kind == DensityKind::Tabulated) {
    return tabulated_cumulative(fine_tail_, fine_tail_slope_, h) / tabulated_pdf(h);
  }
  if (spec_.weights.size() == 1) return 1.0;  // a single centred Gaussian has a == variance == 1
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < spec_.weights.size(); ++i) {
    const double phi = spec_.weights[i] * std_normal_pdf(h / spec_.sigmas[i]);
    num += phi * spec_.sigmas[i];
    den += phi / spec_.sigmas[i];
  }
  return num / den;
}

double CalibratedDensity::a(double h) const {
  if (!(std::abs(h) <= h_max_)) {
    throw Error(ErrorKind::OutOfRange, "a(h) requested at h = " + std::to_string(h) + " outside [-h_max, h_max]");
  }
  return a_unchecked(h);
}

double CalibratedDensity::a_clamped(double h, bool& clamped) const noexcept {
  if (h > h_max_) {
    clamped = true;
    h = h_max_;
  } else if (h < -h_max_) {
    clamped = true;
    h = -h_max_;
  } else if (std::isnan(h)) {
    clamped = true;
    h = 0.0;
  }
  return a_unchecked(h);
}

double CalibratedDensity::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    if (p <= 0.0) return -h_max_;
    if (p >= 1.0) return h_max_;
  }
  const double target = cdf_low_ + p * (cdf_high_ - cdf_low_);
  const auto it = std::upper_bound(grid_cdf_.begin(), grid_cdf_.end(), target);
  if (it == grid_cdf_.begin()) return -h_max_;
  if (it == grid_cdf_.end()) return h_max_;
  const std::size_t k = static_cast<std::size_t>(it - grid_cdf_.begin()) - 1;
  double lo = grid_x_[k];
  double hi = grid_x_[k + 1];
  const double span = grid_cdf_[k + 1] - grid_cdf_[k];
  double x = span > 0.0 ? lo + (target - grid_cdf_[k]) / span * (hi - lo) : lo;
  // Safeguarded Newton inside the bracket.
  for (int iter = 0; iter < 60; ++iter) {
    const double f = cdf(x) - target;
    if (f == 0.0) break;
    if (f > 0.0) hi = x; else lo = x;
    const double d = pdf(x);
    double next = d > 0.0 ? x - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool converged = std::abs(next - x) <= 1e-15 * (1.0 + std::abs(x)) || hi - lo <= 1e-15 * (1.0 + std::abs(x));
    x = next;
    if (converged) break;
  }
  return x;
}

// ---------------------------------------------------------------------------
// Calibration

CalibratedDensity calibrate(const DensitySpec& input, const CalibrationGrid& grid_in) {
  CalibratedDensity cd;
  CalibrationGrid grid = grid_in;
  if (grid.resolution % 2 == 0) ++grid.resolution;
  if (grid.resolution < 101 || !(grid.h_max > 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "calibration grid needs >= 101 points and h_max > 0");
  }
  cd.grid_ = grid;
  const double base_step = 2.0 * grid.h_max / static_cast<double>(grid.resolution - 1);
  double h_max = grid.h_max;

  switch (input.kind) {
    case DensityKind::StandardGaussian: {
      cd.spec_ = input;
      cd.spec_.weights = {1.0};
      cd.spec_.sigmas = {1.0};
      break;
    }
    case DensityKind::GaussianMixture: {
      check_mixture(input);
      cd.spec_ = input;
      double var = 0.0;
      for (std::size_t i = 0; i < input.weights.size(); ++i) var += input.weights[i] * input.sigmas[i] * input.sigmas[i];
      if (!(var > 0.0) || !std::isfinite(var)) throw Error(ErrorKind::MomentFailure, "mixture variance not positive");
      const double scale = std::sqrt(var);
      for (auto& s : cd.spec_.sigmas) s /= scale;
      break;
    }
    case DensityKind::Tabulated: {
      check_table(input);
      cd.spec_ = input;
      const RawMoments raw = table_moments(input.abscissae, input.values);
      const double mu = raw.m1 / raw.m0;
      const double var = raw.m2 / raw.m0 - mu * mu;
      if (!(raw.m0 > 0.0) || !(var > 0.0) || !std::isfinite(var)) {
        throw Error(ErrorKind::MomentFailure, "cannot standardise tabulated density (variance not positive)");
      }
      const double s = std::sqrt(var);
      cd.table_shift_ = mu;
      cd.table_scale_ = s;
      cd.table_log_norm_ = std::log(s / raw.m0);
      const std::size_t m = input.abscissae.size();
      cd.table_x_.resize(m);
      cd.table_log_rho_.resize(m);
      for (std::size_t i = 0; i < m; ++i) {
        cd.table_x_[i] = (input.abscissae[i] - mu) / s;
        cd.table_log_rho_[i] = std::log(input.values[i]) + cd.table_log_norm_;
      }
      // Fine grid containing every table node; corrected trapezoid for the
      // cumulative integrals (the integrand is exponential on each segment).
      std::vector<double> beta;
      cd.fine_x_.push_back(cd.table_x_.front());
      for (std::size_t k = 0; k + 1 < m; ++k) {
        const double len = cd.table_x_[k + 1] - cd.table_x_[k];
        const auto pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / base_step)));
        const double slope = (cd.table_log_rho_[k + 1] - cd.table_log_rho_[k]) / len;
        for (std::size_t j = 1; j <= pieces; ++j) {
          cd.fine_x_.push_back(j == pieces ? cd.table_x_[k + 1]
                                           : cd.table_x_[k] + len * static_cast<double>(j) / static_cast<double>(pieces));
          beta.push_back(slope);
        }
      }
      const std::size_t nf = cd.fine_x_.size();
      cd.fine_pdf_.resize(nf);
      for (std::size_t j = 0; j < nf; ++j) cd.fine_pdf_[j] = cd.tabulated_pdf(cd.fine_x_[j]);
      cd.fine_cdf_.assign(nf, 0.0);
      for (std::size_t j = 0; j + 1 < nf; ++j) {
        const double h = cd.fine_x_[j + 1] - cd.fine_x_[j];
        const double f0 = cd.fine_pdf_[j], f1 = cd.fine_pdf_[j + 1];
        const double d0 = beta[j] * f0, d1 = beta[j] * f1;
        cd.fine_cdf_[j + 1] = cd.fine_cdf_[j] + 0.5 * h * (f0 + f1) + h * h / 12.0 * (d0 - d1);
      }
      cd.fine_tail_.assign(nf, 0.0);
      cd.fine_tail_slope_.resize(nf);
      for (std::size_t j = 0; j < nf; ++j) cd.fine_tail_slope_[j] = -cd.fine_x_[j] * cd.fine_pdf_[j];
      for (std::size_t j = nf - 1; j > 0; --j) {
        const double h = cd.fine_x_[j] - cd.fine_x_[j - 1];
        const double x0 = cd.fine_x_[j - 1], x1 = cd.fine_x_[j];
        const double g0 = x0 * cd.fine_pdf_[j - 1], g1 = x1 * cd.fine_pdf_[j];
        const double b = beta[j - 1];
        const double d0 = cd.fine_pdf_[j - 1] * (1.0 + x0 * b), d1 = cd.fine_pdf_[j] * (1.0 + x1 * b);
        cd.fine_tail_[j - 1] = cd.fine_tail_[j] + 0.5 * h * (g0 + g1) + h * h / 12.0 * (d0 - d1);
      }
      // Left of the origin T(h) = -int_{-inf}^h k rho(k) dk (zero mean); accumulating
      // from the left avoids cancelling two nearly equal halves of the first moment.
      double head = 0.0;
      for (std::size_t j = 0; j + 1 < nf && cd.fine_x_[j + 1] < 0.0; ++j) {
        const double h = cd.fine_x_[j + 1] - cd.fine_x_[j];
        const double x0 = cd.fine_x_[j], x1 = cd.fine_x_[j + 1];
        const double g0 = x0 * cd.fine_pdf_[j], g1 = x1 * cd.fine_pdf_[j + 1];
        const double b = beta[j];
        const double d0 = cd.fine_pdf_[j] * (1.0 + x0 * b), d1 = cd.fine_pdf_[j + 1] * (1.0 + x1 * b);
        if (j == 0) cd.fine_tail_[0] = 0.0;
        head += 0.5 * h * (g0 + g1) + h * h / 12.0 * (d0 - d1);
        cd.fine_tail_[j + 1] = -head;
      }
      // The table has no mass beyond its end nodes, where T and hence a vanish;
      // keep one grid step inside so that 1/a stays finite on the working grid.
      h_max = std::min({h_max, -cd.table_x_.front() - base_step, cd.table_x_.back() - base_step});
      break;
    }
  }

  // Shrink the working interval to where rho is above the truncation level.
  {
    double reach = 0.0;
    while (reach + base_step <= h_max && cd.pdf(reach + base_step) >= grid.truncation_density &&
           cd.pdf(-(reach + base_step)) >= grid.truncation_density) {
      reach += base_step;
    }
    if (reach + base_step > h_max) reach = h_max;
    h_max = reach;
  }
  if (!(h_max > 1.0)) throw Error(ErrorKind::MomentFailure, "working interval collapsed (h_max <= 1)");
  cd.h_max_ = h_max;

  const std::size_t n = grid.resolution;
  const double step = 2.0 * h_max / static_cast<double>(n - 1);
  cd.grid_x_.resize(n);
  cd.grid_cdf_.resize(n);
  std::vector<double> rho(n), a(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = i == n / 2 ? 0.0 : -h_max + step * static_cast<double>(i);
    cd.grid_x_[i] = h;
    rho[i] = cd.pdf(h);
    a[i] = cd.a_unchecked(h);
    if (!(rho[i] > 0.0)) {
      throw Error(ErrorKind::NonPositiveDensity, "density vanishes at h = " + std::to_string(h));
    }
  }
  for (std::size_t i = 0; i < n; ++i) cd.grid_cdf_[i] = cd.cdf(cd.grid_x_[i]);
  cd.cdf_low_ = cd.grid_cdf_.front();
  cd.cdf_high_ = cd.grid_cdf_.back();

  // Heuristic sub-Gaussianity check: growth of a over the outer tenth of each side.
  {
    const double inner = 0.9 * h_max;
    bool clamped = false;
    const double right_growth = cd.a_clamped(h_max, clamped) / cd.a_clamped(inner, clamped) - 1.0;
    const double left_growth = cd.a_clamped(-h_max, clamped) / cd.a_clamped(-inner, clamped) - 1.0;
    if (right_growth > grid.unbounded_growth || left_growth > grid.unbounded_growth) {
      throw Error(ErrorKind::UnboundedA, "a(h) grows by " + std::to_string(100.0 * std::max(left_growth, right_growth)) +
                                             "% over the outer tenth of the working interval (tails heavier than "
                                             "sub-Gaussian)");
    }
  }

  // Moments by Simpson on pieces split at the table nodes (rho has kinks there).
  {
    std::vector<double> breaks = {-h_max};
    for (double x : cd.table_x_) {
      if (x > -h_max && x < h_max) breaks.push_back(x);
    }
    breaks.push_back(h_max);
    double m0 = 0.0, m1 = 0.0, m2 = 0.0, ar = 0.0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
      const double len = breaks[k + 1] - breaks[k];
      std::size_t m = static_cast<std::size_t>(std::ceil(len / step));
      m = std::max<std::size_t>(2, m + (m % 2));
      const double hs = len / static_cast<double>(m);
      for (std::size_t j = 0; j <= m; ++j) {
        const double x = j == m ? breaks[k + 1] : breaks[k] + hs * static_cast<double>(j);
        const double w = ((j == 0 || j == m) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0)) * hs / 3.0;
        const double r = cd.pdf(x);
        m0 += w * r;
        m1 += w * r * x;
        m2 += w * r * x * x;
        ar += w * r * cd.a_unchecked(x);
      }
    }
    cd.mass_ = m0;
    cd.mean_ = m1;
    cd.variance_ = m2 - m1 * m1;
    cd.integral_a_rho_ = ar;
  }

  cd.a_sup_ = *std::max_element(a.begin(), a.end());
  cd.lipschitz_ = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    cd.lipschitz_ = std::max(cd.lipschitz_, std::abs(a[i + 1] - a[i - 1]) / (2.0 * step));
  }

  cd.tolerances_.mass_error = std::abs(cd.mass_ - 1.0);
  cd.tolerances_.mean_error = std::abs(cd.mean_);
  cd.tolerances_.variance_error = std::abs(cd.variance_ - 1.0);
  cd.tolerances_.integral_a_rho_error = std::abs(cd.integral_a_rho_ - 1.0);
  if (cd.tolerances_.mass_error > 1e-6 || cd.tolerances_.mean_error > 1e-6 || cd.tolerances_.variance_error > 1e-6) {
    throw Error(ErrorKind::MomentFailure, "standardised density has mass " + std::to_string(cd.mass_) + ", mean " +
                                              std::to_string(cd.mean_) + ", variance " + std::to_string(cd.variance_));
  }

  cd.reconstruction_ = ReconstructedDensity([&cd](double h) { return cd.a_unchecked(h); }, h_max, n);
  cd.reconstruction_.forget_coefficient();
  return cd;
}

double a_of_h(const CalibratedDensity& density, double h) { return density.a(h); }

double reconstruct_pdf(const CalibratedDensity& density, double h) {
  return density.reconstruction().evaluate(h, density.a(h));
}

std::vector<double> sample_iid(const CalibratedDensity& density, std::size_t n, RandomStream& stream) {
  std::vector<double> out(n);
  for (auto& x : out) x = density.quantile(stream.uniform());
  return out;
}

AssumptionReport verify_assumption(const CalibratedDensity& density, const AssumptionThresholds& thresholds) {
  AssumptionReport report;
  report.a_sup = density.a_sup();
  report.lipschitz_estimate = density.lipschitz_estimate();
  report.mean = density.mean();
  report.variance = density.variance();
  report.integral_a_rho = density.integral_a_rho();
  report.mass = density.mass();
  report.a_bounded = report.a_sup <= thresholds.a_sup_max;
  report.a_lipschitz = report.lipschitz_estimate <= thresholds.lipschitz_max;
  report.moments_ok = std::abs(report.mean) <= thresholds.moment_tolerance &&
                      std::abs(report.variance - 1.0) <= thresholds.moment_tolerance &&
                      std::abs(report.mass - 1.0) <= thresholds.moment_tolerance;
  report.integral_ok = std::abs(report.integral_a_rho - 1.0) <= thresholds.integral_tolerance;
  report.passed = report.a_bounded && report.a_lipschitz && report.moments_ok && report.integral_ok;
  return report;
}

}  // namespace wigchar
