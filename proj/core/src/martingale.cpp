#include "wigchar/martingale.hpp"

#include <algorithm>
#include <cmath>

#include "wigchar/error.hpp"

namespace wigchar {
namespace {

constexpr double kTimeEps = 1e-12;

}  // namespace

std::vector<double> make_schedule(const ScheduleSpec& spec) {
  if (!(spec.t_init > 0.0 && spec.t_init < 1.0)) throw Error(ErrorKind::InvalidConfig, "t_init must lie in (0, 1)");
  if (spec.steps < 2) throw Error(ErrorKind::InvalidConfig, "schedule needs at least 2 steps");
  if (!(spec.geometric_fraction >= 0.0 && spec.geometric_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "geometric_fraction must lie in [0, 1)");
  }
  const auto geometric = static_cast<std::size_t>(std::llround(spec.geometric_fraction * static_cast<double>(spec.steps)));
  const std::size_t uniform = spec.steps - geometric;
  std::vector<double> times;
  times.reserve(spec.steps + 1);
  if (geometric == 0) {
    for (std::size_t k = 0; k <= uniform; ++k) {
      times.push_back(spec.t_init + (1.0 - spec.t_init) * static_cast<double>(k) / static_cast<double>(uniform));
    }
    times.back() = 1.0;
    return times;
  }
  // Find the switch time s where the last geometric step s (1 - r^{-1}) equals
  // the uniform step (1 - s) / uniform, r = (s / t_init)^{1/geometric}.
  const double g = static_cast<double>(geometric);
  const double u = static_cast<double>(uniform);
  auto mismatch = [&](double s) {
    const double r = std::pow(s / spec.t_init, 1.0 / g);
    return s * (1.0 - 1.0 / r) - (1.0 - s) / u;
  };
  double lo = spec.t_init * (1.0 + 1e-12);
  double hi = 1.0 - 1e-12;
  if (mismatch(lo) > 0.0) {
    hi = lo;
  } else {
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      (mismatch(mid) > 0.0 ? hi : lo) = mid;
    }
  }
  const double s = hi;
  const double r = std::pow(s / spec.t_init, 1.0 / g);
  double t = spec.t_init;
  for (std::size_t k = 0; k < geometric; ++k) {
    times.push_back(t);
    t *= r;
  }
  for (std::size_t k = 0; k <= uniform; ++k) {
    times.push_back(s + (1.0 - s) * static_cast<double>(k) / u);
  }
  times.back() = 1.0;
  return times;
}

std::vector<double> merge_times(std::vector<double> schedule, std::span<const double> extra) {
  if (schedule.empty()) return schedule;
  const double start = schedule.front();
  for (double t : extra) {
    if (t > start + kTimeEps && t <= 1.0 + kTimeEps) schedule.push_back(std::min(t, 1.0));
  }
  std::sort(schedule.begin(), schedule.end());
  std::vector<double> out;
  out.reserve(schedule.size());
  for (double t : schedule) {
    if (out.empty() || t - out.back() > kTimeEps) {
      out.push_back(t);
    } else if (std::abs(t - 1.0) <= kTimeEps) {
      out.back() = 1.0;
    }
  }
  return out;
}

void PathConfig::validate() const {
  if (n < 1) throw Error(ErrorKind::InvalidConfig, "matrix dimension must be >= 1");
  if (schedule.size() < 2) throw Error(ErrorKind::InvalidConfig, "schedule needs at least two times");
  if (!(schedule.front() > 0.0 && schedule.front() < 1.0)) throw Error(ErrorKind::InvalidConfig, "t_init must lie in (0, 1)");
  if (schedule.back() != 1.0) throw Error(ErrorKind::InvalidConfig, "schedule must end at t = 1");
  for (std::size_t k = 1; k < schedule.size(); ++k) {
    if (!(schedule[k] > schedule[k - 1])) throw Error(ErrorKind::InvalidConfig, "schedule must be strictly increasing");
  }
  for (double c : checkpoints) {
    const auto it = std::lower_bound(schedule.begin(), schedule.end(), c - kTimeEps);
    if (it == schedule.end() || std::abs(*it - c) > kTimeEps) {
      throw Error(ErrorKind::InvalidConfig, "checkpoint " + std::to_string(c) + " is not a schedule time");
    }
  }
}

std::vector<double> evolve_scalar(const CalibratedDensity& density, std::span<const double> t_grid,
                                  RandomStream& stream) {
  if (t_grid.empty() || !(t_grid.front() > 0.0)) throw Error(ErrorKind::InvalidConfig, "scalar grid must start at t > 0");
  std::vector<double> out(t_grid.size());
  double h = std::sqrt(t_grid.front()) * density.quantile(stream.uniform());
  out[0] = h;
  bool clamped = false;
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    const double dt = t_grid[k] - t_grid[k - 1];
    if (!(dt > 0.0)) throw Error(ErrorKind::InvalidStep, "scalar grid must be strictly increasing");
    const double coeff = density.a_clamped(h / std::sqrt(t_grid[k - 1]), clamped);
    h += std::sqrt(coeff * dt) * stream.normal();
    out[k] = h;
  }
  return out;
}

MatrixState init_exact(const CalibratedDensity& density, std::size_t n, double t_init, RandomStream& stream) {
  if (n < 1) throw Error(ErrorKind::InvalidConfig, "matrix dimension must be >= 1");
  if (!(t_init > 0.0 && t_init < 1.0)) throw Error(ErrorKind::InvalidConfig, "t_init must lie in (0, 1)");
  MatrixState state;
  state.t = t_init;
  const auto m = static_cast<Eigen::Index>(n);
  const double nd = static_cast<double>(n);
  state.h.resize(m, m);
  state.sigma.resize(m, m);
  const double entry_scale = std::sqrt(t_init / nd);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double x = density.quantile(stream.uniform());
      state.h(i, j) = entry_scale * x;
      bool clamped = false;
      state.sigma(i, j) = density.a_clamped(x, clamped) / nd;
      if (clamped) ++state.clamp_count;
    }
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      state.h(j, i) = state.h(i, j);
      state.sigma(j, i) = state.sigma(i, j);
    }
  }
  return state;
}

void step_in_place(const CalibratedDensity& density, MatrixState& state, double dt, RandomStream& stream) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidStep, "step size must be positive");
  if (state.t + dt > 1.0 + kTimeEps) throw Error(ErrorKind::InvalidStep, "step overshoots t = 1");
  const Eigen::Index m = state.h.rows();
  const double nd = static_cast<double>(m);
  const double t_next = std::min(state.t + dt, 1.0);
  const double sqrt_dt = std::sqrt(dt);
  const double rescale = std::sqrt(nd / t_next);
  std::uint64_t clamps = 0;
  for (Eigen::Index j = 0; j < m; ++j) {
    double* hcol = state.h.col(j).data();
    double* scol = state.sigma.col(j).data();
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double value = hcol[i] + std::sqrt(scol[i]) * sqrt_dt * stream.normal();
      hcol[i] = value;
      bool clamped = false;
      scol[i] = density.a_clamped(rescale * value, clamped) / nd;
      clamps += clamped ? 1 : 0;
    }
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      state.h(j, i) = state.h(i, j);
      state.sigma(j, i) = state.sigma(i, j);
    }
  }
  state.t = t_next;
  state.clamp_count += clamps;
  ++state.step_index;
}

MatrixState step(const CalibratedDensity& density, const MatrixState& state, double dt, RandomStream& stream) {
  MatrixState next = state;
  step_in_place(density, next, dt, stream);
  return next;
}

Eigen::MatrixXd sigma_profile(const CalibratedDensity& density, const MatrixState& state) {
  if (!(state.t > 0.0)) throw Error(ErrorKind::InvalidConfig, "sigma profile needs t > 0");
  const Eigen::Index m = state.h.rows();
  const double nd = static_cast<double>(m);
  const double rescale = std::sqrt(nd / state.t);
  Eigen::MatrixXd sigma(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      bool clamped = false;
      sigma(i, j) = density.a_clamped(rescale * state.h(i, j), clamped) / nd;
      sigma(j, i) = sigma(i, j);
    }
  }
  return sigma;
}

void evolve(const CalibratedDensity& density, const PathConfig& config, const CheckpointObserver& observer) {
  config.validate();
  std::vector<double> pending = config.checkpoints;
  std::sort(pending.begin(), pending.end());
  std::size_t next_checkpoint = 0;
  auto maybe_report = [&](const MatrixState& state) {
    while (next_checkpoint < pending.size() && pending[next_checkpoint] <= state.t + kTimeEps) {
      if (std::abs(pending[next_checkpoint] - state.t) <= kTimeEps && observer) observer(state);
      ++next_checkpoint;
    }
  };

  RandomStream init_stream(StreamId{config.seed, config.trial, StreamPurpose::InitialEntries, 0});
  MatrixState state = init_exact(density, config.n, config.t_init(), init_stream);
  maybe_report(state);
  for (std::size_t k = 1; k < config.schedule.size(); ++k) {
    RandomStream increments(StreamId{config.seed, config.trial, StreamPurpose::Increments, k});
    const double dt = config.schedule[k] - config.schedule[k - 1];
    step_in_place(density, state, dt, increments);
    state.t = config.schedule[k];
    state.step_index = k;
    maybe_report(state);
  }
}

MatrixPath evolve(const CalibratedDensity& density, const PathConfig& config) {
  MatrixPath path;
  evolve(density, config, [&path](const MatrixState& state) { path.checkpoints.push_back(state); });
  if (!path.checkpoints.empty()) path.clamp_count = path.checkpoints.back().clamp_count;
  return path;
}

}  // namespace wigchar
