#include "wigchar/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <thread>

#include "wigchar/error.hpp"
#include "wigchar/martingale.hpp"
#include "wigchar/resolvent.hpp"
#include "wigchar/spectral_path.hpp"

namespace wigchar {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kContractionSlack = 1.05;
constexpr std::size_t kBootstrapResamples = 400;

std::size_t resolve_threads(std::size_t requested, std::size_t tasks) {
  std::size_t t = requested;
  if (t == 0) t = std::max<unsigned>(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(t, tasks));
}

/// Runs task(i) for i in [0, count) on a pool of workers pulling indices from
/// a shared counter. Results must be written to slot i only.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& task) {
  if (count == 0) return;
  const std::size_t workers = resolve_threads(threads, count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) task(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct TrialIndex {
  std::size_t n = 0;
  std::size_t trial = 0;
};

std::vector<TrialIndex> trial_indices(const ExperimentConfig& config) {
  std::vector<TrialIndex> out;
  for (std::size_t n : config.n_values) {
    for (std::size_t j = 0; j < config.trials; ++j) out.push_back({n, j});
  }
  return out;
}

/// Per-trial work with failures captured instead of propagated; the outcome
/// vector is in trial order whatever the pool size.
template <typename Result>
std::vector<std::optional<Result>> run_trials(const std::vector<TrialIndex>& trials, const RunOptions& options,
                                              const std::function<Result(const TrialIndex&)>& work,
                                              FailureSummary& failures) {
  std::vector<std::optional<Result>> results(trials.size());
  std::vector<std::optional<TrialFailure>> errors(trials.size());
  parallel_for(trials.size(), options.threads, [&](std::size_t i) {
    try {
      results[i] = work(trials[i]);
    } catch (const Error& e) {
      errors[i] = TrialFailure{trials[i].n, trials[i].trial, std::string(to_string(e.kind())), e.what()};
    } catch (const std::exception& e) {
      errors[i] = TrialFailure{trials[i].n, trials[i].trial, "Exception", e.what()};
    }
  });
  failures.attempted += trials.size();
  for (auto& e : errors) {
    if (e) failures.failures.push_back(std::move(*e));
  }
  return results;
}

PathConfig path_config(const ExperimentConfig& config, std::size_t n, std::size_t trial, std::vector<double> schedule,
                       std::vector<double> checkpoints) {
  PathConfig p;
  p.n = n;
  p.schedule = std::move(schedule);
  p.checkpoints = std::move(checkpoints);
  p.seed = config.seed;
  p.trial = trial_key(n, trial);
  return p;
}

/// H(1) and sigma(1) for one trial.
MatrixState final_state(const ExperimentConfig& config, const CalibratedDensity& density, std::size_t n,
                        std::size_t trial) {
  MatrixState out;
  evolve(density, path_config(config, n, trial, make_schedule(config.schedule), {1.0}),
         [&out](const MatrixState& s) { out = s; });
  return out;
}

double im_level_of(cplx z) { return z.imag(); }

std::optional<ScalingFit> try_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() < 3) return std::nullopt;
  try {
    return fit_scaling(xs, ys);
  } catch (const Error&) {
    return std::nullopt;
  }
}

/// Distinct Im levels of a grid, increasing.
std::vector<double> im_levels(const std::vector<cplx>& zs) {
  std::set<double> s;
  for (cplx z : zs) s.insert(im_level_of(z));
  return {s.begin(), s.end()};
}

/// q-quantile exponent of pooled per-trial ratio lists, with a bootstrap over trials.
std::pair<double, double> pooled_exponent(const std::vector<std::vector<double>>& per_trial, double q, double n,
                                          RandomStream& stream) {
  std::vector<double> pooled;
  for (const auto& v : per_trial) {
    for (double r : v) {
      if (std::isfinite(r) && r > 0.0) pooled.push_back(r);
    }
  }
  if (pooled.empty()) return {kNaN, kNaN};
  const double estimate = domination_quantile(pooled, q, n);
  if (per_trial.size() < 2) return {estimate, kNaN};
  std::vector<double> ids(per_trial.size());
  std::iota(ids.begin(), ids.end(), 0.0);
  const auto stat = [&](std::vector<double>& sample) {
    std::vector<double> values;
    for (double id : sample) {
      for (double r : per_trial[static_cast<std::size_t>(id)]) {
        if (std::isfinite(r) && r > 0.0) values.push_back(r);
      }
    }
    return values.empty() ? estimate : domination_quantile(values, q, n);
  };
  const BootstrapResult b = bootstrap(ids, stat, kBootstrapResamples, stream);
  return {estimate, b.standard_error};
}

}  // namespace

std::uint64_t trial_key(std::size_t n, std::size_t trial) {
  return (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(trial & 0xffffffffu);
}

SpectralDomain make_domain(std::size_t n, const DomainParams& params) {
  return SpectralDomain::make(n, params.theta, params.w1, params.w2, params.kappa);
}

std::vector<cplx> z_grid(const SpectralDomain& dom, const DomainParams& params) {
  if (params.im_values.empty()) return z_grid(dom, params.im_levels, params.re_points);
  std::vector<cplx> out;
  for (double im : params.im_values) {
    for (cplx z : z_grid(dom, 1, params.re_points)) out.emplace_back(z.real(), im);
  }
  return out;
}

// ---------------------------------------------------------------------------

LscReport run_lsc(const ExperimentConfig& config, const CalibratedDensity& density, const RunOptions& options) {
  config.validate();
  LscReport report;
  const auto trials = trial_indices(config);
  const std::function<std::vector<LscObservation>(const TrialIndex&)> work = [&](const TrialIndex& ti) {
    const SpectralDomain dom = make_domain(ti.n, config.domain);
    const MatrixState s = final_state(config, density, ti.n, ti.trial);
    const SpectralResolvent sr(s.h, config.lsc_self_energy);
    std::vector<LscObservation> rows;
    for (cplx z : z_grid(dom, config.domain)) {
      LscObservation o;
      o.n = ti.n;
      o.trial = ti.trial;
      o.z = z;
      o.error = std::abs(sr.trace_mean(z) - msc(z));
      o.normalizer = 1.0 / std::sqrt(static_cast<double>(ti.n) * z.imag());
      o.self_energy_ratio = config.lsc_self_energy ? self_energy_error(s.sigma, sr.diagonal(z), z).ratio : kNaN;
      rows.push_back(o);
    }
    return rows;
  };
  const auto results = run_trials(trials, options, work, report.failures);

  std::vector<double> fit_x, fit_y, pooled_x, pooled_y;
  for (std::size_t n : config.n_values) {
    LscPerN per;
    per.n = n;
    const SpectralDomain dom = make_domain(n, config.domain);
    const auto zs = z_grid(dom, config.domain);
    const auto levels = im_levels(zs);
    per.eta = dom.eta;
    per.n_eta = static_cast<double>(n) * dom.eta;
    std::vector<std::vector<double>> se_ratios;
    std::map<double, std::vector<double>> level_sup;  // Im level -> per-trial max over Re
    std::vector<double> top_level_errors;
    for (std::size_t i = 0; i < trials.size(); ++i) {
      if (trials[i].n != n || !results[i]) continue;
      ++per.trials_ok;
      double sup = 0.0, se_sup = 0.0;
      std::vector<double> ratios;
      std::map<double, double> row_max;
      for (const auto& o : *results[i]) {
        report.observations.push_back(o);
        sup = std::max(sup, o.error);
        row_max[o.z.imag()] = std::max(row_max[o.z.imag()], o.error);
        if (o.z.imag() == levels.back()) top_level_errors.push_back(o.error);
        if (std::isfinite(o.self_energy_ratio)) {
          se_sup = std::max(se_sup, o.self_energy_ratio);
          ratios.push_back(o.self_energy_ratio);
        }
      }
      per.sup_error.push_back(sup);
      for (const auto& [im, m] : row_max) level_sup[im].push_back(m);
      if (config.lsc_self_energy) {
        per.self_energy_sup.push_back(se_sup);
        se_ratios.push_back(std::move(ratios));
      }
    }
    if (per.trials_ok > 0) {
      per.median_sup = median(per.sup_error);
      per.q05_sup = quantile(per.sup_error, 0.05);
      per.q95_sup = quantile(per.sup_error, 0.95);
      per.median_error_im1 = median(top_level_errors);
      fit_x.push_back(per.n_eta);
      fit_y.push_back(per.median_sup);
      for (const auto& [im, sups] : level_sup) {
        pooled_x.push_back(static_cast<double>(n) * im);
        pooled_y.push_back(median(sups));
      }
      if (!per.self_energy_sup.empty()) {
        per.self_energy_q95 = quantile(per.self_energy_sup, 0.95);
        RandomStream stream(StreamId{config.seed, trial_key(n, 0), StreamPurpose::Bootstrap, 0});
        std::tie(per.epsilon_hat, per.epsilon_stderr) =
            pooled_exponent(se_ratios, 0.95, static_cast<double>(n), stream);
      } else {
        per.self_energy_q95 = per.epsilon_hat = per.epsilon_stderr = kNaN;
      }
    }
    report.per_n.push_back(std::move(per));
  }
  if (auto f = try_fit(fit_x, fit_y)) report.fit = *f;
  if (auto f = try_fit(pooled_x, pooled_y)) report.pooled_fit = *f;
  return report;
}

// ---------------------------------------------------------------------------

EntrywiseResult run_entrywise(const Eigen::MatrixXd& h1, const SpectralDomain& dom, std::span<const cplx> zs) {
  EntrywiseResult out;
  const SpectralResolvent sr(h1, true);
  const double n = static_cast<double>(sr.n());
  for (cplx z : zs) {
    const ResolventSample g = sr.sample(z);
    const cplx m = msc(z);
    EntrywisePoint p;
    p.z = z;
    p.trace_err = std::abs(g.trace_mean - m);
    for (Eigen::Index j = 0; j < g.g.cols(); ++j) {
      for (Eigen::Index i = 0; i < g.g.rows(); ++i) {
        const double v = std::abs(g.g(i, j));
        if (i == j) {
          p.diag_err = std::max(p.diag_err, std::abs(g.g(i, i) - m));
          p.schur = std::max(p.schur, std::abs(1.0 / g.g(i, i) + z + m));
        } else {
          p.offdiag = std::max(p.offdiag, v);
        }
      }
    }
    p.schur_ratio = p.schur / std::sqrt((1.0 + m.imag()) / (n * z.imag()));
    out.max_diag_err = std::max(out.max_diag_err, p.diag_err);
    out.max_offdiag = std::max(out.max_offdiag, p.offdiag);
    out.max_schur_residual = std::max(out.max_schur_residual, p.schur_ratio);
    out.points.push_back(p);
  }
  (void)dom;
  return out;
}

EntrywiseResult run_entrywise(const Eigen::MatrixXd& h1, const SpectralDomain& dom) {
  const auto zs = z_grid(dom);
  return run_entrywise(h1, dom, zs);
}

EntrywiseReport run_entrywise_experiment(const ExperimentConfig& config, const CalibratedDensity& density,
                                         const RunOptions& options) {
  config.validate();
  EntrywiseReport report;
  const auto trials = trial_indices(config);
  const std::function<EntrywiseResult(const TrialIndex&)> work = [&](const TrialIndex& ti) {
    const SpectralDomain dom = make_domain(ti.n, config.domain);
    const MatrixState s = final_state(config, density, ti.n, ti.trial);
    const auto zs = z_grid(dom, config.domain);
    return run_entrywise(s.h, dom, zs);
  };
  const auto results = run_trials(trials, options, work, report.failures);

  for (std::size_t n : config.n_values) {
    EntrywisePerN per;
    per.n = n;
    per.eta = make_domain(n, config.domain).eta;
    std::map<double, std::vector<double>> diag_level, off_level, diag_level_m, off_level_m;
    std::vector<double> off_scaled, schur, diag_to_trace;
    for (std::size_t i = 0; i < trials.size(); ++i) {
      if (trials[i].n != n || !results[i]) continue;
      std::map<double, double> diag_row, off_row, diag_row_m, off_row_m;
      double max_diag = 0.0, max_trace = 0.0;
      for (const auto& p : results[i]->points) {
        report.observations.push_back({n, trials[i].trial, p});
        const double im = p.z.imag();
        diag_row[im] = std::max(diag_row[im], p.diag_err);
        off_row[im] = std::max(off_row[im], p.offdiag);
        const double m2 = std::norm(msc(p.z));
        diag_row_m[im] = std::max(diag_row_m[im], p.diag_err / m2);
        off_row_m[im] = std::max(off_row_m[im], p.offdiag / m2);
        off_scaled.push_back(p.offdiag * std::sqrt(static_cast<double>(n) * im));
        schur.push_back(p.schur_ratio);
        max_diag = std::max(max_diag, p.diag_err);
        max_trace = std::max(max_trace, p.trace_err);
      }
      for (const auto& [im, v] : diag_row) diag_level[im].push_back(v);
      for (const auto& [im, v] : off_row) off_level[im].push_back(v);
      for (const auto& [im, v] : diag_row_m) diag_level_m[im].push_back(v);
      for (const auto& [im, v] : off_row_m) off_level_m[im].push_back(v);
      if (max_trace > 0.0) diag_to_trace.push_back(max_diag / max_trace);
    }
    if (!schur.empty()) {
      std::vector<double> xs, dy, oy, dym, oym;
      for (const auto& [im, v] : diag_level) {
        xs.push_back(static_cast<double>(n) * im);
        dy.push_back(median(v));
        oy.push_back(median(off_level[im]));
        dym.push_back(median(diag_level_m[im]));
        oym.push_back(median(off_level_m[im]));
      }
      if (auto f = try_fit(xs, dy)) per.diag_fit = *f;
      if (auto f = try_fit(xs, oy)) per.offdiag_fit = *f;
      if (auto f = try_fit(xs, dym)) per.diag_fit_msc = *f;
      if (auto f = try_fit(xs, oym)) per.offdiag_fit_msc = *f;
      per.offdiag_scaled_q95 = quantile(off_scaled, 0.95);
      per.schur_ratio_q95 = quantile(schur, 0.95);
      per.diag_to_trace_median = diag_to_trace.empty() ? kNaN : median(diag_to_trace);
    }
    report.per_n.push_back(per);
  }
  return report;
}

// ---------------------------------------------------------------------------

MarginalReport run_marginal(const ExperimentConfig& config, const CalibratedDensity& density,
                            const RunOptions& options) {
  config.validate();
  MarginalReport report;
  std::vector<std::size_t> step_counts{config.schedule.steps};
  for (std::size_t s : config.marginal_step_counts) {
    if (std::find(step_counts.begin(), step_counts.end(), s) == step_counts.end()) step_counts.push_back(s);
  }
  std::vector<double> times = config.marginal_times;
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  const auto trials = trial_indices(config);

  struct TrialSamples {
    std::vector<std::vector<double>> per_time;
    std::uint64_t clamp_count = 0;
  };

  for (std::size_t steps : step_counts) {
    ScheduleSpec spec = config.schedule;
    spec.steps = steps;
    const std::vector<double> schedule = merge_times(make_schedule(spec), times);
    const std::function<TrialSamples(const TrialIndex&)> work = [&](const TrialIndex& ti) {
      TrialSamples out;
      out.per_time.resize(times.size());
      std::vector<double> checkpoints;
      for (double t : times) {
        // snap onto the merged schedule (t_init itself is admitted)
        const auto it = std::min_element(schedule.begin(), schedule.end(),
                                         [t](double a, double b) { return std::abs(a - t) < std::abs(b - t); });
        checkpoints.push_back(*it);
      }
      std::size_t next = 0;
      evolve(density, path_config(config, ti.n, ti.trial, schedule, checkpoints), [&](const MatrixState& s) {
        while (next < checkpoints.size() && std::abs(checkpoints[next] - s.t) > 1e-12) ++next;
        if (next >= checkpoints.size()) return;
        const double scale = std::sqrt(static_cast<double>(s.n()) / s.t);
        auto& v = out.per_time[next];
        v.reserve(s.n() * (s.n() + 1) / 2);
        for (Eigen::Index j = 0; j < s.h.cols(); ++j) {
          for (Eigen::Index i = 0; i <= j; ++i) v.push_back(scale * s.h(i, j));
        }
        out.clamp_count = s.clamp_count;
        ++next;
      });
      return out;
    };
    const auto results = run_trials(trials, options, work, report.failures);
    for (std::size_t n : config.n_values) {
      for (std::size_t k = 0; k < times.size(); ++k) {
        std::vector<double> pooled;
        std::uint64_t clamps = 0;
        for (std::size_t i = 0; i < trials.size(); ++i) {
          if (trials[i].n != n || !results[i]) continue;
          const auto& v = results[i]->per_time[k];
          pooled.insert(pooled.end(), v.begin(), v.end());
          clamps += results[i]->clamp_count;
        }
        if (pooled.empty()) continue;
        RandomStream ref(StreamId{config.seed, trial_key(n, steps), StreamPurpose::Reference, k});
        const std::vector<double> reference = sample_iid(density, pooled.size(), ref);
        const KsResult ks = ks_two_sample(pooled, reference);
        MarginalRow row;
        row.steps = steps;
        row.n = n;
        row.t = times[k];
        row.pooled = pooled.size();
        row.ks = ks.statistic;
        row.p_value = ks.p_value;
        row.clamp_count = clamps;
        report.rows.push_back(row);
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

CharacteristicReport run_characteristic(const ExperimentConfig& config, const CalibratedDensity& density,
                                        const RunOptions& options) {
  config.validate();
  CharacteristicReport report;
  const auto trials = trial_indices(config);
  const std::size_t flow_steps = config.domain.flow_steps;
  const std::vector<double> grid = uniform_grid(flow_steps);
  const std::vector<double> snapshots = SpectralPath::snapshot_times(flow_steps);
  std::vector<double> probes = config.probe_times;
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

  struct Probe {
    double t = 0.0;
    SpectralResolvent sr;
    Eigen::MatrixXd sigma;
  };
  struct TrialResult {
    std::vector<CharacteristicObservation> observations;
    std::vector<ContractionObservation> contractions;
    std::vector<CurveRecord> curves;
  };

  const std::function<TrialResult(const TrialIndex&)> work = [&](const TrialIndex& ti) {
    const SpectralDomain dom = make_domain(ti.n, config.domain);
    const auto zs = z_grid(dom, config.domain);
    SpectralPath path;
    std::vector<Probe> probe_states;
    TraceMeanFn trace_mean = semicircle_stub();
    if (!config.stub) {
      std::vector<double> extra = snapshots;
      extra.insert(extra.end(), probes.begin(), probes.end());
      const std::vector<double> schedule = merge_times(make_schedule(config.schedule), extra);
      std::vector<double> checkpoints;
      for (double t : extra) {
        if (t >= schedule.front()) checkpoints.push_back(t);
      }
      std::sort(checkpoints.begin(), checkpoints.end());
      checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end(),
                                    [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
                        checkpoints.end());
      auto is_in = [](const std::vector<double>& v, double t) {
        return std::any_of(v.begin(), v.end(), [t](double x) { return std::abs(x - t) <= 1e-12; });
      };
      evolve(density, path_config(config, ti.n, ti.trial, schedule, checkpoints), [&](const MatrixState& s) {
        const bool snapshot = is_in(snapshots, s.t);
        if (is_in(probes, s.t)) {
          Probe p;
          p.t = s.t;
          p.sr = SpectralResolvent(s.h, true);
          p.sigma = s.sigma;
          if (snapshot) path.add(s.t, p.sr.eigenvalues());
          probe_states.push_back(std::move(p));
        } else if (snapshot) {
          path.add_matrix(s.t, s.h);
        }
      });
      trace_mean = path.function();
    }

    TrialResult out;
    std::vector<CharacteristicCurve> curves;
    curves.reserve(zs.size());
    for (std::size_t zi = 0; zi < zs.size(); ++zi) {
      const InitialPoint ip = map_to_initial(trace_mean, zs[zi], dom, grid);
      StoppedProcess sp = stopped_process(trace_mean, ip.w, dom, grid);
      CharacteristicObservation o;
      o.n = ti.n;
      o.trial = ti.trial;
      o.z = zs[zi];
      o.w = ip.w;
      o.map_residual = ip.residual;
      o.roundtrip = ip.roundtrip;
      o.in_d0 = ip.in_d0;
      o.outside_delta = ip.outside_delta;
      o.drift_sup = sp.drift_sup;
      o.drift_ratio = sp.ratio;
      o.tau = sp.curve.tau;
      o.tau_prime = sp.curve.tau_prime;
      o.stopped = sp.curve.was_stopped;
      o.self_energy_ratio = kNaN;
      for (const Probe& p : probe_states) {
        if (sp.curve.was_stopped && p.t > sp.curve.tau) continue;
        const cplx xi = sp.curve.position(p.t);
        const double r = self_energy_error(p.sigma, p.sr.diagonal(xi), xi).ratio;
        o.self_energy_ratio = std::isfinite(o.self_energy_ratio) ? std::max(o.self_energy_ratio, r) : r;
      }
      out.observations.push_back(o);
      if (config.write_curves) out.curves.push_back({ti.n, ti.trial, zi, sp.curve});
      curves.push_back(std::move(sp.curve));
    }
    for (std::size_t zi = 0; zi + 1 < zs.size(); ++zi) {
      if (zs[zi].imag() != zs[zi + 1].imag()) continue;
      ContractionObservation c;
      c.n = ti.n;
      c.trial = ti.trial;
      c.first = zi;
      c.second = zi + 1;
      c.worst_ratio = contraction_check(curves[zi], curves[zi + 1]);
      out.contractions.push_back(c);
    }
    return out;
  };
  auto results = run_trials(trials, options, work, report.failures);

  for (std::size_t n : config.n_values) {
    CharacteristicPerN per;
    per.n = n;
    const SpectralDomain dom = make_domain(n, config.domain);
    per.eta = dom.eta;
    const double map_tol = 10.0 / std::sqrt(static_cast<double>(n) * dom.eta);
    std::vector<double> ratios, se;
    std::size_t map_ok = 0, rt_ok = 0;
    for (std::size_t i = 0; i < trials.size(); ++i) {
      if (trials[i].n != n || !results[i]) continue;
      for (const auto& o : results[i]->observations) {
        ++per.curves;
        ratios.push_back(o.drift_ratio);
        if (o.map_residual <= map_tol) ++map_ok;
        if (o.roundtrip <= 1e-3) ++rt_ok;
        per.roundtrip_max = std::max(per.roundtrip_max, o.roundtrip);
        if (o.in_d0) ++per.in_d0;
        if (o.outside_delta) ++per.outside_delta;
        if (std::isfinite(o.self_energy_ratio) && o.self_energy_ratio > 0.0) se.push_back(o.self_energy_ratio);
        report.observations.push_back(o);
      }
      for (const auto& c : results[i]->contractions) {
        ++per.pairs;
        per.contraction_worst = std::max(per.contraction_worst, c.worst_ratio);
        if (!(c.worst_ratio <= kContractionSlack)) ++per.contraction_violations;
        report.contractions.push_back(c);
      }
      for (auto& c : results[i]->curves) report.curves.push_back(std::move(c));
    }
    if (per.curves > 0) {
      per.drift_ratio_q95 = quantile(ratios, 0.95);
      per.drift_ratio_max = *std::max_element(ratios.begin(), ratios.end());
      per.map_ok_fraction = static_cast<double>(map_ok) / static_cast<double>(per.curves);
      per.roundtrip_ok_fraction = static_cast<double>(rt_ok) / static_cast<double>(per.curves);
    }
    if (!se.empty()) {
      per.self_energy_q95 = quantile(se, 0.95);
      per.epsilon_hat = domination_quantile(se, 0.95, static_cast<double>(n));
    } else {
      per.self_energy_q95 = per.epsilon_hat = kNaN;
    }
    report.per_n.push_back(per);
  }
  return report;
}

// ---------------------------------------------------------------------------

std::vector<StubCheck> stub_verify(const StubVerifyOptions& options) {
  const auto m_of = [&](cplx z) { return options.flip_msc_branch ? -z - msc(z) : msc(z); };
  const SpectralDomain dom = SpectralDomain::make(1000, 0.5, -1.0, 1.0, 0.5);
  const auto zs = z_grid(dom, 8, 9);
  const std::vector<double> grid = uniform_grid(std::max<std::size_t>(1, options.steps));
  const TraceMeanFn stub = semicircle_stub();

  std::vector<StubCheck> checks;
  auto add = [&](std::string name, double value, double tol) {
    checks.push_back({std::move(name), value, tol, value <= tol});
  };

  // Closed-form characteristic gamma(t, zeta) = zeta + t / zeta from zeta = -1/m_sc(z).
  double gamma_err = 0.0, lambda_err = 0.0, drift = 0.0, trick = 0.0;
  std::vector<CharacteristicCurve> curves;
  for (cplx z : zs) {
    const cplx zeta = -1.0 / msc(z);
    const StoppedProcess sp = stopped_process(stub, zeta, dom, grid);
    for (std::size_t k = 0; k < sp.curve.size(); ++k) {
      if (sp.curve.stopped[k]) break;
      gamma_err = std::max(gamma_err, std::abs(sp.curve.xi[k] - (zeta + sp.curve.t[k] / zeta)));
    }
    drift = std::max(drift, sp.drift_sup);
    const auto f = [](double x) { return x * x; };
    const auto fp = [](double x) { return 2.0 * x; };
    trick = std::max(trick, integration_trick(sp.curve, f, fp).relative);
    const InitialPoint ip = map_to_initial(stub, z, dom, grid);
    lambda_err = std::max(lambda_err, std::abs(ip.w - (-1.0 / m_of(z))));
    curves.push_back(sp.curve);
  }
  add("gamma-formula |gamma(t,zeta) - (zeta + t/zeta)|", gamma_err, 1e-6);
  add("lambda-inversion |lambda(1,z) + 1/m_sc(z)|", lambda_err, 1e-6);
  add("drift-conservation sup |<R(t)> - <R(0)>|", drift, 1e-6);
  add("integration-trick relative residual (f = x^2)", trick, 1e-6);

  // Contraction: numerical ratio <= 1 and the closed-form difference
  // gamma(t, a) - gamma(t, b) = (a - b)(1 - t / (a b)).
  double worst = 0.0, closed = 0.0;
  for (std::size_t i = 0; i + 1 < zs.size(); ++i) {
    if (zs[i].imag() != zs[i + 1].imag()) continue;
    worst = std::max(worst, contraction_check(curves[i], curves[i + 1]));
    const cplx a = curves[i].z0;
    const cplx b = curves[i + 1].z0;
    for (std::size_t k = 0; k < curves[i].size(); ++k) {
      if (curves[i].stopped[k] || curves[i + 1].stopped[k]) break;
      const double t = curves[i].t[k];
      closed = std::max(closed, std::abs((curves[i].xi[k] - curves[i + 1].xi[k]) - (a - b) * (1.0 - t / (a * b))));
    }
  }
  add("contraction-bound max ratio - 1", std::max(0.0, worst - 1.0), 1e-9);
  add("contraction-closed-form |difference|", closed, 1e-6);

  // m_sc on a 10^3-point grid: quadratic residual and branch Im m > 0.
  double residual = 0.0, branch = 0.0;
  for (int a = 0; a < 40; ++a) {
    for (int b = 0; b < 25; ++b) {
      const cplx z(-4.0 + 8.0 * a / 39.0, std::pow(10.0, -3.0 + 4.0 * b / 24.0));
      const cplx m = m_of(z);
      residual = std::max(residual, std::abs(m * m + z * m + 1.0));
      if (!(m.imag() > 0.0)) branch += 1.0;
    }
  }
  add("msc-residual |m^2 + z m + 1|", residual, 1e-12);
  add("msc-branch (points with Im m < 0)", branch, 0.0);
  add("msc(i) = 0.6180339887i", std::abs(m_of(cplx(0.0, 1.0)) - cplx(0.0, 0.6180339887)), 1e-9);
  return checks;
}

}  // namespace wigchar
