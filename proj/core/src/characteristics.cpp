#include "wigchar/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "wigchar/error.hpp"

namespace wigchar {
namespace {

constexpr double kTimeEps = 1e-12;

bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

std::string describe(double t, cplx xi) {
  std::ostringstream os;
  os.precision(17);
  os << "last good state t = " << t << ", xi = " << xi.real() << (xi.imag() < 0 ? " - " : " + ")
     << std::abs(xi.imag()) << "i";
  return os.str();
}

void check_grid(std::span<const double> t_grid) {
  if (t_grid.empty()) throw Error(ErrorKind::InvalidConfig, "flow grid is empty");
  if (t_grid.front() < 0.0 || t_grid.back() > 1.0 + kTimeEps) {
    throw Error(ErrorKind::InvalidConfig, "flow grid must lie in [0, 1]");
  }
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    if (!(t_grid[k] > t_grid[k - 1])) throw Error(ErrorKind::InvalidConfig, "flow grid must be strictly increasing");
  }
}

/// One RK4 step of y' = sign * f(time_map(t), y). Returns nullopt if a stage
/// leaves the upper half plane; throws ODEStepFailure on non-finite drift.
template <typename Drift>
std::optional<cplx> rk4_step(const Drift& drift, double t, cplx y, double h) {
  auto eval = [&](double s, cplx w) -> std::optional<cplx> {
    if (!(w.imag() > 0.0) || !finite(w)) return std::nullopt;
    const cplx v = drift(s, w);
    if (!finite(v)) throw Error(ErrorKind::ODEStepFailure, "drift is not finite; " + describe(t, y));
    return v;
  };
  const auto k1 = eval(t, y);
  if (!k1) return std::nullopt;
  const auto k2 = eval(t + 0.5 * h, y + 0.5 * h * *k1);
  if (!k2) return std::nullopt;
  const auto k3 = eval(t + 0.5 * h, y + 0.5 * h * *k2);
  if (!k3) return std::nullopt;
  const auto k4 = eval(t + h, y + h * *k3);
  if (!k4) return std::nullopt;
  const cplx next = y + h / 6.0 * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4);
  if (!finite(next)) throw Error(ErrorKind::ODEStepFailure, "RK4 step is not finite; " + describe(t, y));
  return next;
}

}  // namespace

cplx msc(cplx z) {
  if (z.imag() == 0.0) z = cplx(z.real(), 0.0);  // boundary value from above, never from -0
  const cplx s = std::sqrt(z - 2.0) * std::sqrt(z + 2.0);
  cplx m = -2.0 / (z + s);
  if (m.imag() == 0.0) m = cplx(m.real(), 0.0);
  return m;
}

SpectralDomain SpectralDomain::make(std::size_t n, double theta, double w1, double w2, double kappa) {
  if (n < 1) throw Error(ErrorKind::InvalidConfig, "N must be >= 1");
  if (!(theta > 0.0 && theta < 1.0)) throw Error(ErrorKind::InvalidConfig, "theta must lie in (0, 1)");
  if (!(kappa > 0.0 && kappa < 2.0)) throw Error(ErrorKind::InvalidConfig, "kappa must lie in (0, 2)");
  if (!(w1 <= w2) || w1 < -2.0 + kappa || w2 > 2.0 - kappa) {
    throw Error(ErrorKind::InvalidConfig, "W must satisfy -2 + kappa <= W1 <= W2 <= 2 - kappa");
  }
  SpectralDomain d;
  d.kappa = kappa;
  d.w1 = w1;
  d.w2 = w2;
  d.theta = theta;
  d.n = n;
  d.eta = std::pow(static_cast<double>(n), theta - 1.0);
  const double c = 1.0 + d.sup_abs_d();
  // 4 delta^2 + 2 c delta - 1 <= 0
  d.delta = (-c + std::sqrt(c * c + 4.0)) / 4.0;
  return d;
}

double SpectralDomain::sup_abs_d() const { return std::sqrt(std::max(w1 * w1, w2 * w2) + 1.0); }

bool SpectralDomain::in_d(cplx z) const {
  return z.real() >= w1 && z.real() <= w2 && z.imag() >= eta && z.imag() <= 1.0;
}

bool SpectralDomain::in_d0(cplx z) const {
  return z.real() > w1 - 2.0 / eta && z.real() < w2 + 2.0 / eta && z.imag() > eta / 2.0 &&
         z.imag() < 1.0 + 2.0 / eta && std::abs(z) > delta;
}

bool SpectralDomain::in_dprime(cplx z) const {
  return z.real() > w1 - 3.0 / eta && z.real() < w2 + 3.0 / eta && z.imag() > eta / 4.0 &&
         z.imag() < 1.0 + 3.0 / eta;
}

std::vector<cplx> z_grid(const SpectralDomain& dom, std::size_t im_levels, std::size_t re_points) {
  if (im_levels < 1 || re_points < 1) throw Error(ErrorKind::InvalidConfig, "z-grid needs at least one point per axis");
  std::vector<cplx> out;
  out.reserve(im_levels * re_points);
  for (std::size_t a = 0; a < im_levels; ++a) {
    const double frac = im_levels == 1 ? 1.0 : static_cast<double>(a) / static_cast<double>(im_levels - 1);
    double im = std::pow(dom.eta, 1.0 - frac);
    if (a == 0) im = im_levels == 1 ? 1.0 : dom.eta;
    if (a + 1 == im_levels) im = 1.0;
    for (std::size_t b = 0; b < re_points; ++b) {
      const double re = re_points == 1 ? 0.5 * (dom.w1 + dom.w2)
                                       : dom.w1 + (dom.w2 - dom.w1) * static_cast<double>(b) /
                                                      static_cast<double>(re_points - 1);
      out.emplace_back(re, im);
    }
  }
  return out;
}

cplx stub_trace_mean(double t, cplx w) {
  if (t <= 0.0) return -1.0 / w;
  const double r = 2.0 * std::sqrt(t);
  return -2.0 / (w + std::sqrt(w - r) * std::sqrt(w + r));
}

TraceMeanFn semicircle_stub() { return [](double t, cplx w) { return stub_trace_mean(t, w); }; }

std::vector<double> uniform_grid(std::size_t steps) {
  if (steps < 1) throw Error(ErrorKind::InvalidConfig, "grid needs at least one step");
  std::vector<double> out(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j) out[j] = static_cast<double>(j) / static_cast<double>(steps);
  out.back() = 1.0;
  return out;
}

cplx CharacteristicCurve::position(double s) const {
  if (t.empty()) throw Error(ErrorKind::EmptySample, "empty curve");
  if (s <= t.front()) return xi.front();
  if (s >= t.back()) return xi.back();
  const auto it = std::upper_bound(t.begin(), t.end(), s);
  const auto k = static_cast<std::size_t>(it - t.begin());
  const double dt = t[k] - t[k - 1];
  if (dt <= 0.0) return xi[k];
  const double w = (s - t[k - 1]) / dt;
  return (1.0 - w) * xi[k - 1] + w * xi[k];
}

std::vector<double> CharacteristicCurve::u() const {
  std::vector<double> out(trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) out[k] = 1.0 + trace[k].imag();
  return out;
}

CharacteristicCurve flow_gamma(const TraceMeanFn& trace_mean, cplx z0, const SpectralDomain& dom,
                               std::span<const double> t_grid, const FlowOptions& options) {
  check_grid(t_grid);
  if (!(z0.imag() > 0.0)) throw Error(ErrorKind::InvalidConfig, "flow must start in the upper half plane");
  const double level = options.stop_fraction * dom.eta;
  const double prime_level = options.prime_fraction * dom.eta;
  auto drift = [&](double s, cplx w) { return -trace_mean(s, w); };

  CharacteristicCurve c;
  c.z0 = z0;
  c.eta = dom.eta;
  auto record = [&c](double t, cplx xi, cplx tr, bool stopped) {
    c.t.push_back(t);
    c.xi.push_back(xi);
    c.trace.push_back(tr);
    c.stopped.push_back(stopped ? 1 : 0);
  };

  cplx xi = z0;
  cplx tr = trace_mean(t_grid.front(), z0);
  if (!finite(tr)) throw Error(ErrorKind::ODEStepFailure, "drift is not finite; " + describe(t_grid.front(), z0));
  const bool starts_stopped = !(z0.imag() > level);
  if (z0.imag() <= prime_level) c.tau_prime = t_grid.front();
  if (starts_stopped) {
    c.was_stopped = true;
    c.tau = t_grid.front();
  }
  record(t_grid.front(), xi, tr, starts_stopped);

  // Largest h in [0, dt] whose RK4 step keeps Im above `threshold`.
  auto crossing = [&](double t, cplx y, double dt, double threshold) {
    double lo = 0.0;
    double hi = dt;
    while (hi - lo > options.time_tolerance) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const auto trial = rk4_step(drift, t, y, mid);
      if (trial && trial->imag() > threshold) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return lo;
  };

  for (std::size_t k = 0; k + 1 < t_grid.size(); ++k) {
    const double t = t_grid[k];
    const double t_next = t_grid[k + 1];
    if (c.was_stopped) {
      record(t_next, xi, tr, true);
      continue;
    }
    const double dt = t_next - t;
    const auto next = rk4_step(drift, t, xi, dt);
    if (!std::isfinite(c.tau_prime) && (!next || !(next->imag() > prime_level))) {
      const double h = crossing(t, xi, dt, prime_level);
      c.tau_prime = t + h;
    }
    if (next && next->imag() > level) {
      xi = *next;
      tr = trace_mean(t_next, xi);
      if (!finite(tr)) throw Error(ErrorKind::ODEStepFailure, "drift is not finite; " + describe(t_next, xi));
      record(t_next, xi, tr, false);
      continue;
    }
    const double h = crossing(t, xi, dt, level);
    c.was_stopped = true;
    c.tau = t + h;
    if (h > 0.0) {
      const auto stop = rk4_step(drift, t, xi, h);
      if (!stop) throw Error(ErrorKind::ODEStepFailure, "cannot resolve the stopping point; " + describe(t, xi));
      xi = *stop;
      tr = trace_mean(c.tau, xi);
    }
    if (c.tau < t_next - kTimeEps) record(c.tau, xi, tr, true);
    record(t_next, xi, tr, true);
  }
  if (!std::isfinite(c.tau_prime) && c.was_stopped) c.tau_prime = c.tau;
  return c;
}

CharacteristicCurve flow_lambda(const TraceMeanFn& trace_mean, cplx zeta, std::span<const double> t_grid) {
  check_grid(t_grid);
  if (!(zeta.imag() > 0.0)) throw Error(ErrorKind::InvalidConfig, "reversed flow must start in the upper half plane");
  auto drift = [&](double s, cplx w) { return trace_mean(1.0 - s, w); };
  CharacteristicCurve c;
  c.z0 = zeta;
  cplx y = zeta;
  auto record = [&](double t) {
    c.t.push_back(t);
    c.xi.push_back(y);
    c.trace.push_back(drift(t, y));
    c.stopped.push_back(0);
  };
  record(t_grid.front());
  for (std::size_t k = 0; k + 1 < t_grid.size(); ++k) {
    const auto next = rk4_step(drift, t_grid[k], y, t_grid[k + 1] - t_grid[k]);
    if (!next) throw Error(ErrorKind::ODEStepFailure, "reversed flow left the upper half plane; " + describe(t_grid[k], y));
    y = *next;
    record(t_grid[k + 1]);
  }
  return c;
}

InitialPoint map_to_initial(const TraceMeanFn& trace_mean, cplx z, const SpectralDomain& dom,
                            std::span<const double> t_grid) {
  InitialPoint out;
  out.w = flow_lambda(trace_mean, z, t_grid).endpoint();
  out.residual = std::abs(out.w + 1.0 / out.w - z);
  out.in_d0 = dom.in_d0(out.w);
  out.outside_delta = std::abs(out.w) > dom.delta;
  const CharacteristicCurve forward = flow_gamma(trace_mean, out.w, dom, t_grid);
  out.roundtrip = std::abs(forward.endpoint() - z);
  return out;
}

StoppedProcess stopped_process(const TraceMeanFn& trace_mean, cplx z0, const SpectralDomain& dom,
                               std::span<const double> t_grid, const FlowOptions& options) {
  StoppedProcess out;
  out.curve = flow_gamma(trace_mean, z0, dom, t_grid, options);
  const cplx r0 = out.curve.trace.front();
  const double horizon = std::min(1.0, out.curve.tau_prime);
  for (std::size_t k = 0; k < out.curve.size(); ++k) {
    if (out.curve.t[k] > horizon + kTimeEps) break;
    out.drift_sup = std::max(out.drift_sup, std::abs(out.curve.trace[k] - r0));
  }
  out.ratio = out.drift_sup * std::sqrt(static_cast<double>(dom.n) * dom.eta);
  return out;
}

CharacteristicCurve stopped_process_on_states(std::span<const MatrixState> states, cplx z0, const SpectralDomain& dom,
                                              const FlowOptions& options) {
  if (states.empty()) throw Error(ErrorKind::EmptySample, "no states");
  const double level = options.stop_fraction * dom.eta;
  CharacteristicCurve c;
  c.z0 = z0;
  c.eta = dom.eta;
  auto tm = [](const MatrixState& s, cplx w) { return SpectralResolvent(s.h, false).trace_mean(w); };
  cplx xi = z0;
  cplx tr = tm(states[0], xi);
  c.t.push_back(states[0].t);
  c.xi.push_back(xi);
  c.trace.push_back(tr);
  c.stopped.push_back(0);
  for (std::size_t k = 0; k + 1 < states.size(); ++k) {
    const double dt = states[k + 1].t - states[k].t;
    if (!(dt > 0.0)) throw Error(ErrorKind::InvalidConfig, "states must be in increasing time order");
    if (!c.was_stopped) {
      const cplx predictor = xi - dt * tr;
      cplx next = predictor;
      if (predictor.imag() > 0.0) next = xi - 0.5 * dt * (tr + tm(states[k + 1], predictor));
      if (next.imag() > level) {
        xi = next;
        tr = tm(states[k + 1], xi);
      } else {
        // frozen at the last point above the level
        c.was_stopped = true;
        c.tau = states[k].t;
      }
    }
    c.t.push_back(states[k + 1].t);
    c.xi.push_back(xi);
    c.trace.push_back(tr);
    c.stopped.push_back(c.was_stopped ? 1 : 0);
  }
  return c;
}

DriftDecomposition drift_decomposition(std::span<const MatrixState> states, const CharacteristicCurve& curve) {
  if (states.size() != curve.size()) {
    throw Error(ErrorKind::DimensionMismatch, "curve must be recorded at the state times");
  }
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (std::abs(states[k].t - curve.t[k]) > kTimeEps) {
      throw Error(ErrorKind::DimensionMismatch, "curve time " + std::to_string(curve.t[k]) +
                                                    " differs from state time " + std::to_string(states[k].t));
    }
  }
  DriftDecomposition d;
  if (states.empty()) return d;
  const double inv_n = 1.0 / static_cast<double>(states[0].n());
  cplx f(0.0, 0.0), a(0.0, 0.0);
  const cplx r0 = curve.trace.front();
  d.t.push_back(curve.t[0]);
  d.f.push_back(f);
  d.a.push_back(a);
  d.residual.push_back(0.0);
  for (std::size_t k = 0; k + 1 < states.size(); ++k) {
    if (!curve.stopped[k + 1]) {
      const MatrixState& s = states[k];
      const double dt = states[k + 1].t - s.t;
      const ResolventSample r = resolvent(s.h, curve.xi[k]);
      const Eigen::MatrixXcd r2 = r.g * r.g;
      // <R X R> = N^{-1} sum_ij X_ij (R^2)_ji
      const Eigen::MatrixXd dh = states[k + 1].h - s.h;
      const Eigen::MatrixXcd tr_op = t_op(s.sigma, r.g);
      const cplx noise = (dh.cast<cplx>().cwiseProduct(r2.transpose())).sum() * inv_n;
      const cplx t_term = (tr_op.cwiseProduct(r2.transpose())).sum() * inv_n;
      f += -noise + t_term * dt;
      const Eigen::VectorXcd sdiag = s_op(s.sigma, r.g);
      cplx a_term(0.0, 0.0);
      for (Eigen::Index i = 0; i < sdiag.size(); ++i) a_term += (sdiag(i) - r.trace_mean) * r2(i, i);
      a += a_term * inv_n * dt;
    }
    d.t.push_back(curve.t[k + 1]);
    d.f.push_back(f);
    d.a.push_back(a);
    const double res = std::abs(curve.trace[k + 1] - r0 - f - a);
    d.residual.push_back(res);
    d.max_residual = std::max(d.max_residual, res);
    d.f_sup = std::max(d.f_sup, std::abs(f));
    d.a_sup = std::max(d.a_sup, std::abs(a));
  }
  return d;
}

double contraction_check(const CharacteristicCurve& curve_z, const CharacteristicCurve& curve_w) {
  const cplx z = curve_z.z0;
  const cplx w = curve_w.z0;
  const double gap = std::abs(z - w);
  double worst = 0.0;
  for (std::size_t i = 0; i < curve_z.size(); ++i) {
    if (curve_z.stopped[i]) break;
    const double t = curve_z.t[i];
    const auto it = std::lower_bound(curve_w.t.begin(), curve_w.t.end(), t - kTimeEps);
    if (it == curve_w.t.end() || std::abs(*it - t) > kTimeEps) continue;
    const auto j = static_cast<std::size_t>(it - curve_w.t.begin());
    if (curve_w.stopped[j]) break;
    const double diff = std::abs(curve_z.xi[i] - curve_w.xi[j]);
    if (gap == 0.0) {
      if (diff > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    const double bound =
        std::sqrt(z.imag() * w.imag() / (curve_z.xi[i].imag() * curve_w.xi[j].imag())) * gap;
    worst = std::max(worst, diff / bound);
  }
  return worst;
}

IntegrationTrickResult integration_trick(const CharacteristicCurve& curve, const std::function<double(double)>& f,
                                         const std::function<double(double)>& f_prime) {
  IntegrationTrickResult out;
  if (curve.size() == 0) throw Error(ErrorKind::EmptySample, "empty curve");
  std::size_t end = 0;
  while (end + 1 < curve.size() && !curve.stopped[end]) ++end;
  // `end` is the first stopped point (the stopping time itself) or the last point.
  for (std::size_t k = 0; k < end; ++k) {
    const double dt = curve.t[k + 1] - curve.t[k];
    const double g0 = f_prime(curve.xi[k].imag()) * curve.trace[k].imag();
    const double g1 = f_prime(curve.xi[k + 1].imag()) * curve.trace[k + 1].imag();
    out.lhs += 0.5 * dt * (g0 + g1);
  }
  out.rhs = f(curve.xi.front().imag()) - f(curve.xi[end].imag());
  out.residual = std::abs(out.lhs - out.rhs);
  out.relative = out.residual / std::max(std::abs(out.rhs), 1e-300);
  return out;
}

double flow_consistency(const CharacteristicCurve& curve) {
  std::size_t end = 0;
  while (end + 1 < curve.size() && !curve.stopped[end + 1]) ++end;
  if (end == 0) return 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k <= end; ++k) {
    double derivative;
    if (k == 0) {
      derivative = (curve.xi[1].imag() - curve.xi[0].imag()) / (curve.t[1] - curve.t[0]);
    } else if (k == end) {
      derivative = (curve.xi[k].imag() - curve.xi[k - 1].imag()) / (curve.t[k] - curve.t[k - 1]);
    } else {
      derivative = (curve.xi[k + 1].imag() - curve.xi[k - 1].imag()) / (curve.t[k + 1] - curve.t[k - 1]);
    }
    worst = std::max(worst, std::abs(derivative + curve.trace[k].imag()));
  }
  return worst;
}

}  // namespace wigchar
