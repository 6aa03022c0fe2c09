// Acceptance suite: prints one PASS/FAIL line per criterion and exits with the
// number of failed criteria. `wigchar_acceptance 3 5` runs a subset.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wigchar/characteristics.hpp"
#include "wigchar/config.hpp"
#include "wigchar/density.hpp"
#include "wigchar/harness.hpp"
#include "wigchar/martingale.hpp"
#include "wigchar/report_io.hpp"
#include "wigchar/resolvent.hpp"
#include "wigchar/rng.hpp"
#include "wigchar/stats.hpp"

using namespace wigchar;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

DensitySpec mixture() { return DensitySpec::mixture({0.5, 0.5}, {std::sqrt(0.5), std::sqrt(1.5)}); }

Eigen::MatrixXd wigner(std::size_t n, std::uint64_t trial) {
  RandomStream s(StreamId{2024, trial, StreamPurpose::Auxiliary, 0});
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd h(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) h(i, j) = h(j, i) = s.normal() / std::sqrt(static_cast<double>(n));
  }
  return h;
}

// ---------------------------------------------------------------------------

Outcome c1_gaussian_collapse() {
  const auto start = Clock::now();
  const CalibratedDensity cd = calibrate(DensitySpec::standard_gaussian());
  double a_err = 0.0;
  for (int k = 0; k <= 4000; ++k) {
    const double h = -cd.h_max() + 2.0 * cd.h_max() * k / 4000.0;
    a_err = std::max(a_err, std::abs(cd.a(h) - 1.0));
  }
  PathConfig pc;
  pc.n = 60;
  pc.schedule = make_schedule({1e-3, 50, 0.1});
  pc.checkpoints = {pc.schedule[1], pc.schedule[25], 1.0};
  pc.seed = 11;
  const MatrixPath path = evolve(cd, pc);
  bool sigma_exact = !path.checkpoints.empty();
  double se = 0.0;
  for (const MatrixState& s : path.checkpoints) {
    sigma_exact = sigma_exact && (s.sigma.array() == 1.0 / 60.0).all();
    for (cplx z : {cplx(0.3, 0.05), cplx(-1.1, 0.5), cplx(0.0, 1.0)}) {
      se = std::max(se, self_energy_error(s.sigma, resolvent(s.h, z)).error);
      const SpectralResolvent sr(s.h, true);
      se = std::max(se, self_energy_error(s.sigma, sr.diagonal(z), z).error);
    }
  }
  const double elapsed = seconds_since(start);
  Outcome o;
  o.passed = a_err <= 1e-8 && sigma_exact && se == 0.0 && elapsed < 1.0;
  o.detail = "max|a-1| = " + fmt("%.2e", a_err) + ", sigma == 1/N " + (sigma_exact ? "exactly" : "NOT exact") +
             ", max self-energy error = " + fmt("%.1e", se) + ", " + fmt("%.2f", elapsed) + " s";
  return o;
}

Outcome c2_round_trip() {
  double worst_pdf = 0.0, worst_int = 0.0, worst_oracle = 0.0;
  for (const DensitySpec& spec : {DensitySpec::standard_gaussian(), mixture()}) {
    const CalibratedDensity cd = calibrate(spec);
    for (int k = 0; k <= 2000; ++k) {
      const double h = -cd.h_max() + 2.0 * cd.h_max() * k / 2000.0;
      worst_pdf = std::max(worst_pdf, std::abs(reconstruct_pdf(cd, h) - cd.pdf(h)));
    }
    worst_int = std::max(worst_int, std::abs(cd.integral_a_rho() - 1.0));
    // independent adaptive quadrature of a * rho
    const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double h) { return cd.a(h) * cd.pdf(h); }, -cd.h_max(), cd.h_max(), 15, 1e-13);
    worst_oracle = std::max(worst_oracle, std::abs(oracle - 1.0));
  }
  Outcome o;
  o.passed = worst_pdf <= 1e-5 && worst_int <= 1e-8 && worst_oracle <= 1e-8;
  o.detail = "sup|rho_rec - rho| = " + fmt("%.2e", worst_pdf) + ", |int a rho - 1| = " + fmt("%.2e", worst_int) +
             " (quadrature oracle " + fmt("%.2e", worst_oracle) + ")";
  return o;
}

Outcome c3_marginal_law() {
  const auto start = Clock::now();
  ExperimentConfig c;
  c.density = mixture();
  c.n_values = {200};
  c.trials = 1;
  c.seed = 3;
  c.schedule.steps = 2000;
  c.marginal_times = {0.25, 1.0};
  const MarginalReport r = run_marginal(c, calibrate(c.density));
  const double elapsed = seconds_since(start);
  bool ok = r.rows.size() == 2 && r.failures.failures.empty();
  std::string detail;
  for (const auto& row : r.rows) {
    ok = ok && row.pooled >= 20000 && row.p_value >= 0.01;
    detail += "t=" + fmt("%.2f", row.t) + ": D=" + fmt("%.4f", row.ks) + " p=" + fmt("%.3f", row.p_value) +
              " (" + std::to_string(row.pooled) + " samples); ";
  }
  ok = ok && elapsed < 120.0;
  detail += fmt("%.1f", elapsed) + " s";
  // Context only: how often the same test rejects across other seeds.
  std::size_t rejected = 0, tests = 0;
  for (std::uint64_t seed = 101; seed <= 120; ++seed) {
    c.seed = seed;
    for (const auto& row : run_marginal(c, calibrate(c.density)).rows) {
      ++tests;
      rejected += row.p_value < 0.01 ? 1 : 0;
    }
  }
  return {ok, detail + "; seeds 101-120: " + std::to_string(rejected) + " of " + std::to_string(tests) +
                  " tests rejected at 1%"};
}

Outcome c4_identities() {
  double ward = 0.0, minor = 0.0;
  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd h = wigner(100, trial);
    for (cplx z : {cplx(0.0, 0.1), cplx(1.3, 0.1), cplx(-0.7, 0.5), cplx(2.5, 1.0)}) {
      const ResolventSample g = resolvent(h, z);
      ward = std::max(ward, ward_check(g));
      for (std::size_t k : {std::size_t{0}, std::size_t{37}, std::size_t{99}}) {
        minor = std::max(minor, minor_resolvent(h, k, g).identity_relative);
      }
    }
  }
  double residual = 0.0;
  for (int a = 0; a < 40; ++a) {
    for (int b = 0; b < 25; ++b) {
      const cplx z(-5.0 + 10.0 * a / 39.0, std::pow(10.0, -4.0 + 5.0 * b / 24.0));
      const cplx m = msc(z);
      residual = std::max(residual, std::abs(m * m + z * m + 1.0));
    }
  }
  const double at_i = std::abs(msc(cplx(0.0, 1.0)) - cplx(0.0, 0.6180339887));
  Outcome o;
  o.passed = ward <= 1e-9 && minor <= 1e-9 && residual <= 1e-12 && at_i <= 1e-9;
  o.detail = "Ward " + fmt("%.1e", ward) + ", minor " + fmt("%.1e", minor) + ", m_sc residual " +
             fmt("%.1e", residual) + ", |m_sc(i) - 0.6180339887i| = " + fmt("%.1e", at_i);
  return o;
}

Outcome c5_stub() {
  const auto start = Clock::now();
  const auto checks = stub_verify();
  const double elapsed = seconds_since(start);
  bool ok = elapsed < 5.0;
  std::string failed;
  double worst = 0.0;
  for (const auto& c : checks) {
    ok = ok && c.passed;
    if (!c.passed) failed += " [" + c.name + "]";
    if (c.tolerance > 0.0) worst = std::max(worst, c.value / c.tolerance);
  }
  return {ok, std::to_string(checks.size()) + " closed-form checks, worst value/tolerance " + fmt("%.1e", worst) +
                  ", " + fmt("%.2f", elapsed) + " s" + (failed.empty() ? "" : ", failed:" + failed)};
}

Outcome c6_inverse_flow() {
  ExperimentConfig c;
  c.density = mixture();
  c.n_values = {500};
  c.trials = 10;
  c.seed = 6;
  c.schedule.steps = 100;
  c.domain.theta = 0.5;
  c.domain.im_values = {0.5};
  c.domain.re_points = 9;
  c.domain.flow_steps = 50;
  c.probe_times = {};
  const CharacteristicReport r = run_characteristic(c, calibrate(c.density));
  const double tol = 10.0 / std::sqrt(500.0 * std::pow(500.0, -0.5));
  std::size_t good = 0;
  double worst_rt = 0.0, worst_res = 0.0;
  for (const auto& o : r.observations) {
    if (o.roundtrip <= 1e-3 && o.map_residual <= tol) ++good;
    worst_rt = std::max(worst_rt, o.roundtrip);
    worst_res = std::max(worst_res, o.map_residual);
  }
  const double frac = r.observations.empty() ? 0.0 : static_cast<double>(good) / r.observations.size();
  Outcome o;
  o.passed = r.observations.size() == 90 && frac >= 0.95;
  o.detail = fmt("%.3f", frac) + " of " + std::to_string(r.observations.size()) +
             " (trial, z) pairs within both bounds; max roundtrip " + fmt("%.1e", worst_rt) + ", max |w + 1/w - z| " +
             fmt("%.3f", worst_res) + " (bound " + fmt("%.3f", tol) + ")";
  return o;
}

Outcome c7_constancy() {
  ExperimentConfig c;
  c.density = DensitySpec::standard_gaussian();
  c.n_values = {500};
  c.trials = 50;
  c.seed = 7;
  c.schedule.steps = 100;
  c.domain.theta = 0.5;
  c.domain.flow_steps = 50;
  c.probe_times = {};
  const CharacteristicReport r = run_characteristic(c, calibrate(c.density));
  const auto& p = r.per_n.front();
  Outcome o;
  o.passed = p.curves == 50 * 72 && p.drift_ratio_q95 <= 5.0 && p.contraction_violations == 0 && p.pairs > 0;
  o.detail = "q95 drift_sup*sqrt(N eta) = " + fmt("%.3f", p.drift_ratio_q95) + " (max " +
             fmt("%.3f", p.drift_ratio_max) + ") over " + std::to_string(p.curves) + " curves; contraction worst " +
             fmt("%.4f", p.contraction_worst) + ", " + std::to_string(p.contraction_violations) + " of " +
             std::to_string(p.pairs) + " pairs above 1.05";
  return o;
}

struct LscRuns {
  bool done = false;
  LscReport gaussian;
  LscReport mixed;
  double seconds = 0.0;
};

LscRuns& lsc_runs() {
  static LscRuns runs;
  if (runs.done) return runs;
  const auto start = Clock::now();
  ExperimentConfig c;
  c.n_values = {125, 250, 500, 1000};
  c.trials = 20;
  c.schedule.steps = 200;
  c.domain.theta = 0.5;
  c.seed = 9;
  c.density = mixture();
  c.lsc_self_energy = true;
  runs.mixed = run_lsc(c, calibrate(c.density));
  c.density = DensitySpec::standard_gaussian();
  c.lsc_self_energy = false;
  runs.gaussian = run_lsc(c, calibrate(c.density));
  runs.seconds = seconds_since(start);
  runs.done = true;
  return runs;
}

Outcome c8_self_energy() {
  const LscReport& r = lsc_runs().mixed;
  std::vector<const LscPerN*> per;
  for (const auto& p : r.per_n) {
    if (p.n >= 250) per.push_back(&p);
  }
  bool ok = per.size() == 3;
  std::string detail = "eps_hat(q95):";
  for (std::size_t k = 0; k < per.size(); ++k) {
    detail += " N=" + std::to_string(per[k]->n) + " " + fmt("%.4f", per[k]->epsilon_hat) + "+-" +
              fmt("%.4f", per[k]->epsilon_stderr);
    if (k + 1 < per.size()) {
      const double allowance =
          2.0 * std::hypot(per[k]->epsilon_stderr, per[k + 1]->epsilon_stderr);
      ok = ok && per[k + 1]->epsilon_hat <= per[k]->epsilon_hat + allowance;
    }
  }
  if (ok) ok = per.back()->epsilon_hat <= 0.3;
  return {ok, detail + "; non-increasing within 2 se and <= 0.3 at N=1000 required"};
}

Outcome c9_lsc_scaling() {
  LscRuns& runs = lsc_runs();
  const ScalingFit& g = runs.gaussian.fit;
  const ScalingFit& m = runs.mixed.fit;
  const bool in_band = std::abs(g.slope + 0.5) <= 0.15 && std::abs(m.slope + 0.5) <= 0.15;
  const bool agree = std::abs(g.slope - m.slope) <= 1.96 * std::hypot(g.stderr_slope, m.stderr_slope);
  Outcome o;
  o.passed = g.points == 4 && m.points == 4 && in_band && agree && runs.seconds <= 1800.0;
  o.detail = "slope vs N eta: gaussian " + fmt("%.3f", g.slope) + "+-" + fmt("%.3f", g.stderr_slope) + ", mixture " +
             fmt("%.3f", m.slope) + "+-" + fmt("%.3f", m.stderr_slope) + "; pooled over Im levels: gaussian " +
             fmt("%.3f", runs.gaussian.pooled_fit.slope) + ", mixture " + fmt("%.3f", runs.mixed.pooled_fit.slope) +
             "; " + fmt("%.0f", runs.seconds) + " s";
  return o;
}

Outcome c10_entrywise() {
  ExperimentConfig c;
  c.density = DensitySpec::standard_gaussian();
  c.n_values = {500};
  c.trials = 20;
  c.seed = 10;
  c.schedule.steps = 100;
  c.domain.theta = 0.5;
  const EntrywiseReport r = run_entrywise_experiment(c, calibrate(c.density));
  const auto& p = r.per_n.front();
  Outcome o;
  o.passed = p.diag_fit.points >= 3 && std::abs(p.diag_fit.slope + 0.5) <= 0.2 &&
             std::abs(p.offdiag_fit.slope + 0.5) <= 0.2;
  o.detail = "slopes vs N Im z: diagonal " + fmt("%.3f", p.diag_fit.slope) + "+-" +
             fmt("%.3f", p.diag_fit.stderr_slope) + ", off-diagonal " + fmt("%.3f", p.offdiag_fit.slope) + "+-" +
             fmt("%.3f", p.offdiag_fit.stderr_slope) + " (after dividing by |m_sc|^2: " +
             fmt("%.3f", p.diag_fit_msc.slope) + ", " + fmt("%.3f", p.offdiag_fit_msc.slope) + ")";
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome c11_determinism() {
  ExperimentConfig c;
  c.density = mixture();
  c.n_values = {40, 64};
  c.trials = 4;
  c.seed = 123;
  c.schedule.steps = 60;
  c.domain.im_levels = 3;
  c.domain.re_points = 4;
  c.domain.flow_steps = 20;
  c.marginal_times = {0.5, 1.0};
  c.marginal_step_counts = {30};
  const CalibratedDensity cd = calibrate(c.density);
  const fs::path root = fs::temp_directory_path() / "wigchar-acceptance-determinism";
  fs::remove_all(root);
  std::vector<fs::path> dirs;
  for (std::size_t threads : {1u, 3u, 1u}) {
    const fs::path dir = root / std::to_string(dirs.size());
    fs::create_directories(dir);
    RunOptions opt;
    opt.threads = threads;
    write_outputs(run_lsc(c, cd, opt), c, dir.string());
    write_outputs(run_characteristic(c, cd, opt), c, dir.string());
    write_outputs(run_marginal(c, cd, opt), c, dir.string());
    write_outputs(run_entrywise_experiment(c, cd, opt), c, dir.string());
    dirs.push_back(dir);
  }
  std::size_t compared = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(dirs[0])) {
    if (entry.path().extension() != ".csv") continue;
    const std::string ref = slurp(entry.path());
    for (std::size_t k = 1; k < dirs.size(); ++k) {
      ++compared;
      if (slurp(dirs[k] / entry.path().filename()) != ref) ++differing;
    }
  }
  fs::remove_all(root);
  return {compared >= 16 && differing == 0,
          std::to_string(compared) + " CSV comparisons across pool sizes {1, 3, 1}, " + std::to_string(differing) +
              " differing"};
}

}  // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"Gaussian collapse", c1_gaussian_collapse},
      {"Density round trip", c2_round_trip},
      {"Marginal law", c3_marginal_law},
      {"Exact identities", c4_identities},
      {"Stub-flow closed forms", c5_stub},
      {"Inverse flow on real paths", c6_inverse_flow},
      {"Constancy along characteristics", c7_constancy},
      {"Self-energy concentration", c8_self_energy},
      {"Local semicircle law scaling", c9_lsc_scaling},
      {"Entrywise bounds", c10_entrywise},
      {"Determinism", c11_determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k + 1);
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.passed) ++failures;
    std::printf("[%s] C%d %s: %s\n", o.passed ? "PASS" : "FAIL", id, criteria[k].first, o.detail.c_str());
  }
  return failures;
}
