#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wigchar/characteristics.hpp"
#include "wigchar/config.hpp"
#include "wigchar/density.hpp"
#include "wigchar/stats.hpp"

namespace wigchar {

struct RunOptions {
  /// Worker threads; 0 selects the available hardware parallelism.
  std::size_t threads = 1;
};

/// Trial identifier used for stream derivation: (N << 32) | trial, so that
/// trials of different N never share streams.
std::uint64_t trial_key(std::size_t n, std::size_t trial);

struct TrialFailure {
  std::size_t n = 0;
  std::size_t trial = 0;
  std::string kind;
  std::string message;
};

struct FailureSummary {
  std::size_t attempted = 0;
  std::vector<TrialFailure> failures;

  double fraction() const {
    return attempted == 0 ? 0.0 : static_cast<double>(failures.size()) / static_cast<double>(attempted);
  }
};

/// The z-grid configured by `params` (explicit Im values if given).
std::vector<cplx> z_grid(const SpectralDomain& dom, const DomainParams& params);
SpectralDomain make_domain(std::size_t n, const DomainParams& params);

// ---------------------------------------------------------------------------
// Local semicircle law

struct LscObservation {
  std::size_t n = 0;
  std::size_t trial = 0;
  cplx z;
  double error = 0.0;              ///< |<G(1, z)> - m_sc(z)|
  double normalizer = 0.0;         ///< (N Im z)^{-1/2}
  double self_energy_ratio = 0.0;  ///< self-energy ratio at t = 1 (NaN if not measured)
};

struct LscPerN {
  std::size_t n = 0;
  double eta = 0.0;
  double n_eta = 0.0;
  std::size_t trials_ok = 0;
  std::vector<double> sup_error;  ///< per trial, sup over the z-grid
  double median_sup = 0.0;
  double q05_sup = 0.0;
  double q95_sup = 0.0;
  double median_error_im1 = 0.0;  ///< median error at the largest Im level
  std::vector<double> self_energy_sup;  ///< per trial, sup over the z-grid
  double self_energy_q95 = 0.0;
  double epsilon_hat = 0.0;
  double epsilon_stderr = 0.0;
};

struct LscReport {
  std::vector<LscObservation> observations;
  std::vector<LscPerN> per_n;
  /// log(median sup error) against log(N eta); points = 0 when fewer than 3 N.
  ScalingFit fit;
  /// log(median over trials of max-over-Re error) against log(N Im z), all (N, Im) cells.
  ScalingFit pooled_fit;
  FailureSummary failures;
};

LscReport run_lsc(const ExperimentConfig& config, const CalibratedDensity& density, const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Entrywise resolvent bounds

struct EntrywisePoint {
  cplx z;
  double diag_err = 0.0;     ///< max_k |G_kk - m_sc|
  double offdiag = 0.0;      ///< max_{j != k} |G_jk|
  double schur = 0.0;        ///< max_k |1/G_kk + z + m_sc|
  double schur_ratio = 0.0;  ///< schur / sqrt((1 + Im m_sc) / (N Im z))
  double trace_err = 0.0;    ///< |<G> - m_sc|
};

struct EntrywiseResult {
  double max_diag_err = 0.0;
  double max_offdiag = 0.0;
  double max_schur_residual = 0.0;  ///< max of schur_ratio
  std::vector<EntrywisePoint> points;
};

EntrywiseResult run_entrywise(const Eigen::MatrixXd& h1, const SpectralDomain& dom, std::span<const cplx> zs);
EntrywiseResult run_entrywise(const Eigen::MatrixXd& h1, const SpectralDomain& dom);

struct EntrywiseObservation {
  std::size_t n = 0;
  std::size_t trial = 0;
  EntrywisePoint point;
};

struct EntrywisePerN {
  std::size_t n = 0;
  double eta = 0.0;
  /// Fits of median-over-trials (max over Re) against N Im z across Im levels.
  ScalingFit diag_fit;
  ScalingFit offdiag_fit;
  /// Same fits with every point divided by |m_sc(z)|^2 first.
  ScalingFit diag_fit_msc;
  ScalingFit offdiag_fit_msc;
  double offdiag_scaled_q95 = 0.0;  ///< q95 over (trial, z) of offdiag * sqrt(N Im z)
  double schur_ratio_q95 = 0.0;
  double diag_to_trace_median = 0.0;
};

struct EntrywiseReport {
  std::vector<EntrywiseObservation> observations;
  std::vector<EntrywisePerN> per_n;
  FailureSummary failures;
};

EntrywiseReport run_entrywise_experiment(const ExperimentConfig& config, const CalibratedDensity& density,
                                         const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Marginal law

struct MarginalRow {
  std::size_t steps = 0;
  std::size_t n = 0;
  double t = 0.0;
  std::size_t pooled = 0;
  double ks = 0.0;
  double p_value = 0.0;
  std::size_t clamp_count = 0;
};

struct MarginalReport {
  std::vector<MarginalRow> rows;
  FailureSummary failures;
};

MarginalReport run_marginal(const ExperimentConfig& config, const CalibratedDensity& density,
                            const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Characteristics

struct CharacteristicObservation {
  std::size_t n = 0;
  std::size_t trial = 0;
  cplx z;
  cplx w;
  double map_residual = 0.0;
  double roundtrip = 0.0;
  bool in_d0 = false;
  bool outside_delta = false;
  double drift_sup = 0.0;
  double drift_ratio = 0.0;
  double tau = 0.0;
  double tau_prime = 0.0;
  bool stopped = false;
  double self_energy_ratio = 0.0;  ///< max over probe times (NaN if none)
};

struct ContractionObservation {
  std::size_t n = 0;
  std::size_t trial = 0;
  std::size_t first = 0;   ///< z-grid indices of the pair
  std::size_t second = 0;
  double worst_ratio = 0.0;
};

struct CharacteristicPerN {
  std::size_t n = 0;
  double eta = 0.0;
  std::size_t curves = 0;
  double drift_ratio_q95 = 0.0;
  double drift_ratio_max = 0.0;
  double map_ok_fraction = 0.0;        ///< residual <= 10 (N eta)^{-1/2}
  double roundtrip_ok_fraction = 0.0;  ///< roundtrip <= 1e-3
  double roundtrip_max = 0.0;
  std::size_t in_d0 = 0;
  std::size_t outside_delta = 0;
  std::size_t pairs = 0;
  double contraction_worst = 0.0;
  std::size_t contraction_violations = 0;  ///< worst ratio > 1.05
  double self_energy_q95 = 0.0;
  double epsilon_hat = 0.0;
};

struct CurveRecord {
  std::size_t n = 0;
  std::size_t trial = 0;
  std::size_t z_index = 0;
  CharacteristicCurve curve;
};

struct CharacteristicReport {
  std::vector<CharacteristicObservation> observations;
  std::vector<ContractionObservation> contractions;
  std::vector<CharacteristicPerN> per_n;
  std::vector<CurveRecord> curves;  ///< only when config.write_curves
  FailureSummary failures;
};

CharacteristicReport run_characteristic(const ExperimentConfig& config, const CalibratedDensity& density,
                                        const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Frozen-semicircle self-checks

struct StubCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct StubVerifyOptions {
  std::size_t steps = 200;
  /// Fault injection: replaces m_sc by its conjugate-branch root.
  bool flip_msc_branch = false;
};

/// Closed-form checks under the frozen-semicircle drift: gamma = zeta + t/zeta,
/// lambda(1, z) = -1/m_sc(z), conservation of <R>, the contraction bound,
/// the integration trick and m_sc residuals/branch.
std::vector<StubCheck> stub_verify(const StubVerifyOptions& options = {});

}  // namespace wigchar
