#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace wigchar {

using cplx = std::complex<double>;

/// G = (H - z)^{-1} at one spectral parameter, with its normalised trace.
struct ResolventSample {
  cplx z;
  Eigen::MatrixXcd g;
  cplx trace_mean;

  std::size_t n() const { return static_cast<std::size_t>(g.rows()); }
};

/// N^{-1} sum_i d_i, summed in index order. Every trace mean and every row of
/// the self-energy operator goes through the same kernel, so that S[sigma, G]
/// and <G> agree bit-for-bit when sigma is constant.
cplx normalized_trace(const Eigen::VectorXcd& diagonal);

/// Direct dense solve of (H - z) G = I. Throws SolveFailure if the result is
/// not finite or fails a residual spot check, InvalidConfig if Im z <= 0.
ResolventSample resolvent(const Eigen::MatrixXd& h, cplx z);

/// max_ij |((H - z) G - I)_ij|.
double resolvent_residual(const Eigen::MatrixXd& h, const ResolventSample& sample);

/// N^{-1} sum_k 1 / (scale * lambda_k - z) from a spectrum alone.
cplx trace_mean_from_eigenvalues(const Eigen::VectorXd& eigenvalues, cplx z, double scale = 1.0);

/// Eigendecomposition of H reused across many spectral parameters.
class SpectralResolvent {
 public:
  SpectralResolvent() = default;
  /// `with_vectors = false` supports only `trace_mean`.
  explicit SpectralResolvent(const Eigen::MatrixXd& h, bool with_vectors = true);

  std::size_t n() const { return static_cast<std::size_t>(eigenvalues_.size()); }
  bool has_vectors() const { return has_vectors_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

  /// N^{-1} sum_k 1 / (lambda_k - z).
  cplx trace_mean(cplx z) const;
  /// G_ii = sum_k U_ik^2 / (lambda_k - z); O(N^2).
  Eigen::VectorXcd diagonal(cplx z) const;
  /// Full G = U diag(1 / (lambda - z)) U^T; O(N^3).
  ResolventSample sample(cplx z) const;

 private:
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd vectors_;
  Eigen::MatrixXd squared_;  // U_ik^2
  bool has_vectors_ = false;
};

/// Diagonal of S[sigma, A]: (S[A])_ii = sum_k sigma_ik A_kk. Throws DimensionMismatch.
Eigen::VectorXcd s_op(const Eigen::MatrixXd& sigma, const Eigen::MatrixXcd& a);
/// Same, from the diagonal of A alone.
Eigen::VectorXcd s_op_diagonal(const Eigen::MatrixXd& sigma, const Eigen::VectorXcd& a_diagonal);

/// T[sigma, A]_ij = (1 - delta_ij) sigma_ij A_ji. Throws DimensionMismatch.
Eigen::MatrixXcd t_op(const Eigen::MatrixXd& sigma, const Eigen::MatrixXcd& a);

struct SelfEnergyError {
  double error = 0.0;       ///< max_k |S[sigma, G]_kk - <G>|
  double normalizer = 0.0;  ///< sqrt((1 + Im <G>) / (N Im z))
  double ratio = 0.0;
};

SelfEnergyError self_energy_error(const Eigen::MatrixXd& sigma, const ResolventSample& sample);
/// Same statistic from the diagonal of G only.
SelfEnergyError self_energy_error(const Eigen::MatrixXd& sigma, const Eigen::VectorXcd& g_diagonal, cplx z);

struct MinorResult {
  ResolventSample g_minor;
  double identity_residual = 0.0;  ///< max_{j != k} |G_jj - G^k_jj - G_kj G_jk / G_kk|
  double identity_relative = 0.0;  ///< identity_residual / max_j |G_jj|
  double trace_gap = 0.0;          ///< |<G^k> - <G>|
};

/// Resolvent of H^k (row and column k zeroed) and the minor identity check.
/// Throws DivisionHazard if |G_kk| is numerically zero, OutOfRange for a bad k.
MinorResult minor_resolvent(const Eigen::MatrixXd& h, std::size_t k, cplx z);
MinorResult minor_resolvent(const Eigen::MatrixXd& h, std::size_t k, const ResolventSample& full);

/// max_i |sum_j |G_ij|^2 - Im G_ii / Im z| / (Im G_ii / Im z).
double ward_check(const ResolventSample& sample);

/// N^{-1} || I + (z + <G>) G ||_F.
double self_consistent_residual(const ResolventSample& sample);

}  // namespace wigchar
