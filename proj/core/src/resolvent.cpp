#include "wigchar/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wigchar/error.hpp"

namespace wigchar {
namespace {

// Shared summation kernel; kept out of line so every caller runs identical code.
[[gnu::noinline]] cplx weighted_sum(const cplx* values, const double* weights, Eigen::Index n) {
  double re = 0.0;
  double im = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    re += values[i].real() * weights[i];
    im += values[i].imag() * weights[i];
  }
  return {re, im};
}

void require_upper_half_plane(cplx z) {
  if (!(z.imag() > 0.0)) throw Error(ErrorKind::InvalidConfig, "spectral parameter needs Im z > 0");
}

void require_square(const Eigen::MatrixXd& sigma, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (sigma.rows() != sigma.cols() || sigma.rows() != rows || rows != cols) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": sigma is " + std::to_string(sigma.rows()) + "x" +
                                                  std::to_string(sigma.cols()) + ", argument is " +
                                                  std::to_string(rows) + "x" + std::to_string(cols));
  }
}

}  // namespace

cplx normalized_trace(const Eigen::VectorXcd& diagonal) {
  const Eigen::Index n = diagonal.size();
  if (n == 0) return {0.0, 0.0};
  const Eigen::VectorXd weights = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  return weighted_sum(diagonal.data(), weights.data(), n);
}

ResolventSample resolvent(const Eigen::MatrixXd& h, cplx z) {
  require_upper_half_plane(z);
  if (h.rows() != h.cols()) throw Error(ErrorKind::DimensionMismatch, "resolvent needs a square matrix");
  const Eigen::Index n = h.rows();
  Eigen::MatrixXcd shifted = h.cast<cplx>();
  shifted.diagonal().array() -= z;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
  ResolventSample out;
  out.z = z;
  out.g = lu.inverse();
  if (!out.g.allFinite()) throw Error(ErrorKind::SolveFailure, "resolvent is not finite");
  // Spot check on the first and last columns; O(N^2).
  const double tol = 1e-8 * (1.0 + 1.0 / z.imag()) * (1.0 + h.cwiseAbs().rowwise().sum().maxCoeff() + std::abs(z));
  for (Eigen::Index c : {Eigen::Index{0}, n - 1}) {
    Eigen::VectorXcd r = shifted * out.g.col(c);
    r(c) -= 1.0;
    if (r.cwiseAbs().maxCoeff() > tol) {
      throw Error(ErrorKind::SolveFailure, "resolvent residual " + std::to_string(r.cwiseAbs().maxCoeff()) +
                                               " exceeds " + std::to_string(tol));
    }
  }
  out.trace_mean = normalized_trace(out.g.diagonal());
  return out;
}

double resolvent_residual(const Eigen::MatrixXd& h, const ResolventSample& sample) {
  Eigen::MatrixXcd shifted = h.cast<cplx>();
  shifted.diagonal().array() -= sample.z;
  Eigen::MatrixXcd r = shifted * sample.g;
  r.diagonal().array() -= 1.0;
  return r.cwiseAbs().maxCoeff();
}

SpectralResolvent::SpectralResolvent(const Eigen::MatrixXd& h, bool with_vectors) : has_vectors_(with_vectors) {
  if (h.rows() != h.cols()) throw Error(ErrorKind::DimensionMismatch, "eigendecomposition needs a square matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, with_vectors ? Eigen::ComputeEigenvectors
                                                                        : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::SolveFailure, "eigendecomposition did not converge");
  eigenvalues_ = solver.eigenvalues();
  if (with_vectors) {
    vectors_ = solver.eigenvectors();
    squared_ = vectors_.array().square().matrix();
  }
}

cplx trace_mean_from_eigenvalues(const Eigen::VectorXd& eigenvalues, cplx z, double scale) {
  require_upper_half_plane(z);
  const Eigen::Index n = eigenvalues.size();
  double re = 0.0;
  double im = 0.0;
  const double dy = -z.imag();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double dx = scale * eigenvalues(k) - z.real();
    const double inv = 1.0 / (dx * dx + dy * dy);
    re += dx * inv;
    im -= dy * inv;
  }
  const double norm = 1.0 / static_cast<double>(n);
  return {re * norm, im * norm};
}

cplx SpectralResolvent::trace_mean(cplx z) const { return trace_mean_from_eigenvalues(eigenvalues_, z); }

Eigen::VectorXcd SpectralResolvent::diagonal(cplx z) const {
  require_upper_half_plane(z);
  if (!has_vectors_) throw Error(ErrorKind::InvalidConfig, "diagonal of G needs eigenvectors");
  const Eigen::Index n = eigenvalues_.size();
  Eigen::VectorXd wr(n), wi(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const cplx w = 1.0 / (eigenvalues_(k) - z);
    wr(k) = w.real();
    wi(k) = w.imag();
  }
  const Eigen::VectorXd re = squared_ * wr;
  const Eigen::VectorXd im = squared_ * wi;
  Eigen::VectorXcd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = cplx(re(i), im(i));
  return out;
}

ResolventSample SpectralResolvent::sample(cplx z) const {
  require_upper_half_plane(z);
  if (!has_vectors_) throw Error(ErrorKind::InvalidConfig, "full resolvent needs eigenvectors");
  const Eigen::Index n = eigenvalues_.size();
  Eigen::VectorXd wr(n), wi(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const cplx w = 1.0 / (eigenvalues_(k) - z);
    wr(k) = w.real();
    wi(k) = w.imag();
  }
  const Eigen::MatrixXd re = (vectors_ * wr.asDiagonal()) * vectors_.transpose();
  const Eigen::MatrixXd im = (vectors_ * wi.asDiagonal()) * vectors_.transpose();
  ResolventSample out;
  out.z = z;
  out.g.resize(n, n);
  out.g.real() = re;
  out.g.imag() = im;
  out.trace_mean = normalized_trace(out.g.diagonal());
  return out;
}

Eigen::VectorXcd s_op_diagonal(const Eigen::MatrixXd& sigma, const Eigen::VectorXcd& a_diagonal) {
  require_square(sigma, a_diagonal.size(), a_diagonal.size(), "s_op");
  const Eigen::Index n = a_diagonal.size();
  Eigen::VectorXcd out(n);
  // sigma is symmetric, so column i is row i and is contiguous.
  for (Eigen::Index i = 0; i < n; ++i) out(i) = weighted_sum(a_diagonal.data(), sigma.col(i).data(), n);
  return out;
}

Eigen::VectorXcd s_op(const Eigen::MatrixXd& sigma, const Eigen::MatrixXcd& a) {
  require_square(sigma, a.rows(), a.cols(), "s_op");
  return s_op_diagonal(sigma, a.diagonal());
}

Eigen::MatrixXcd t_op(const Eigen::MatrixXd& sigma, const Eigen::MatrixXcd& a) {
  require_square(sigma, a.rows(), a.cols(), "t_op");
  const Eigen::Index n = a.rows();
  Eigen::MatrixXcd out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = i == j ? cplx(0.0, 0.0) : sigma(i, j) * a(j, i);
  }
  return out;
}

SelfEnergyError self_energy_error(const Eigen::MatrixXd& sigma, const Eigen::VectorXcd& g_diagonal, cplx z) {
  require_upper_half_plane(z);
  const Eigen::VectorXcd s = s_op_diagonal(sigma, g_diagonal);
  const cplx mean = normalized_trace(g_diagonal);
  SelfEnergyError out;
  for (Eigen::Index k = 0; k < s.size(); ++k) out.error = std::max(out.error, std::abs(s(k) - mean));
  const double n = static_cast<double>(g_diagonal.size());
  out.normalizer = std::sqrt((1.0 + mean.imag()) / (n * z.imag()));
  out.ratio = out.error / out.normalizer;
  return out;
}

SelfEnergyError self_energy_error(const Eigen::MatrixXd& sigma, const ResolventSample& sample) {
  return self_energy_error(sigma, sample.g.diagonal(), sample.z);
}

MinorResult minor_resolvent(const Eigen::MatrixXd& h, std::size_t k, const ResolventSample& full) {
  const auto n = static_cast<std::size_t>(h.rows());
  if (k >= n) throw Error(ErrorKind::OutOfRange, "minor index " + std::to_string(k) + " out of range");
  if (full.n() != n) throw Error(ErrorKind::DimensionMismatch, "full resolvent does not match H");
  const auto kk = static_cast<Eigen::Index>(k);
  const cplx gkk = full.g(kk, kk);
  if (!(std::abs(gkk) > 1e-14) || !std::isfinite(std::abs(gkk))) {
    throw Error(ErrorKind::DivisionHazard, "|G_kk| = " + std::to_string(std::abs(gkk)) + " at k = " + std::to_string(k));
  }
  Eigen::MatrixXd hk = h;
  hk.row(kk).setZero();
  hk.col(kk).setZero();
  MinorResult out;
  out.g_minor = resolvent(hk, full.z);
  double scale = 0.0;
  for (Eigen::Index j = 0; j < h.rows(); ++j) {
    scale = std::max(scale, std::abs(full.g(j, j)));
    if (j == kk) continue;
    const cplx predicted = out.g_minor.g(j, j) + full.g(kk, j) * full.g(j, kk) / gkk;
    out.identity_residual = std::max(out.identity_residual, std::abs(full.g(j, j) - predicted));
  }
  out.identity_relative = scale > 0.0 ? out.identity_residual / scale : out.identity_residual;
  out.trace_gap = std::abs(out.g_minor.trace_mean - full.trace_mean);
  return out;
}

MinorResult minor_resolvent(const Eigen::MatrixXd& h, std::size_t k, cplx z) {
  return minor_resolvent(h, k, resolvent(h, z));
}

double ward_check(const ResolventSample& sample) {
  const double eta = sample.z.imag();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < sample.g.rows(); ++i) {
    const double lhs = sample.g.col(i).squaredNorm();
    const double rhs = sample.g(i, i).imag() / eta;
    worst = std::max(worst, std::abs(lhs - rhs) / rhs);
  }
  return worst;
}

double self_consistent_residual(const ResolventSample& sample) {
  Eigen::MatrixXcd m = (sample.z + sample.trace_mean) * sample.g;
  m.diagonal().array() += 1.0;
  return m.norm() / static_cast<double>(sample.g.rows());
}

}  // namespace wigchar
