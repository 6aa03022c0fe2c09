#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "wigchar/characteristics.hpp"
#include "wigchar/error.hpp"
#include "wigchar/martingale.hpp"
#include "wigchar/resolvent.hpp"
#include "wigchar/rng.hpp"

using namespace wigchar;

namespace {

Eigen::MatrixXd wigner(std::size_t n, std::uint64_t trial) {
  RandomStream s(StreamId{11, trial, StreamPurpose::Auxiliary, 0});
  Eigen::MatrixXd h(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i <= j; ++i) h(i, j) = h(j, i) = s.normal() / std::sqrt(static_cast<double>(n));
  }
  return h;
}

Eigen::MatrixXd random_sigma(std::size_t n) {
  RandomStream s(StreamId{12, 0, StreamPurpose::Auxiliary, 0});
  Eigen::MatrixXd sigma(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i <= j; ++i) sigma(i, j) = sigma(j, i) = (0.5 + s.uniform()) / static_cast<double>(n);
  }
  return sigma;
}

const std::vector<cplx> kPoints = {{0.0, 0.1}, {1.3, 0.1}, {-0.7, 0.5}, {2.5, 1.0}, {0.2, 3.0}};

}  // namespace

TEST(Resolvent, TwoByTwoClosedForm) {
  Eigen::MatrixXd h(2, 2);
  h << 0.3, 0.7, 0.7, -0.4;
  const cplx z(0.1, 0.2);
  const cplx a = 0.3 - z, d = -0.4 - z, b = 0.7;
  const cplx det = a * d - b * b;
  const ResolventSample g = resolvent(h, z);
  EXPECT_LT(std::abs(g.g(0, 0) - d / det), 1e-14);
  EXPECT_LT(std::abs(g.g(1, 1) - a / det), 1e-14);
  EXPECT_LT(std::abs(g.g(0, 1) + b / det), 1e-14);
  EXPECT_LT(std::abs(g.trace_mean - 0.5 * (a + d) / det), 1e-14);
}

TEST(Resolvent, DirectSolveAgreesWithSpectral) {
  const Eigen::MatrixXd h = wigner(80, 0);
  const SpectralResolvent spectral(h);
  for (cplx z : kPoints) {
    const ResolventSample direct = resolvent(h, z);
    const ResolventSample eig = spectral.sample(z);
    EXPECT_LE((direct.g - eig.g).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((direct.g.diagonal() - spectral.diagonal(z)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(std::abs(direct.trace_mean - spectral.trace_mean(z)), 1e-12);
    EXPECT_LE(resolvent_residual(h, direct), 1e-12);
  }
}

TEST(Resolvent, TraceFromEigenvaluesScale) {
  const Eigen::VectorXd ev = (Eigen::VectorXd(3) << -1.0, 0.5, 2.0).finished();
  const cplx z(0.3, 0.4);
  cplx expect = 0.0;
  for (double l : {-1.0, 0.5, 2.0}) expect += 1.0 / (1.5 * l - z);
  EXPECT_LT(std::abs(trace_mean_from_eigenvalues(ev, z, 1.5) - expect / 3.0), 1e-15);
}

TEST(Resolvent, LowerHalfPlaneIsRejected) {
  const Eigen::MatrixXd h = wigner(5, 0);
  EXPECT_THROW(resolvent(h, cplx(0.0, 0.0)), Error);
  EXPECT_THROW(resolvent(h, cplx(0.0, -1.0)), Error);
}

TEST(Resolvent, WardIdentity) {
  for (std::uint64_t trial = 0; trial < 3; ++trial) {
    const Eigen::MatrixXd h = wigner(100, trial);
    for (cplx z : kPoints) EXPECT_LE(ward_check(resolvent(h, z)), 1e-9);
  }
}

TEST(Resolvent, MinorIdentity) {
  const Eigen::MatrixXd h = wigner(60, 1);
  for (cplx z : kPoints) {
    for (std::size_t k : {0u, 17u, 59u}) {
      const MinorResult m = minor_resolvent(h, k, z);
      EXPECT_LE(m.identity_relative, 1e-9);
      // Interlacing bounds |Tr G - Tr G^k| by pi / Im z; the 1/(N-1) vs 1/N normalization adds at most 1/(N Im z).
      EXPECT_LE(m.trace_gap, (M_PI + 1.0) / (60.0 * z.imag()) + 1e-12);
    }
  }
  EXPECT_THROW(minor_resolvent(h, 60, cplx(0, 1)), Error);
}

TEST(Resolvent, SemicircleSelfConsistencyImprovesWithN) {
  double small = 0.0, large = 0.0;
  for (std::uint64_t trial = 0; trial < 3; ++trial) {
    small += self_consistent_residual(resolvent(wigner(50, trial), cplx(0.3, 0.5)));
    large += self_consistent_residual(resolvent(wigner(400, trial), cplx(0.3, 0.5)));
  }
  EXPECT_LT(large, small);
  EXPECT_LT(std::abs(SpectralResolvent(wigner(400, 0), false).trace_mean(cplx(0.3, 0.5)) - msc(cplx(0.3, 0.5))),
            0.05);
}

TEST(Operators, SMatchesDefinition) {
  const std::size_t n = 9;
  const Eigen::MatrixXd sigma = random_sigma(n);
  const ResolventSample g = resolvent(wigner(n, 2), cplx(0.1, 0.3));
  const Eigen::VectorXcd s = s_op(sigma, g.g);
  for (std::size_t i = 0; i < n; ++i) {
    cplx expect = 0.0;
    for (std::size_t k = 0; k < n; ++k) expect += sigma(i, k) * g.g(k, k);
    EXPECT_LT(std::abs(s(i) - expect), 1e-15);
  }
  EXPECT_EQ(s, s_op_diagonal(sigma, g.g.diagonal()));
  EXPECT_THROW(s_op(random_sigma(3), g.g), Error);
}

TEST(Operators, TMatchesDefinition) {
  const std::size_t n = 7;
  const Eigen::MatrixXd sigma = random_sigma(n);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(n, n);
  const Eigen::MatrixXcd t = t_op(sigma, a);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const cplx expect = i == j ? cplx(0.0) : sigma(i, j) * a(j, i);
      EXPECT_EQ(t(i, j), expect);
    }
  }
}

TEST(SelfEnergy, ConstantProfileGivesExactZero) {
  const std::size_t n = 50;
  const Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  const Eigen::MatrixXd h = wigner(n, 3);
  for (cplx z : kPoints) {
    const SelfEnergyError direct = self_energy_error(sigma, resolvent(h, z));
    EXPECT_EQ(direct.error, 0.0);
    EXPECT_EQ(direct.ratio, 0.0);
    const SpectralResolvent spectral(h);
    EXPECT_EQ(self_energy_error(sigma, spectral.diagonal(z), z).error, 0.0);
  }
}

TEST(SelfEnergy, NormalizerAndRatio) {
  const std::size_t n = 30;
  const Eigen::MatrixXd sigma = random_sigma(n);
  const cplx z(0.4, 0.2);
  const ResolventSample g = resolvent(wigner(n, 4), z);
  const SelfEnergyError e = self_energy_error(sigma, g);
  double worst = 0.0;
  const Eigen::VectorXcd s = s_op(sigma, g.g);
  for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(s(k) - g.trace_mean));
  EXPECT_DOUBLE_EQ(e.error, worst);
  EXPECT_NEAR(e.normalizer, std::sqrt((1.0 + g.trace_mean.imag()) / (n * z.imag())), 1e-15);
  EXPECT_NEAR(e.ratio, e.error / e.normalizer, 1e-15);
}

TEST(SelfEnergy, GaussianPathIsExactlyZero) {
  const CalibratedDensity cd = calibrate(DensitySpec::standard_gaussian());
  PathConfig pc;
  pc.n = 40;
  ScheduleSpec s;
  s.steps = 20;
  pc.schedule = make_schedule(s);
  pc.checkpoints = {pc.schedule[3], 1.0};
  for (const MatrixState& state : evolve(cd, pc).checkpoints) {
    EXPECT_EQ(self_energy_error(state.sigma, resolvent(state.h, cplx(0.2, 0.3))).error, 0.0);
  }
}
