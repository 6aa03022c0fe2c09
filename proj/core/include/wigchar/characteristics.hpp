#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "wigchar/martingale.hpp"
#include "wigchar/resolvent.hpp"

namespace wigchar {

/// Stieltjes transform of the semicircle law: the root of m^2 + z m + 1 = 0
/// with Im m >= 0 (m ~ -1/z at infinity). Real z gives the boundary limit
/// from the upper half plane.
cplx msc(cplx z);

/// Bulk spectral domains for a given N.
struct SpectralDomain {
  double kappa = 0.5;
  double w1 = -1.0;
  double w2 = 1.0;
  double theta = 0.5;
  std::size_t n = 0;
  double eta = 0.0;    ///< N^{theta - 1}
  double delta = 0.0;  ///< largest delta with 1/(2 delta) - 2 delta >= 1 + sup_{z in D} |z|

  /// Throws InvalidConfig unless 0 < theta < 1, kappa > 0 and W lies in [-2 + kappa, 2 - kappa].
  static SpectralDomain make(std::size_t n, double theta, double w1, double w2, double kappa);

  double sup_abs_d() const;
  /// D = W + i(eta, 1); the closed grid endpoints Im z in {eta, 1} are admitted.
  bool in_d(cplx z) const;
  /// D0 = (W1 - 2/eta, W2 + 2/eta) + i(eta/2, 1 + 2/eta), minus the closed disc |z| <= delta.
  bool in_d0(cplx z) const;
  /// D' = (W1 - 3/eta, W2 + 3/eta) + i(eta/4, 1 + 3/eta).
  bool in_dprime(cplx z) const;
};

/// Log-spaced Im z from eta to 1 (im_levels values) times uniformly spaced
/// Re z across W (re_points values). Ordered by Im level, then Re.
std::vector<cplx> z_grid(const SpectralDomain& dom, std::size_t im_levels = 8, std::size_t re_points = 9);

/// (t, w) -> <G(t, w)> for Im w > 0, t in [0, 1].
using TraceMeanFn = std::function<cplx(double t, cplx w)>;

/// Frozen-semicircle drift: the root of t m^2 + w m + 1 = 0 with Im m > 0,
/// i.e. m_sc(w / sqrt t) / sqrt t, and -1/w at t = 0.
cplx stub_trace_mean(double t, cplx w);
TraceMeanFn semicircle_stub();

/// Uniform grid 0, 1/steps, ..., 1.
std::vector<double> uniform_grid(std::size_t steps);

struct FlowOptions {
  /// The curve stops when Im xi <= stop_fraction * eta.
  double stop_fraction = 0.25;
  /// tau' uses this fraction.
  double prime_fraction = 0.5;
  /// Bisection tolerance on the stopping time.
  double time_tolerance = 1e-13;
};

/// Stopped characteristic xi(t, z) = gamma(t ^ tau_z, z) and the recorded
/// process <R(t, z)> = <G(t ^ tau_z, xi(t, z))>.
struct CharacteristicCurve {
  cplx z0;
  double eta = 0.0;
  std::vector<double> t;
  std::vector<cplx> xi;
  std::vector<cplx> trace;
  std::vector<char> stopped;  ///< 1 from the stopping time onwards
  bool was_stopped = false;
  double tau = std::numeric_limits<double>::infinity();
  double tau_prime = std::numeric_limits<double>::infinity();

  std::size_t size() const { return t.size(); }
  cplx endpoint() const { return xi.back(); }
  /// Position at time s by linear interpolation of the recorded points.
  cplx position(double s) const;
  /// u(t) = 1 + Im <R(t)> at each recorded point.
  std::vector<double> u() const;
};

/// Fixed-step RK4 for gamma' = -<G(t, gamma)>, gamma(0) = z0, on `t_grid`
/// (starting at 0). On the step that crosses Im = stop_fraction * eta the step
/// length is bisected, the stopping point is recorded and the curve frozen.
/// Throws ODEStepFailure (message carries the last good state) if the drift is
/// not finite or the bisection cannot bracket the crossing.
CharacteristicCurve flow_gamma(const TraceMeanFn& trace_mean, cplx z0, const SpectralDomain& dom,
                               std::span<const double> t_grid, const FlowOptions& options = {});

/// Time reversal lambda' = <G(1 - t, lambda)>, lambda(0) = zeta, RK4 on `t_grid`.
/// Returns the whole trajectory; positions only (trace holds the drift values).
CharacteristicCurve flow_lambda(const TraceMeanFn& trace_mean, cplx zeta, std::span<const double> t_grid);

struct InitialPoint {
  cplx w;
  double residual = 0.0;   ///< |w + 1/w - z|
  double roundtrip = 0.0;  ///< |gamma(1, w) - z|
  bool in_d0 = false;
  bool outside_delta = false;  ///< |w| > delta
};

/// w = lambda(1, z) together with the inverse-flow and semicircle residuals.
InitialPoint map_to_initial(const TraceMeanFn& trace_mean, cplx z, const SpectralDomain& dom,
                            std::span<const double> t_grid);

struct StoppedProcess {
  CharacteristicCurve curve;
  double drift_sup = 0.0;  ///< sup_{t <= 1 ^ tau'} |<R(t)> - <R(0)>|
  double ratio = 0.0;      ///< drift_sup * sqrt(N eta)
};

StoppedProcess stopped_process(const TraceMeanFn& trace_mean, cplx z0, const SpectralDomain& dom,
                               std::span<const double> t_grid, const FlowOptions& options = {});

/// Characteristic coupled to consecutive full matrix states: the flow is
/// advanced by Heun's method with <R> from exact resolvents at the state
/// times, and the curve is recorded exactly at those times.
CharacteristicCurve stopped_process_on_states(std::span<const MatrixState> states, cplx z0, const SpectralDomain& dom,
                                              const FlowOptions& options = {});

struct DriftDecomposition {
  std::vector<double> t;
  std::vector<cplx> f;  ///< <F(t)>, F(t_0) = 0
  std::vector<cplx> a;  ///< <A(t)>, A(t_0) = 0
  std::vector<double> residual;  ///< |<R(t)> - <R(t_0)> - <F(t)> - <A(t)>|
  double max_residual = 0.0;
  double f_sup = 0.0;
  double a_sup = 0.0;
};

/// Discrete dF = -R (dH - T[sigma, R] dt) R and dA = R (S[sigma, R] - <R>) R dt
/// accumulated as trace means. `curve` must be recorded at the state times
/// (see stopped_process_on_states); throws DimensionMismatch otherwise.
DriftDecomposition drift_decomposition(std::span<const MatrixState> states, const CharacteristicCurve& curve);

/// max over common unstopped grid times of
/// |gamma_t(z) - gamma_t(w)| / (sqrt(Im z Im w / (Im gamma_t(z) Im gamma_t(w))) |z - w|).
/// Returns 0 for z == w. A value above 1 + slack is a violation.
double contraction_check(const CharacteristicCurve& curve_z, const CharacteristicCurve& curve_w);

struct IntegrationTrickResult {
  double lhs = 0.0;  ///< trapezoid sum of f'(Im xi) Im <R> dt up to the stopping time
  double rhs = 0.0;  ///< f(Im xi(start)) - f(Im xi(end))
  double residual = 0.0;
  double relative = 0.0;
};

IntegrationTrickResult integration_trick(const CharacteristicCurve& curve, const std::function<double(double)>& f,
                                         const std::function<double(double)>& f_prime);

/// max over recorded points of |d(Im xi)/dt + Im <R>| using centred differences
/// (one-sided at the ends), over the unstopped part of the curve.
double flow_consistency(const CharacteristicCurve& curve);

}  // namespace wigchar
