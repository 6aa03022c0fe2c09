#include <benchmark/benchmark.h>

#include <cmath>

#include "wigchar/characteristics.hpp"
#include "wigchar/density.hpp"
#include "wigchar/martingale.hpp"
#include "wigchar/resolvent.hpp"
#include "wigchar/spectral_path.hpp"

using namespace wigchar;

namespace {

const CalibratedDensity& mixture() {
  static const CalibratedDensity cd = calibrate(DensitySpec::mixture({0.5, 0.5}, {std::sqrt(0.5), std::sqrt(1.5)}));
  return cd;
}

MatrixState state_at_half(std::size_t n) {
  RandomStream s(StreamId{1, n, StreamPurpose::InitialEntries, 0});
  return init_exact(mixture(), n, 0.5, s);
}

}  // namespace

static void BM_Calibrate(benchmark::State& st) {
  const DensitySpec spec = DensitySpec::mixture({0.5, 0.5}, {std::sqrt(0.5), std::sqrt(1.5)});
  for (auto _ : st) benchmark::DoNotOptimize(calibrate(spec));
}
BENCHMARK(BM_Calibrate)->Unit(benchmark::kMillisecond);

static void BM_SdeStep(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  MatrixState s = state_at_half(n);
  std::uint64_t k = 0;
  for (auto _ : st) {
    RandomStream inc(StreamId{1, 0, StreamPurpose::Increments, ++k});
    s.t = 0.5;
    step_in_place(mixture(), s, 1e-4, inc);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(n * (n + 1) / 2));
}
BENCHMARK(BM_SdeStep)->Arg(200)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_DirectResolvent(benchmark::State& st) {
  const MatrixState s = state_at_half(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(resolvent(s.h, cplx(0.1, 0.05)));
}
BENCHMARK(BM_DirectResolvent)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_Eigenvalues(benchmark::State& st) {
  const MatrixState s = state_at_half(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(SpectralResolvent(s.h, false));
}
BENCHMARK(BM_Eigenvalues)->Arg(200)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_SpectralDiagonal(benchmark::State& st) {
  const SpectralResolvent r(state_at_half(static_cast<std::size_t>(st.range(0))).h, true);
  for (auto _ : st) benchmark::DoNotOptimize(r.diagonal(cplx(0.1, 0.05)));
}
BENCHMARK(BM_SpectralDiagonal)->Arg(200)->Arg(500)->Unit(benchmark::kMicrosecond);

static void BM_SelfEnergy(benchmark::State& st) {
  const MatrixState s = state_at_half(static_cast<std::size_t>(st.range(0)));
  const SpectralResolvent r(s.h, true);
  const cplx z(0.1, 0.05);
  const Eigen::VectorXcd d = r.diagonal(z);
  for (auto _ : st) benchmark::DoNotOptimize(self_energy_error(s.sigma, d, z));
}
BENCHMARK(BM_SelfEnergy)->Arg(200)->Arg(500)->Unit(benchmark::kMicrosecond);

static void BM_FlowGammaStub(benchmark::State& st) {
  const SpectralDomain dom = SpectralDomain::make(1000, 0.5, -1, 1, 0.5);
  const auto grid = uniform_grid(static_cast<std::size_t>(st.range(0)));
  const TraceMeanFn stub = semicircle_stub();
  for (auto _ : st) benchmark::DoNotOptimize(flow_gamma(stub, cplx(0.3, 1.2), dom, grid));
}
BENCHMARK(BM_FlowGammaStub)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

static void BM_MapToInitialSpectral(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const std::size_t steps = 50;
  SpectralPath path;
  const MatrixState s = state_at_half(n);
  const SpectralResolvent base(s.h, false);
  for (double t : SpectralPath::snapshot_times(steps)) path.add(t, base.eigenvalues() * std::sqrt(t / 0.5));
  const SpectralDomain dom = SpectralDomain::make(n, 0.5, -1, 1, 0.5);
  const auto grid = uniform_grid(steps);
  const TraceMeanFn fn = path.function();
  for (auto _ : st) benchmark::DoNotOptimize(map_to_initial(fn, cplx(0.2, dom.eta), dom, grid));
}
BENCHMARK(BM_MapToInitialSpectral)->Arg(500)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
