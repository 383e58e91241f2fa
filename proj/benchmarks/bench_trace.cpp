#include <benchmark/benchmark.h>

#include <complex>

#include "sunada/lseries.hpp"
#include "sunada/trace.hpp"

using namespace sunada;

namespace {

void BM_LatticeOracle(benchmark::State& state) {
  const double l_max = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(zeta::oracle_flat_torus(geo::Mat::Identity(2, 2), l_max));
}
BENCHMARK(BM_LatticeOracle)->Arg(5)->Arg(20)->Arg(50)->Unit(benchmark::kMicrosecond);

void BM_LFunctionEval(benchmark::State& state) {
  const zeta::LSeries series = zeta::oracle_flat_torus(geo::Mat::Identity(2, 2), 20.0);
  const std::complex<double> s(2.0, 3.0);
  for (auto _ : state) benchmark::DoNotOptimize(zeta::l_function_eval(series, s));
}
BENCHMARK(BM_LFunctionEval)->Unit(benchmark::kMicrosecond);

void BM_FlatTorusTraceWeights(benchmark::State& state) {
  const geo::Manifold m = geo::FlatTorus{geo::Mat::Identity(2, 2)};
  for (auto _ : state) benchmark::DoNotOptimize(zeta::flat_trace_weights(m, 3.0));
}
BENCHMARK(BM_FlatTorusTraceWeights)->Unit(benchmark::kMillisecond);

void BM_RankReport(benchmark::State& state) {
  geo::FrameMat m = geo::FrameMat::Identity(3, 3);
  m(1, 2) = 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(zeta::rank_report(m));
}
BENCHMARK(BM_RankReport);

}  // namespace
