#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "sunada/microlocal.hpp"

using namespace sunada::micro;

namespace {

void BM_OscillatoryIntegralCosX(benchmark::State& state) {
  const PhaseProblem p = cos_x_problem();
  const double h = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(oscillatory_integral(p, h));
}
BENCHMARK(BM_OscillatoryIntegralCosX)->Arg(50)->Arg(400)->Unit(benchmark::kMicrosecond);

void BM_OscillatoryIntegralTorus(benchmark::State& state) {
  const PhaseProblem p = cos_y_torus_problem();
  for (auto _ : state) benchmark::DoNotOptimize(oscillatory_integral(p, 100.0));
}
BENCHMARK(BM_OscillatoryIntegralTorus)->Unit(benchmark::kMillisecond);

void BM_MollifySine(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  std::vector<double> s(m);
  for (std::size_t k = 0; k < m; ++k) s[k] = std::sin(2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m));
  for (auto _ : state) benchmark::DoNotOptimize(mollify(s, 1, 2 * std::numbers::pi, 100.0));
}
BENCHMARK(BM_MollifySine)->Arg(8192)->Arg(65536)->Unit(benchmark::kMillisecond);

}  // namespace
