#include <benchmark/benchmark.h>

#include <numbers>

#include "sunada/flow.hpp"
#include "sunada/manifold.hpp"
#include "sunada/orbits.hpp"

using namespace sunada::geo;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

void BM_IntegrateFlowSphere(benchmark::State& state) {
  const Manifold m = RoundSphere{1.0};
  const PhasePoint p0 = from_velocity(m, vec2(1.0, 2.0), vec2(0.3, -0.7));
  for (auto _ : state) benchmark::DoNotOptimize(integrate_flow(m, p0, 2 * std::numbers::pi));
}
BENCHMARK(BM_IntegrateFlowSphere)->Unit(benchmark::kMicrosecond);

void BM_MonodromyTorusOfRevolution(benchmark::State& state) {
  const Manifold m = SurfaceOfRevolution{torus_profile(2.0, 1.0)};
  const PhasePoint p0 = from_velocity(m, vec2(2.0, 0.5), vec2(0.4, 0.2));
  for (auto _ : state) benchmark::DoNotOptimize(integrate_monodromy(m, p0, 3.0));
}
BENCHMARK(BM_MonodromyTorusOfRevolution)->Unit(benchmark::kMicrosecond);

void BM_ClosedOrbitsFlatTorus(benchmark::State& state) {
  const Manifold m = FlatTorus{Mat::Identity(2, 2)};
  for (auto _ : state) benchmark::DoNotOptimize(find_closed_orbits(m, 3.0));
}
BENCHMARK(BM_ClosedOrbitsFlatTorus)->Unit(benchmark::kMillisecond);

void BM_ClosedOrbitsTorusOfRevolution(benchmark::State& state) {
  const Manifold m = SurfaceOfRevolution{torus_profile(2.0, 1.0)};
  for (auto _ : state) benchmark::DoNotOptimize(find_closed_orbits(m, 7.0));
}
BENCHMARK(BM_ClosedOrbitsTorusOfRevolution)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace
