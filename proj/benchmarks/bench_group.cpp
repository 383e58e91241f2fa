#include <benchmark/benchmark.h>

#include <vector>

#include "sunada/cover.hpp"
#include "sunada/group.hpp"
#include "sunada/intertwiner.hpp"

using namespace sunada;

namespace {

const group::FiniteGroup& g168() {
  static const group::FiniteGroup g = group::load_group_file(SUNADA_FIXTURE_DIR "/g168.grp");
  return g;
}

group::Subgroup line_stabilizer(const group::FiniteGroup& g) {
  const std::vector<group::Point> line{0, 1, 3};
  return group::set_stabilizer(g, line);
}

void BM_ParseGroup(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(group::load_group_file(SUNADA_FIXTURE_DIR "/g168.grp"));
}
BENCHMARK(BM_ParseGroup)->Unit(benchmark::kMillisecond);

void BM_GassmannCertificate(benchmark::State& state) {
  const auto& g = g168();
  const auto h1 = group::point_stabilizer(g, 0);
  const auto h2 = line_stabilizer(g);
  for (auto _ : state) benchmark::DoNotOptimize(group::is_gassmann(g, h1, h2));
}
BENCHMARK(BM_GassmannCertificate)->Unit(benchmark::kMicrosecond);

void BM_IntertwinerSolve(benchmark::State& state) {
  const auto& g = g168();
  const auto h1 = group::point_stabilizer(g, 0);
  const auto h2 = line_stabilizer(g);
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(group::intertwiner_solve(g, h1, h2, seed++));
}
BENCHMARK(BM_IntertwinerSolve)->Unit(benchmark::kMillisecond);

void BM_SeedSweep(benchmark::State& state) {
  const auto& g = g168();
  const cover::CoverDiagram d = cover::build_cover(g, group::point_stabilizer(g, 0), line_stabilizer(g));
  const cover::RadonMatrix u = cover::lift_radon(group::intertwiner_solve(g, d.h1, d.h2, 1), d);
  const auto seeds = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cover::sweep_seeds(d, &u, 50, 1, seeds));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * seeds);
}
BENCHMARK(BM_SeedSweep)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
