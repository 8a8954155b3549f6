// Serial references against the OpenMP kernels.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>

#include "reachlab/reach.hpp"

using namespace reachlab;

namespace {

PointCloud random_cloud(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> coords(count * 2);
  for (auto& c : coords) c = unif(rng);
  return PointCloud(2, coords);
}

const ControlAffineSystem& vanderpol() {
  static const ControlAffineSystem s(2, 1, {"x1", "-x0 + (1 - x0^2)*x1"}, {{"0", "1"}});
  return s;
}

ReachSpec spec_for(int switches) {
  ReachSpec s;
  s.switches = switches;
  s.value_resolution = 2;
  s.step = 0.01;
  s.resolution = 0.005;
  return s;
}

void BM_Hausdorff(benchmark::State& state) {
  const auto a = random_cloud(state.range(0), 1), b = random_cloud(state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(directed_hausdorff(a, b));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_HausdorffSerial(benchmark::State& state) {
  const auto a = random_cloud(state.range(0), 1), b = random_cloud(state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(directed_hausdorff_serial(a, b));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Reach(benchmark::State& state) {
  const auto omega = OmegaSet::box({-1}, {1});
  const auto spec = spec_for(static_cast<int>(state.range(0)));
  const std::vector<double> x0{1.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(reachable_cloud(vanderpol(), x0, 1.0, omega, spec));
}

void BM_ReachSerial(benchmark::State& state) {
  const auto omega = OmegaSet::box({-1}, {1});
  const auto spec = spec_for(static_cast<int>(state.range(0)));
  const std::vector<double> x0{1.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(reachable_cloud_serial(vanderpol(), x0, 1.0, omega, spec));
}

}  // namespace

BENCHMARK(BM_Hausdorff)->Arg(1000)->Arg(10000);
BENCHMARK(BM_HausdorffSerial)->Arg(1000)->Arg(10000);
BENCHMARK(BM_Reach)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReachSerial)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
