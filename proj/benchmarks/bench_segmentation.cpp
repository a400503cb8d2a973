#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "metaimpact/segmentation.hpp"

namespace mi = metaimpact;

static std::vector<double> noisy_steps(std::size_t n, std::size_t blocks) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double level = ((i * blocks / n) % 2 == 0) ? 0.0 : 1.5;
    v[i] = level + noise(rng);
  }
  return v;
}

static void BM_BestSplit(benchmark::State& state) {
  const auto v = noisy_steps(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(mi::best_split(v, 10));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BestSplit)->RangeMultiplier(4)->Range(256, 65536)->Complexity(benchmark::oN);

static void BM_SegmentValues(benchmark::State& state) {
  const auto v = noisy_steps(static_cast<std::size_t>(state.range(0)), 16);
  const mi::SegParams params;
  for (auto _ : state) benchmark::DoNotOptimize(mi::segment_values(v, params).size());
}
BENCHMARK(BM_SegmentValues)->RangeMultiplier(4)->Range(1024, 65536)->Unit(benchmark::kMicrosecond);

static void BM_Significance(benchmark::State& state) {
  double tau = 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mi::max_statistic_significance(tau, 1000));
    tau += 1e-9;
  }
}
BENCHMARK(BM_Significance);
