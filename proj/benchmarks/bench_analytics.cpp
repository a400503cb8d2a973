#include <cmath>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "metaimpact/impact.hpp"

namespace mi = metaimpact;

static void BM_PcaBootstrap(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(7);
  std::lognormal_distribution<double> size(10.0, 1.5);
  std::normal_distribution<double> noise(0.0, 0.3);
  std::vector<double> V(n), N(n), T(n);
  for (std::size_t i = 0; i < n; ++i) {
    V[i] = size(rng);
    N[i] = std::pow(V[i], 0.8) * std::exp(noise(rng));
    T[i] = std::pow(V[i], 0.6) * std::exp(noise(rng));
  }
  mi::PcaParams params;
  params.bootstrap = 200;
  for (auto _ : state) benchmark::DoNotOptimize(mi::pca_exponents(V, N, T, params).g1.exponent);
}
BENCHMARK(BM_PcaBootstrap)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_ImpactCurve(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<mi::ImpactSample> samples(100000);
  for (auto& s : samples) {
    s.N = 10.0 * std::pow(u(rng), -1.0 / 1.5);
    s.f_mo = u(rng);
    s.R = std::sqrt(s.N) + u(rng);
  }
  for (auto _ : state) {
    auto curve = mi::impact_vs_N(samples, std::nullopt, {});
    benchmark::DoNotOptimize(mi::fit_powerlaw(curve).exponent);
  }
}
BENCHMARK(BM_ImpactCurve)->Unit(benchmark::kMillisecond);
