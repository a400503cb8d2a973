#include <filesystem>

#include <benchmark/benchmark.h>

#include "metaimpact/signing.hpp"
#include "metaimpact/synth.hpp"
#include "metaimpact/tape.hpp"

namespace mi = metaimpact;

namespace {

mi::SynthConfig small_market() {
  mi::SynthConfig c;
  c.n_stocks = 2;
  c.n_sessions = 20;
  c.n_orders = 40;
  return c;
}

const mi::SynthMarket& market() {
  static const mi::SynthMarket m = mi::generate(small_market());
  return m;
}

}  // namespace

static void BM_Generate(benchmark::State& state) {
  const auto config = small_market();
  for (auto _ : state) {
    auto m = mi::generate(config);
    benchmark::DoNotOptimize(m.tape.trade_count());
  }
}
BENCHMARK(BM_Generate)->Unit(benchmark::kMillisecond);

static void BM_Ingest(benchmark::State& state) {
  const auto dir = std::filesystem::temp_directory_path() / "metaimpact_bench_ingest";
  std::filesystem::create_directories(dir);
  mi::write_market(market(), dir);
  for (auto _ : state) {
    auto tape = mi::ingest_tape(dir / "trades.csv", dir / "quotes.csv", dir / "calendar.csv");
    benchmark::DoNotOptimize(tape.trade_count());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * market().tape.trade_count()));
  std::filesystem::remove_all(dir);
}
BENCHMARK(BM_Ingest)->Unit(benchmark::kMillisecond);

static void BM_SignTrades(benchmark::State& state) {
  const auto& stock = market().tape.stocks()[0];
  for (auto _ : state) {
    auto result = mi::sign_trades(stock);
    benchmark::DoNotOptimize(result.inferred);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * stock.trades.size()));
}
BENCHMARK(BM_SignTrades)->Unit(benchmark::kMicrosecond);
