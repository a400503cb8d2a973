// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Pass criterion ids (AC1 ... AC8) to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lee_ready_fixture.hpp"
#include "metaimpact/impact.hpp"
#include "metaimpact/order_metrics.hpp"
#include "metaimpact/pipeline.hpp"
#include "metaimpact/segmentation.hpp"
#include "metaimpact/synth.hpp"
#include "segmentation_properties.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
namespace mi = metaimpact;
using json = nlohmann::json;
using namespace testing_support;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  /// Records a sub-check; the criterion passes only if all do.
  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

/// Writes a synthetic market to `dir` and runs the whole pipeline on it.
std::vector<mi::StageReport> synth_and_run(const mi::SynthConfig& synth, const TempDir& dir, mi::RunConfig config,
                                           double* run_seconds = nullptr) {
  mi::write_market(mi::generate(synth), dir.path());
  config.input_dir = dir.path();
  config.output_dir = dir / "out";
  const auto t0 = std::chrono::steady_clock::now();
  auto stages = mi::run_pipeline(config);
  if (run_seconds) *run_seconds = seconds_since(t0);
  return stages;
}

// ---------------------------------------------------------------------------

void ac1(Outcome& o) {
  const TempDir dir("ac1");
  const mi::SynthConfig synth;
  const auto t0 = std::chrono::steady_clock::now();
  const auto market = mi::generate(synth);
  mi::write_market(market, dir.path());
  const double synth_seconds = seconds_since(t0);

  mi::RunConfig config;
  config.input_dir = dir.path();
  config.output_dir = dir / "out";
  const auto t1 = std::chrono::steady_clock::now();
  mi::run_pipeline(config);
  const double run_seconds = seconds_since(t1);

  const auto score = read_json(config.output_dir / mi::files::kScore);
  const double precision = score["precision"].get<double>();
  const double recall = score["recall"].get<double>();
  o.check(precision >= 0.8, "precision >= 0.8");
  o.check(recall >= 0.9, "recall >= 0.9");
  o.check(run_seconds <= 60.0, "pipeline within 60 s");
  o.detail << market.tape.trade_count() << " trades, " << market.truth.size() << " orders; precision "
           << fmt(precision) << ", recall " << fmt(recall) << "; pipeline " << fmt(run_seconds, 1) << " s (synth "
           << fmt(synth_seconds, 1) << " s)";
}

/// Market with per-order impact A N^gamma (t/T)^beta, reverting to VWAP.
mi::SynthConfig impact_market(double gamma, double beta) {
  mi::SynthConfig c;
  c.n_stocks = 5;
  c.trade_rate = 0.0327;
  c.brokers_per_stock = 6;
  c.n_orders = 3000;
  c.size_tail = 0.8;
  c.size_max = 200;
  c.impact_A = 0.63;
  c.impact_gamma = gamma;
  c.impact_beta = beta;
  c.reversion = mi::ReversionMode::ToVwap;
  c.sigma = 0.0001;
  c.broker_background_per_session = 15;
  return c;
}

void ac2(Outcome& o) {
  for (double gamma : {0.48, 0.72}) {
    const TempDir dir("ac2");
    synth_and_run(impact_market(gamma, 0.71), dir, {});
    const auto fits = read_json(dir / "out" / mi::files::kFits);
    const double high = fits["impact"]["fmo_high"]["gamma"].get<double>();
    const double all = fits["impact"]["all"]["gamma"].get<double>();
    o.check(std::abs(high - gamma) <= 0.05, "gamma " + fmt(gamma, 2) + " within 0.05");
    o.detail << "gamma " << fmt(gamma, 2) << ": f_mo>=0.8 fit " << fmt(high) << " +- "
             << fmt(fits["impact"]["fmo_high"]["se_gamma"].get<double>()) << " (all orders " << fmt(all) << "); ";
  }
}

void ac3(Outcome& o) {
  const mi::ImpactGrid grid;
  for (double beta : {0.71, 0.62}) {
    mi::ProfileCurve p;
    for (double u : grid.nodes()) {
      p.points.push_back({u, u <= 1.0 ? std::pow(u, beta) : 1.0 / (1.0 + beta), 0.0, 100});
    }
    const auto r = mi::reversion_ratio(p, beta, 20);
    o.check(std::abs(r.ratio - 1.0 / (1.0 + beta)) <= 1e-9, "analytic identity at beta " + fmt(beta, 2));
    o.check(std::abs(r.predicted_ratio - (beta == 0.71 ? 0.585 : 0.617)) <= 5e-4, "predicted ratio");
    o.detail << "analytic beta " << fmt(beta, 2) << " ratio " << fmt(r.ratio, 6) << "; ";
  }
  for (double beta : {0.71, 0.62}) {
    const TempDir dir("ac3");
    synth_and_run(impact_market(0.48, beta), dir, {});
    const auto rv = read_json(dir / "out" / mi::files::kFits)["profile"]["reversion"];
    const double ratio = rv["ratio"].get<double>();
    const double target = 1.0 / (1.0 + beta);
    o.check(std::abs(ratio - target) <= 0.05, "noisy synth at beta " + fmt(beta, 2));
    o.detail << "synth beta " << fmt(beta, 2) << " ratio " << fmt(ratio) << " vs " << fmt(target) << "; ";
  }
}

void ac4(Outcome& o) {
  // Noiseless log-linear triple.
  {
    std::vector<double> V, N, T;
    for (int i = 0; i < 200; ++i) {
      const double lv = 7.0 + 0.05 * i;
      V.push_back(std::exp(lv));
      N.push_back(std::exp(0.81 * lv - 2.0));
      T.push_back(std::exp(1.57 * lv - 5.0));
    }
    mi::PcaParams params;
    params.bootstrap = 100;
    const auto e = mi::pca_exponents(V, N, T, params);
    o.check(std::abs(e.g1.exponent - 0.81) <= 1e-9 && std::abs(e.g2.exponent - 1.57) <= 1e-9 &&
                std::abs(e.g3.exponent - 0.81 / 1.57) <= 1e-9,
            "noiseless exponents");
    o.check(std::abs(e.g1.variance_explained - 1.0) <= 1e-12 && std::abs(e.g2.variance_explained - 1.0) <= 1e-12 &&
                std::abs(e.g3.variance_explained - 1.0) <= 1e-12,
            "variance explained 1");
    o.check(std::abs(e.g1.exponent - e.g2.exponent * e.g3.exponent) <= 1e-9, "g1 = g2 g3");
    o.detail << "noiseless g1 " << fmt(e.g1.exponent, 9) << ", g2 " << fmt(e.g2.exponent, 9) << ", g3 "
             << fmt(e.g3.exponent, 9) << "; ";
  }
  // Coverage: latent size with equal, independent noise on each log variable.
  const double g1 = 0.81;
  const double g2 = 1.57;
  const double g3 = g1 / g2;
  int covered[3] = {0, 0, 0};
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    std::mt19937_64 rng(1000 + trial);
    std::normal_distribution<double> latent(0.0, 1.5);
    std::normal_distribution<double> noise(0.0, 0.4);
    std::vector<double> V, N, T;
    for (int i = 0; i < 1000; ++i) {
      const double s = latent(rng);
      V.push_back(std::exp(12.0 + s + noise(rng)));
      N.push_back(std::exp(3.0 + g1 * s + noise(rng)));
      T.push_back(std::exp(6.0 + g2 * s + noise(rng)));
    }
    mi::PcaParams params;
    params.seed = trial;
    const auto e = mi::pca_exponents(V, N, T, params);
    covered[0] += e.g1.ci_lo <= g1 && g1 <= e.g1.ci_hi;
    covered[1] += e.g2.ci_lo <= g2 && g2 <= e.g2.ci_hi;
    covered[2] += e.g3.ci_lo <= g3 && g3 <= e.g3.ci_hi;
  }
  for (int k = 0; k < 3; ++k) o.check(covered[k] >= 90, "coverage of g" + std::to_string(k + 1));
  o.detail << "95% CI coverage over 100 trials: g1 " << covered[0] << ", g2 " << covered[1] << ", g3 " << covered[2];
}

void ac5(Outcome& o) {
  const mi::SegParams p;
  std::size_t failures = 0;
  std::string first;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto v = random_fixture(seed);
    for (const auto& msg : {check_partition(v, p), check_scale_invariance(v, p, 1e-3 + 0.01 * seed),
                            check_time_reversal(v, p), check_monotone_threshold(v, p)}) {
      if (!msg.empty()) {
        ++failures;
        if (first.empty()) first = "seed " + std::to_string(seed) + ": " + msg;
      }
    }
  }
  o.check(failures == 0, "invariants on 1000 fixtures (" + first + ")");
  const double rate = false_split_rate(200, 1000, p, 500000);
  o.check(rate <= 0.10, "false-split rate <= 10%");
  o.detail << "1000 fixtures x 4 invariants, " << failures << " violations; false-split rate " << fmt(100.0 * rate, 1)
           << "% on 1000 noise series of length 200";
}

void ac6(Outcome& o) {
  // f_mo and alpha on random adversarial tapes.
  std::mt19937_64 rng(6);
  std::size_t windows = 0;
  bool ranges_ok = true;
  const std::vector<std::string> members{"A", "B", "C"};
  for (int trial = 0; trial < 200; ++trial) {
    mi::TapeBuilder b;
    b.add_quote("X", 0, 99, 101);
    mi::Nanos t = 1;
    for (int i = 0; i < 80; ++i) {
      t += static_cast<mi::Nanos>(rng() % 3);
      b.add_trade("X", t, 90.0 + static_cast<double>(rng() % 20), 1 + static_cast<std::int64_t>(rng() % 1000),
                  members[rng() % 3], members[rng() % 3], static_cast<mi::Aggressor>(rng() % 3));
    }
    const auto tape = std::move(b).build();
    const auto& stock = tape.stock("X");
    const auto set = mi::build_member_series(tape, stock, mi::sign_trades(stock), mi::ActivityFilter{0, 0});
    for (const auto& s : set.series) {
      for (int k = 0; k < 10; ++k) {
        const std::size_t lo = rng() % s.events.size();
        const std::size_t hi = lo + rng() % (s.events.size() - lo);
        const std::span<const mi::SeriesEvent> w(s.events.data() + lo, hi - lo + 1);
        const double f = mi::compute_f_mo(w);
        const double a = mi::compute_alpha(w, stock, w.front().timestamp, w.back().timestamp);
        ranges_ok = ranges_ok && f >= 0.0 && f <= 1.0 && a > 0.0 && a <= 1.0;
        ++windows;
      }
    }
  }
  o.check(ranges_ok, "f_mo in [0,1] and alpha in (0,1]");

  // Sign and dominance rule on hand-built series.
  auto series = [](const std::vector<double>& v) {
    mi::MemberSeries s;
    s.member_code = "M";
    s.stock = "X";
    for (std::size_t i = 0; i < v.size(); ++i) {
      s.events.push_back(mi::SeriesEvent{i, kDay0 + kOpen + seconds(10.0 * static_cast<double>(i)), v[i], true});
    }
    return s;
  };
  auto extract = [&](const std::vector<double>& v) {
    const auto s = series(v);
    const std::vector<mi::Segment> one{{0, v.size() - 1, 0.0}};
    return mi::extract_hidden_orders(one, s, daily_calendar(1), {});
  };
  std::vector<double> at75(9, -100.0);
  at75.insert(at75.end(), 3, 100.0);
  std::vector<double> below75(8, -100.0);
  below75.insert(below75.end(), 3, 100.0);
  below75.push_back(100.0);
  below75.push_back(-1.0);  // 801 / 1201 < 0.75
  const auto e75 = extract(at75);
  o.check(e75.size() == 1 && e75[0].epsilon == -1 && e75[0].signed_volume < 0 && e75[0].dominant_fraction == 0.75,
          "75% dominance kept with epsilon = sign(V)");
  o.check(extract(below75).empty(), "below 75% dominance rejected");

  // Filter boundaries.
  const auto cal = daily_calendar(300);
  const double day = static_cast<double>(kSession) / 1e9;
  auto order = [&](const std::string& stock, int d, double T, double f_mo) {
    mi::OrderMetrics m;
    m.order.stock = stock;
    m.order.start_ts = kDay0 + kOpen + d * kDay;
    m.order.T_seconds = T;
    m.order.n_trades = 20;
    m.f_mo = f_mo;
    return m;
  };
  mi::FilterSpec no_year;
  no_year.min_orders_per_stock_year = 0;
  o.check(mi::apply_filters(std::vector{order("X", 0, day, 0.5)}, cal, no_year).size() == 1, "T = 1 day kept");
  o.check(mi::apply_filters(std::vector{order("X", 0, day + 1e-3, 0.5)}, cal, no_year).empty(), "T > 1 day removed");
  std::vector<mi::OrderMetrics> year;
  for (int d = 0; d < 250; ++d) year.push_back(order("A", d, 60, 0.5));
  for (int d = 0; d < 249; ++d) year.push_back(order("B", d, 60, 0.5));
  const auto kept = mi::apply_filters(year, cal, {});
  o.check(kept.size() == 250 && kept.front().order.stock == "A", "250 orders per year kept, 249 removed");
  mi::FilterSpec band = no_year;
  band.fmo_band = mi::Band{0.8, 1.0};
  o.check(mi::apply_filters(std::vector{order("X", 0, 60, 0.8)}, cal, band).size() == 1, "f_mo = 0.8 kept");
  o.check(mi::apply_filters(std::vector{order("X", 0, 60, 0.7999)}, cal, band).empty(), "f_mo < 0.8 removed");
  o.detail << windows << " random order windows in range; dominance, sign and filter boundaries as declared";
}

void ac7(Outcome& o) {
  const TempDir dir("ac7");
  mi::write_market(mi::generate(mi::SynthConfig{}), dir.path());
  mi::RunConfig config;
  config.input_dir = dir.path();
  config.filters.min_orders_per_stock_year = 0;  // so every analytics stage runs
  std::vector<fs::path> outs;
  for (auto [name, workers] : {std::pair{"w1", 1}, std::pair{"w8", 8}, std::pair{"w8b", 8}}) {
    config.output_dir = dir / name;
    config.workers = static_cast<std::size_t>(workers);
    for (const auto& s : mi::run_pipeline(config)) o.check(s.status == "ok", s.name + " ran");
    outs.push_back(config.output_dir);
  }
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(outs[0])) {
    const auto name = e.path().filename().string();
    if (name == mi::files::kManifest || name == mi::files::kConfig) continue;  // timings, worker count
    const auto a = slurp(e.path());
    o.check(a == slurp(outs[1] / name), name + " identical for 1 and 8 workers");
    o.check(a == slurp(outs[2] / name), name + " identical across runs");
    ++compared;
  }
  o.check(fs::exists(outs[0] / mi::files::kFits), "fits.json written");
  o.detail << compared << " artifacts byte-identical across 1 vs 8 workers and repeated runs";
}

void ac8(Outcome& o) {
  const auto r = run_lee_ready();
  o.check(r.total == 50, "50 labeled trades");
  o.check(r.side_agree == r.total, "initiator agreement");
  o.check(r.branch_agree == r.total, "branch agreement");
  o.detail << r.side_agree << "/" << r.total << " initiators and " << r.branch_agree << "/" << r.total
           << " branches agree with the hand labels";
  for (const auto& d : r.disagreements) o.detail << "; " << d;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::tuple<std::string, std::string, std::function<void(Outcome&)>>> criteria{
      {"AC1", "detection round-trip", ac1},     {"AC2", "impact exponent recovery", ac2},
      {"AC3", "reversion identity", ac3},       {"AC4", "PCA exactness and coverage", ac4},
      {"AC5", "segmentation properties", ac5},  {"AC6", "metric invariants", ac6},
      {"AC7", "determinism", ac7},              {"AC8", "Lee-Ready agreement", ac8}};
  std::set<std::string> selected(argv + 1, argv + argc);
  bool all_pass = true;
  for (const auto& [id, title, fn] : criteria) {
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "[error: " << e.what() << "]";
    }
    all_pass = all_pass && o.pass;
    auto detail = o.detail.str();
    while (!detail.empty() && (detail.back() == ' ' || detail.back() == ';')) detail.pop_back();
    std::cout << id << " " << (o.pass ? "PASS" : "FAIL") << " " << title << ": " << detail << " ("
              << fmt(seconds_since(t0), 1) << " s)" << std::endl;
  }
  return all_pass ? 0 : 1;
}
