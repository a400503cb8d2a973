#include "metaimpact/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <map>
#include <thread>

#include <json.hpp>

#include "metaimpact/artifacts.hpp"
#include "metaimpact/csv.hpp"
#include "metaimpact/errors.hpp"
#include "metaimpact/parallel.hpp"
#include "metaimpact/random.hpp"
#include "metaimpact/score.hpp"

namespace metaimpact {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename E>
void add_enum(ParamTable& t, const std::string& key, E& ref, std::vector<std::pair<E, std::string>> names,
              std::string help) {
  t.add_custom(
      key,
      [&ref, names] {
        for (const auto& [v, n] : names) {
          if (v == ref) return n;
        }
        return std::string("?");
      },
      [&ref, names, key](std::string_view s) {
        for (const auto& [v, n] : names) {
          if (n == s) {
            ref = v;
            return;
          }
        }
        detail::bad_value(key, s);
      },
      std::move(help));
}

std::size_t count_rows(std::string_view csv_text) {
  const auto lines = static_cast<std::size_t>(std::count(csv_text.begin(), csv_text.end(), '\n'));
  return lines > 0 ? lines - 1 : 0;
}

/// Times a stage and records the artifacts it writes.
class StageScope {
 public:
  StageScope(const RunConfig& config, std::string name)
      : dir_(config.output_dir), start_(std::chrono::steady_clock::now()) {
    report_.name = std::move(name);
    fs::create_directories(dir_);
  }

  void write(const std::string& file, const std::string& contents, bool is_csv = true) {
    csv::write_file(dir_ / file, contents);
    if (is_csv) report_.rows.emplace_back(file, count_rows(contents));
  }
  void note(const std::string& file, std::size_t rows) { report_.rows.emplace_back(file, rows); }
  [[nodiscard]] fs::path path(const std::string& file) const { return dir_ / file; }

  StageReport finish() {
    report_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return std::move(report_);
  }

 private:
  fs::path dir_;
  std::chrono::steady_clock::time_point start_;
  StageReport report_;
};

std::vector<SigningResult> sign_all(const RunConfig& config, const Tape& tape) {
  const auto stocks = tape.stocks();
  std::vector<SigningResult> out(stocks.size());
  SigningOptions opts;
  opts.lr_delay_ns = config.lr_delay_ns;
  parallel_for(stocks.size(), config.worker_count(), [&](std::size_t s) { out[s] = sign_trades(stocks[s], opts); });
  return out;
}

std::size_t stock_index(const Tape& tape, const std::string& symbol, const std::string& where) {
  auto idx = tape.find_stock(symbol);
  if (!idx) throw InputError(where + ": stock '" + symbol + "' is not in the tape");
  return *idx;
}

/// Child events of an order read back from an artifact.
std::vector<SeriesEvent> order_events(const Tape& tape, const SigningResult& signing, const StockTape& stock,
                                      const HiddenOrder& order, const std::string& where) {
  if (order.first_idx > order.last_idx || order.last_idx >= stock.trades.size()) {
    throw InputError(where + ": trade indices " + std::to_string(order.first_idx) + ".." +
                     std::to_string(order.last_idx) + " out of range for " + order.stock);
  }
  if (!tape.members().contains(order.member)) {
    throw InputError(where + ": member '" + order.member + "' is not in the tape");
  }
  return member_events(tape, stock, signing, tape.members().id(order.member), order.first_idx, order.last_idx);
}

std::vector<OrderMetrics> filtered_orders(const RunConfig& config, const Tape* tape, FilterReport* report) {
  const auto all = read_order_metrics(config.output_dir / files::kOrderMetrics);
  TradingCalendar calendar = tape ? tape->calendar() : read_calendar(config.calendar_path());
  return apply_filters(all, calendar, config.filters, report);
}

json parse(const std::string& text) { return json::parse(text); }

json error_object(const std::exception& e) { return json{{"error", e.what()}}; }

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void RunConfig::bind(ParamTable& t) {
  t.add("input_dir", input_dir, "directory holding trades.csv, quotes.csv, calendar.csv");
  t.add("trades_file", trades_file, "trade file (default input_dir/trades.csv)");
  t.add("quotes_file", quotes_file, "quote file (default input_dir/quotes.csv)");
  t.add("calendar_file", calendar_file, "calendar file (default input_dir/calendar.csv)");
  t.add("index_file", index_file, "index series (default input_dir/index.csv when present)");
  t.add("ground_truth_file", ground_truth_file, "ground truth (default input_dir/ground_truth.csv when present)");
  t.add("output_dir", output_dir, "artifact directory");
  t.add("workers", workers, "worker threads, 0 = hardware concurrency");

  t.add("lr_delay_ns", lr_delay_ns, "quote lookup delay for trade signing");
  t.add("write_signed_trades", write_signed_trades, "also write signed_trades.csv");

  t.add("min_active_sessions", activity.min_active_sessions, "sessions with a trade per year for a member");
  t.add("min_year_trades", activity.min_year_trades, "trades per year for a member");
  t.add("p_threshold", seg.p_threshold, "significance needed to split a segment");
  t.add("min_seg", seg.min_seg, "minimum events per segment");
  add_enum(t, "significance", seg.significance,
           {{SignificanceModel::Approximate, "approximate"}, {SignificanceModel::Permutation, "permutation"}},
           "significance model: approximate or permutation");
  t.add("permutations", seg.permutations, "shuffles of the permutation test");
  add_enum(t, "seg_variable", seg.variable,
           {{SegmentVariable::SignedVolume, "signed-volume"}, {SegmentVariable::Sign, "sign"}},
           "segmented series: signed-volume or sign");
  t.add("seg_seed", seg.seed, "seed of the permutation test");
  t.add("min_trades", extract.min_trades, "minimum trades of a hidden order");
  t.add("min_dominance", extract.min_dominance, "share of events on the dominant side");

  t.add("max_T_days", filters.max_T_days, "maximum order duration in trading days (none = off)");
  t.add("filter_min_trades", filters.min_trades, "minimum trades of an analyzed order");
  t.add("min_orders_per_stock_year", filters.min_orders_per_stock_year, "orders per stock and year");
  t.add_custom(
      "fmo_band",
      [this] {
        return filters.fmo_band ? csv::format_double(filters.fmo_band->lo) + ":" + csv::format_double(filters.fmo_band->hi)
                                : std::string("none");
      },
      [this](std::string_view s) {
        if (s == "none" || s.empty()) {
          filters.fmo_band.reset();
          return;
        }
        const auto colon = s.find(':');
        auto lo = colon == std::string_view::npos ? std::nullopt : csv::parse_double(s.substr(0, colon));
        auto hi = colon == std::string_view::npos ? std::nullopt : csv::parse_double(s.substr(colon + 1));
        if (!lo || !hi) detail::bad_value("fmo_band", s);
        filters.fmo_band = Band{*lo, *hi};
      },
      "restrict analyzed orders to f_mo in lo:hi (none = off)");
  t.add("fmo_high", fmo_high, "lower edge of the high f_mo curve band");
  t.add("fmo_low", fmo_low, "upper edge of the low f_mo curve band");
  t.add("fmo_threshold", fmo_threshold, "f_mo threshold of the conditional ensemble mean");

  t.add("grid_inner", grid_inner, "impact path nodes on [0, 1]");
  t.add("grid_outer", grid_outer, "impact path nodes on (1, 3]");
  t.add("bins_per_decade", curve.bins_per_decade, "log bins per decade of N");
  t.add("min_bin_count", curve.min_bin_count, "orders needed to keep a bin");
  add_enum(t, "fit_weighting", fit_weighting, {{FitWeighting::None, "none"}, {FitWeighting::Count, "count"}},
           "power-law fit weights: none or count");
  t.add("profile_min_count", profile_min_count, "orders needed at a profile node");
  t.add("profile_bins", profile_bins, "bins of the trading profile");
  t.add("timing_bins", timing_bins, "bins of the start and end time histograms");

  t.add("bootstrap", pca.bootstrap, "bootstrap resamples of the exponent fits");
  t.add("pca_seed", pca.seed, "bootstrap seed");
  t.add("pca_min_orders", pca.min_orders, "orders needed for the exponent fits");
  t.add("confidence", pca.confidence, "bootstrap confidence level");

  t.add("index_bins_per_decade", index.bins_per_decade, "log bins per decade of T");
  t.add("index_min_bin_count", index.min_bin_count, "orders needed to keep a T bin");
  t.add("index_windows", index.windows, "random index windows per T bin");
  t.add("index_seed", index.seed, "seed of the index windows");

  t.add("min_jaccard", min_jaccard, "overlap needed to match a detected order");

  synth.bind(t, "synth_");
}

std::string RunConfig::serialize() {
  ParamTable t;
  bind(t);
  return t.serialize();
}

void RunConfig::validate() const {
  if (!(seg.p_threshold > 0.0 && seg.p_threshold < 1.0)) throw InputError("p_threshold must lie in (0, 1)");
  if (seg.min_seg < 2) throw InputError("min_seg must be at least 2");
  if (!(extract.min_dominance >= 0.5 && extract.min_dominance <= 1.0)) {
    throw InputError("min_dominance must lie in [0.5, 1]");
  }
  if (grid_inner < 2 || grid_outer < 1) throw InputError("impact grid needs >= 2 inner and >= 1 outer nodes");
  if (curve.bins_per_decade <= 0 || index.bins_per_decade <= 0) {
    throw InputError("bins per decade must be positive");
  }
  if (profile_bins == 0 || timing_bins == 0) throw InputError("histogram bins must be positive");
  if (!(pca.confidence > 0.0 && pca.confidence < 1.0)) throw InputError("confidence must lie in (0, 1)");
  if (!(min_jaccard > 0.0 && min_jaccard <= 1.0)) throw InputError("min_jaccard must lie in (0, 1]");
}

fs::path RunConfig::trades_path() const { return trades_file.value_or(input_dir / "trades.csv"); }
fs::path RunConfig::quotes_path() const { return quotes_file.value_or(input_dir / "quotes.csv"); }
fs::path RunConfig::calendar_path() const { return calendar_file.value_or(input_dir / "calendar.csv"); }

std::optional<fs::path> RunConfig::index_path() const {
  if (index_file) return index_file;
  auto p = input_dir / "index.csv";
  return fs::exists(p) ? std::optional(p) : std::nullopt;
}

std::optional<fs::path> RunConfig::ground_truth_path() const {
  if (ground_truth_file) return ground_truth_file;
  auto p = input_dir / "ground_truth.csv";
  return fs::exists(p) ? std::optional(p) : std::nullopt;
}

std::size_t RunConfig::worker_count() const {
  if (workers > 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------------------
// Stages

Tape load_tape(const RunConfig& config, IngestReport* report) {
  return ingest_tape(config.trades_path(), config.quotes_path(), config.calendar_path(), report);
}

StageReport stage_detect(const RunConfig& config, const Tape& tape, const IngestReport* ingest) {
  StageScope scope(config, "detect");
  const auto stocks = tape.stocks();
  const auto signing = sign_all(config, tape);

  std::vector<MemberSeriesSet> sets(stocks.size());
  parallel_for(stocks.size(), config.worker_count(), [&](std::size_t s) {
    sets[s] = build_member_series(tape, stocks[s], signing[s], config.activity);
  });

  struct Job {
    std::size_t stock;
    const MemberSeries* series;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    for (const auto& series : sets[s].series) jobs.push_back({s, &series});
  }
  std::vector<std::vector<HiddenOrder>> found(jobs.size());
  std::vector<ExtractionCounts> counts(jobs.size());
  std::vector<std::size_t> segment_counts(jobs.size());
  parallel_for(jobs.size(), config.worker_count(), [&](std::size_t j) {
    SegParams seg = config.seg;
    seg.seed = mix_seed(config.seg.seed, jobs[j].stock, jobs[j].series->member.value);
    const auto segments = segment_series(*jobs[j].series, seg);
    segment_counts[j] = segments.size();
    found[j] = extract_hidden_orders(segments, *jobs[j].series, tape.calendar(), config.extract, &counts[j]);
  });

  std::vector<HiddenOrder> orders;
  ExtractionCounts total;
  std::size_t segments = 0;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    orders.insert(orders.end(), found[j].begin(), found[j].end());
    total.too_short += counts[j].too_short;
    total.not_dominant += counts[j].not_dominant;
    total.zero_volume += counts[j].zero_volume;
    total.zero_duration += counts[j].zero_duration;
    segments += segment_counts[j];
  }
  std::sort(orders.begin(), orders.end(), order_less);
  scope.write(files::kHiddenOrders, hidden_orders_csv(orders));
  if (config.write_signed_trades) scope.write(files::kSignedTrades, signed_trades_csv(tape, signing));

  std::size_t discarded = 0;
  std::size_t unclassifiable = 0;
  std::size_t inferred = 0;
  for (const auto& s : sets) discarded += s.discarded_members;
  for (const auto& s : signing) {
    unclassifiable += s.unclassifiable;
    inferred += s.inferred;
  }
  json summary{{"stocks", stocks.size()},
               {"trades", tape.trade_count()},
               {"quotes", tape.quote_count()},
               {"inferred_signs", inferred},
               {"unclassifiable_signs", unclassifiable},
               {"series", jobs.size()},
               {"discarded_members", discarded},
               {"segments", segments},
               {"hidden_orders", orders.size()},
               {"rejected_too_short", total.too_short},
               {"rejected_not_dominant", total.not_dominant},
               {"rejected_zero_volume", total.zero_volume},
               {"rejected_zero_duration", total.zero_duration}};
  if (ingest) {
    json rejections = json::array();
    for (const auto& r : ingest->rejections) {
      rejections.push_back(json{{"file", r.file}, {"line", r.line}, {"reason", r.reason}});
    }
    summary["ingest"] = json{{"trades", ingest->trades},
                             {"quotes", ingest->quotes},
                             {"sessions", ingest->sessions},
                             {"unquoted_trades", ingest->unquoted_trades},
                             {"rejections", rejections}};
  }
  scope.write(files::kDetect, summary.dump(2) + "\n", false);
  return scope.finish();
}

StageReport stage_metrics(const RunConfig& config, const Tape& tape) {
  StageScope scope(config, "metrics");
  const auto source = scope.path(files::kHiddenOrders);
  const auto orders = read_hidden_orders(source);
  const auto signing = sign_all(config, tape);
  std::vector<OrderMetrics> out(orders.size());
  parallel_for(orders.size(), config.worker_count(), [&](std::size_t i) {
    const auto s = stock_index(tape, orders[i].stock, source.string());
    const auto& stock = tape.stocks()[s];
    const auto events = order_events(tape, signing[s], stock, orders[i], source.string());
    out[i] = compute_metrics(orders[i], events, stock);
  });
  scope.write(files::kOrderMetrics, order_metrics_csv(out));
  return scope.finish();
}

StageReport stage_impact(const RunConfig& config, const Tape& tape) {
  StageScope scope(config, "impact");
  FilterReport filter_report;
  const auto orders = filtered_orders(config, &tape, &filter_report);
  const auto source = scope.path(files::kOrderMetrics).string();
  if (orders.empty()) {
    throw PreconditionError("all " + std::to_string(filter_report.input) +
                            " orders were removed by the analysis filters; impact analytics need at least one");
  }
  const auto& calendar = tape.calendar();
  const auto grid = config.grid();

  // One spread per (stock, year), computed before the parallel section.
  std::map<std::pair<std::size_t, int>, double> spreads;
  std::vector<std::size_t> stock_of(orders.size());
  for (std::size_t i = 0; i < orders.size(); ++i) {
    stock_of[i] = stock_index(tape, orders[i].order.stock, source);
    spreads.emplace(std::pair{stock_of[i], calendar.year_of(orders[i].order.start_ts)}, 0.0);
  }
  std::vector<std::pair<std::size_t, int>> keys;
  for (const auto& [k, v] : spreads) keys.push_back(k);
  std::vector<double> values(keys.size());
  parallel_for(keys.size(), config.worker_count(), [&](std::size_t k) {
    values[k] = annual_relative_spread(tape.stocks()[keys[k].first], calendar, keys[k].second);
  });
  for (std::size_t k = 0; k < keys.size(); ++k) spreads[keys[k]] = values[k];

  std::vector<std::optional<OrderImpact>> impacts(orders.size());
  parallel_for(orders.size(), config.worker_count(), [&](std::size_t i) {
    const auto& o = orders[i].order;
    try {
      impacts[i] = order_impact(o, tape.stocks()[stock_of[i]], calendar,
                                spreads.at({stock_of[i], calendar.year_of(o.start_ts)}), grid);
    } catch (const NoQuoteError&) {
    }
  });

  std::vector<ImpactRecord> records;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (impacts[i]) records.push_back(ImpactRecord{orders[i], std::move(*impacts[i])});
  }
  const std::size_t no_quote = orders.size() - records.size();
  if (records.empty()) throw PreconditionError("no analyzed order has a prevailing quote at its start");
  scope.write(files::kImpacts, impacts_csv(records));
  scope.write(files::kImpactPaths, impact_paths_csv(records, grid));

  std::vector<OrderMetrics> kept;
  std::vector<double> R;
  std::vector<ImpactSample> samples;
  std::vector<ImpactSample> buys;
  std::vector<ImpactSample> sells;
  for (const auto& r : records) {
    kept.push_back(r.metrics);
    R.push_back(r.impact.R);
    const ImpactSample s{static_cast<double>(r.metrics.order.n_trades), r.metrics.f_mo, r.impact.R};
    samples.push_back(s);
    (r.metrics.order.epsilon > 0 ? buys : sells).push_back(s);
  }
  const auto ensemble = ensemble_stats(kept, R, config.fmo_threshold);
  json stats{{"ensemble", parse(ensemble_json(ensemble))},
             {"filters", parse(filter_report_json(filter_report))},
             {"excluded_no_quote", no_quote},
             {"impact_orders", records.size()},
             {"truncated_paths", std::count_if(records.begin(), records.end(),
                                               [](const ImpactRecord& r) { return r.impact.truncated; })}};
  scope.write(files::kStats, stats.dump(2) + "\n", false);

  const char* weighting = config.fit_weighting == FitWeighting::Count ? "count" : "none";
  json fits{{"weighting", weighting}, {"bins_per_decade", config.curve.bins_per_decade},
            {"min_bin_count", config.curve.min_bin_count}};

  const auto main_curve = impact_vs_N(samples, std::nullopt, config.curve);
  scope.write(files::kImpactCurve, impact_curve_csv(main_curve));
  try {
    fits["all"] = parse(powerlaw_json(fit_powerlaw(main_curve, config.fit_weighting), "gamma"));
  } catch (const PreconditionError& e) {
    fits["all"] = error_object(e);
  }

  struct BandCurve {
    const char* name;
    const char* file;
    Band band;
  };
  const BandCurve bands[] = {{"fmo_high", files::kImpactCurveHigh, Band{config.fmo_high, 1.0}},
                             {"fmo_low", files::kImpactCurveLow, Band{0.0, config.fmo_low}}};
  for (const auto& [name, file, band] : bands) {
    try {
      const auto curve = impact_vs_N(samples, band, config.curve);
      scope.write(file, impact_curve_csv(curve));
      json fit = parse(powerlaw_json(fit_powerlaw(curve, config.fit_weighting), "gamma"));
      fit["band"] = {band.lo, band.hi};
      fits[name] = fit;
    } catch (const PreconditionError& e) {
      scope.write(file, impact_curve_csv(ImpactCurve{}));
      fits[name] = error_object(e);
      fits[name]["band"] = {band.lo, band.hi};
    }
  }

  auto side_curve = [&](const std::vector<ImpactSample>& s) -> std::optional<ImpactCurve> {
    try {
      return impact_vs_N(s, std::nullopt, config.curve);
    } catch (const PreconditionError&) {
      return std::nullopt;
    }
  };
  scope.write(files::kImpactCurveBySide, side_curves_csv(side_curve(buys), side_curve(sells)));

  if (const auto index_file = config.index_path()) {
    const auto index = read_index(*index_file);
    std::vector<std::pair<double, double>> tr;
    for (const auto& r : records) tr.emplace_back(r.metrics.order.T_seconds, r.impact.R);
    try {
      const auto comparison = impact_vs_T_with_index(tr, index, calendar, config.index);
      scope.write(files::kImpactVsT, impact_vs_T_csv(comparison));
      fits["index"] = json{{"seed", config.index.seed}, {"windows", config.index.windows},
                           {"warnings", comparison.warnings}};
    } catch (const PreconditionError& e) {
      fits["index"] = error_object(e);
    }
  }
  merge_json_section(scope.path(files::kFits), "impact", fits.dump());
  return scope.finish();
}

StageReport stage_profile(const RunConfig& config, const Tape& tape) {
  StageScope scope(config, "profile");
  const auto grid = config.grid();
  const auto impacts_file = scope.path(files::kImpacts);
  const auto records = read_impacts(impacts_file, scope.path(files::kImpactPaths), grid);
  if (records.empty()) throw PreconditionError(impacts_file.string() + " holds no orders");

  std::vector<OrderImpact> impacts;
  std::vector<HiddenOrder> orders;
  for (const auto& r : records) {
    impacts.push_back(r.impact);
    orders.push_back(r.metrics.order);
  }
  const auto path_profile = impact_path_profile(impacts, grid);

  const auto signing = sign_all(config, tape);
  std::vector<OrderTrades> trades(records.size());
  parallel_for(records.size(), config.worker_count(), [&](std::size_t i) {
    const auto s = stock_index(tape, orders[i].stock, impacts_file.string());
    trades[i].stock = &tape.stocks()[s];
    trades[i].order = orders[i];
    trades[i].events = order_events(tape, signing[s], tape.stocks()[s], orders[i], impacts_file.string());
  });
  const auto trading = trading_profile(trades, tape.calendar(), config.profile_bins);
  const NamedProfile curves[] = {{"impact_path", &path_profile},
                                 {"own_volume", &trading.own},
                                 {"market_volume", &trading.market}};
  scope.write(files::kProfile, profile_csv(curves));
  const auto [start, end] = start_end_distributions(orders, tape.calendar(), config.timing_bins);
  scope.write(files::kTiming, timing_csv(start, end));

  json fits{{"min_count", config.profile_min_count}};
  try {
    const auto beta = fit_impact_path(path_profile, config.profile_min_count);
    fits["beta"] = parse(powerlaw_json(beta, "beta"));
    try {
      fits["reversion"] = parse(reversion_json(reversion_ratio(path_profile, beta.exponent, config.profile_min_count)));
    } catch (const PreconditionError& e) {
      fits["reversion"] = error_object(e);
    }
  } catch (const PreconditionError& e) {
    fits["beta"] = error_object(e);
  }
  merge_json_section(scope.path(files::kFits), "profile", fits.dump());
  return scope.finish();
}

StageReport stage_pca(const RunConfig& config) {
  StageScope scope(config, "pca");
  FilterReport report;
  const auto orders = filtered_orders(config, nullptr, &report);
  if (orders.size() < config.pca.min_orders) {
    throw PreconditionError("exponent fits need at least " + std::to_string(config.pca.min_orders) +
                            " orders after filtering, have " + std::to_string(orders.size()));
  }
  const auto fits = pca_exponents(orders, config.pca);
  merge_json_section(scope.path(files::kFits), "pca", pca_json(fits));
  return scope.finish();
}

StageReport stage_score(const RunConfig& config, const Tape& tape) {
  StageScope scope(config, "score");
  const auto truth_file = config.ground_truth_path();
  if (!truth_file) throw MissingFileError((config.input_dir / "ground_truth.csv").string());
  const auto truth = read_ground_truth(*truth_file);
  const auto detected = read_hidden_orders(scope.path(files::kHiddenOrders));
  ScoreParams params;
  params.min_jaccard = config.min_jaccard;
  const auto score = score_detection(truth, detected, tape, params);
  scope.write(files::kScore, pretty_json(score_json(score)), false);
  return scope.finish();
}

StageReport stage_synth(const RunConfig& config) {
  StageScope scope(config, "synth");
  config.synth.validate();
  const auto market = generate(config.synth);
  write_market(market, config.output_dir);
  scope.note("trades.csv", market.tape.trade_count());
  scope.note("quotes.csv", market.tape.quote_count());
  scope.note("calendar.csv", market.tape.calendar().sessions().size());
  scope.note("index.csv", market.index.size());
  scope.note("ground_truth.csv", market.truth.size());
  return scope.finish();
}

// ---------------------------------------------------------------------------

namespace {

void write_manifest(const RunConfig& config, const std::vector<StageReport>& stages, double total_seconds) {
  json list = json::array();
  for (const auto& s : stages) {
    json rows = json::object();
    for (const auto& [file, n] : s.rows) rows[file] = n;
    json entry{{"name", s.name}, {"status", s.status}, {"seconds", s.seconds}, {"rows", rows}};
    if (!s.message.empty()) entry["message"] = s.message;
    list.push_back(entry);
  }
  json manifest{{"version", kVersion},
                {"stages", list},
                {"seeds",
                 {{"pca_seed", config.pca.seed},
                  {"index_seed", config.index.seed},
                  {"seg_seed", config.seg.seed},
                  {"synth_seed", config.synth.seed}}},
                {"workers", config.worker_count()},
                {"config", files::kConfig},
                {"seconds", total_seconds}};
  csv::write_file(config.output_dir / files::kManifest, manifest.dump(2) + "\n");
}

}  // namespace

std::vector<StageReport> run_pipeline(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  fs::create_directories(config.output_dir);
  fs::remove(config.output_dir / files::kFailed);
  fs::remove(config.output_dir / files::kFits);
  RunConfig echo = config;
  csv::write_file(config.output_dir / files::kConfig, echo.serialize());

  std::vector<StageReport> stages;
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  auto skip = [&](const std::string& name, const std::string& why) {
    StageReport r;
    r.name = name;
    r.status = "skipped";
    r.message = why;
    stages.push_back(std::move(r));
  };
  std::string current = "ingest";
  try {
    const auto t0 = std::chrono::steady_clock::now();
    IngestReport ingest;
    const Tape tape = load_tape(config, &ingest);
    StageReport load;
    load.name = "ingest";
    load.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    load.rows = {{"trades", ingest.trades}, {"quotes", ingest.quotes}, {"rejected", ingest.rejections.size()}};
    stages.push_back(load);

    current = "detect";
    stages.push_back(stage_detect(config, tape, &ingest));
    current = "metrics";
    stages.push_back(stage_metrics(config, tape));

    bool have_impacts = false;
    current = "impact";
    try {
      stages.push_back(stage_impact(config, tape));
      have_impacts = true;
    } catch (const PreconditionError& e) {
      skip("impact", e.what());
    }
    current = "profile";
    if (have_impacts) {
      try {
        stages.push_back(stage_profile(config, tape));
      } catch (const PreconditionError& e) {
        skip("profile", e.what());
      }
    } else {
      skip("profile", "impact stage skipped");
    }
    current = "pca";
    try {
      stages.push_back(stage_pca(config));
    } catch (const PreconditionError& e) {
      skip("pca", e.what());
    }
    current = "score";
    if (config.ground_truth_path()) {
      stages.push_back(stage_score(config, tape));
    } else {
      skip("score", "no ground truth");
    }
  } catch (const std::exception& e) {
    StageReport failed;
    failed.name = current;
    failed.status = "failed";
    failed.message = e.what();
    stages.push_back(failed);
    write_manifest(config, stages, elapsed());
    csv::write_file(config.output_dir / files::kFailed, current + ": " + e.what() + "\n");
    throw;
  }
  write_manifest(config, stages, elapsed());
  return stages;
}

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const InputError*>(&e)) return 2;
  if (dynamic_cast<const PreconditionError*>(&e) || dynamic_cast<const MissingFileError*>(&e)) return 3;
  return 4;
}

}  // namespace metaimpact
