#include <json.hpp>

#include <gtest/gtest.h>

#include "metaimpact/artifacts.hpp"
#include "metaimpact/config.hpp"
#include "metaimpact/errors.hpp"
#include "metaimpact/pipeline.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
namespace mi = metaimpact;
using namespace testing_support;
using json = nlohmann::json;

namespace {

/// Small market and analysis settings loose enough for every stage to run.
mi::RunConfig small_config(const TempDir& dir) {
  mi::RunConfig c;
  c.input_dir = dir.path();
  c.output_dir = dir / "out";
  c.synth.n_stocks = 2;
  c.synth.n_sessions = 40;
  c.synth.n_orders = 60;
  c.activity.min_active_sessions = 30;
  c.activity.min_year_trades = 200;
  c.filters.min_orders_per_stock_year = 0;
  c.curve.bins_per_decade = 4;
  c.curve.min_bin_count = 5;
  c.profile_min_count = 5;
  c.pca.bootstrap = 200;
  c.index.windows = 100;
  c.index.min_bin_count = 5;
  return c;
}

void synthesize(mi::RunConfig c) {
  c.output_dir = c.input_dir;
  mi::stage_synth(c);
}

std::vector<std::string> listing(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Pipeline, RunsEveryStageOnSyntheticMarket) {
  const TempDir dir("pipe_all");
  const auto c = small_config(dir);
  synthesize(c);
  const auto stages = mi::run_pipeline(c);
  std::vector<std::string> names;
  for (const auto& s : stages) {
    names.push_back(s.name);
    EXPECT_EQ(s.status, "ok") << s.name << ": " << s.message;
  }
  EXPECT_EQ(names, (std::vector<std::string>{"ingest", "detect", "metrics", "impact", "profile", "pca", "score"}));

  const auto manifest = json::parse(slurp(c.output_dir / mi::files::kManifest));
  EXPECT_EQ(manifest["version"], std::string(mi::kVersion));
  ASSERT_EQ(manifest["stages"].size(), 7u);
  EXPECT_EQ(manifest["stages"][1]["name"], "detect");
  EXPECT_GT(manifest["stages"][1]["rows"]["hidden_orders.csv"].get<int>(), 0);
  EXPECT_TRUE(manifest.contains("seeds"));

  const auto fits = json::parse(slurp(c.output_dir / mi::files::kFits));
  for (const char* section : {"impact", "profile", "pca"}) EXPECT_TRUE(fits.contains(section)) << section;
  EXPECT_TRUE(fits["pca"]["g1"].contains("ci_lo"));
  const auto score = json::parse(slurp(c.output_dir / mi::files::kScore));
  EXPECT_GT(score["recall"].get<double>(), 0.5);
  EXPECT_FALSE(fs::exists(c.output_dir / mi::files::kFailed));
  for (const char* f : {mi::files::kHiddenOrders, mi::files::kOrderMetrics, mi::files::kImpacts,
                        mi::files::kImpactCurve, mi::files::kProfile, mi::files::kTiming, mi::files::kStats,
                        mi::files::kImpactVsT, mi::files::kConfig}) {
    EXPECT_TRUE(fs::exists(c.output_dir / f)) << f;
  }
}

TEST(Pipeline, DefaultMarketCompletesWithAnalyticsSkipped) {
  // The default filter asks for 250 orders per stock and year; the default
  // market embeds 50 per stock, so analytics have nothing to work on.
  const TempDir dir("pipe_default");
  mi::RunConfig c;
  c.input_dir = dir.path();
  c.output_dir = dir / "out";
  synthesize(c);
  const auto stages = mi::run_pipeline(c);
  ASSERT_EQ(stages.size(), 7u);
  EXPECT_EQ(stages[1].status, "ok");
  EXPECT_EQ(stages[3].status, "skipped");
  EXPECT_NE(stages[3].message.find("filter"), std::string::npos) << stages[3].message;
  EXPECT_EQ(stages[6].status, "ok");
  const auto manifest = json::parse(slurp(c.output_dir / mi::files::kManifest));
  EXPECT_EQ(manifest["stages"].size(), 7u);
}

TEST(Pipeline, StagesComposeToTheMonolithicRun) {
  const TempDir dir("pipe_compose");
  auto c = small_config(dir);
  synthesize(c);
  mi::run_pipeline(c);

  auto staged = c;
  staged.output_dir = dir / "staged";
  mi::IngestReport ingest;
  const auto tape = mi::load_tape(staged, &ingest);
  mi::stage_detect(staged, tape, &ingest);
  mi::stage_metrics(staged, tape);
  mi::stage_impact(staged, tape);
  mi::stage_profile(staged, tape);
  mi::stage_pca(staged);
  mi::stage_score(staged, tape);

  for (const auto& f : listing(staged.output_dir)) {
    EXPECT_EQ(slurp(staged.output_dir / f), slurp(c.output_dir / f)) << f;
  }
  EXPECT_EQ(listing(staged.output_dir).size() + 2, listing(c.output_dir).size());  // config.txt, manifest.json
}

TEST(Pipeline, DeterministicAcrossRunsAndWorkerCounts) {
  const TempDir dir("pipe_det");
  auto c = small_config(dir);
  synthesize(c);
  c.workers = 1;
  c.output_dir = dir / "w1";
  mi::run_pipeline(c);
  c.workers = 8;
  c.output_dir = dir / "w8";
  mi::run_pipeline(c);
  c.output_dir = dir / "w8_again";
  mi::run_pipeline(c);
  for (const auto& f : listing(dir / "w1")) {
    if (f == mi::files::kManifest || f == mi::files::kConfig) continue;
    EXPECT_EQ(slurp(dir / "w1" / f), slurp(dir / "w8" / f)) << f;
    EXPECT_EQ(slurp(dir / "w8" / f), slurp(dir / "w8_again" / f)) << f;
  }
}

TEST(Pipeline, ConfigIsEchoedAndReloadable) {
  const TempDir dir("pipe_cfg");
  auto c = small_config(dir);
  c.seg.p_threshold = 0.97;
  synthesize(c);
  mi::run_pipeline(c);
  const auto echoed = slurp(c.output_dir / mi::files::kConfig);
  EXPECT_EQ(echoed, c.serialize());

  mi::RunConfig reloaded;
  mi::ParamTable table;
  reloaded.bind(table);
  table.apply(mi::read_key_values(c.output_dir / mi::files::kConfig));
  EXPECT_EQ(reloaded.serialize(), echoed);
  EXPECT_EQ(reloaded.seg.p_threshold, 0.97);
}

TEST(Pipeline, MissingQuoteFileNamesPathAndLeavesMarker) {
  const TempDir dir("pipe_missing");
  auto c = small_config(dir);
  synthesize(c);
  fs::remove(dir / "quotes.csv");
  try {
    mi::run_pipeline(c);
    FAIL() << "expected an error";
  } catch (const std::exception& e) {
    EXPECT_EQ(mi::exit_code_for(e), 3);
    EXPECT_NE(std::string(e.what()).find((dir / "quotes.csv").string()), std::string::npos) << e.what();
  }
  EXPECT_TRUE(fs::exists(c.output_dir / mi::files::kFailed));
  const auto manifest = json::parse(slurp(c.output_dir / mi::files::kManifest));
  EXPECT_EQ(manifest["stages"].back()["status"], "failed");
}

TEST(Pipeline, SchemaMismatchNamesExpectedAndFoundHeaders) {
  const TempDir dir("pipe_schema");
  auto c = small_config(dir);
  synthesize(c);
  const auto tape = mi::load_tape(c);
  fs::create_directories(c.output_dir);
  mi::csv::write_file(c.output_dir / mi::files::kHiddenOrders, "stock,member,oops\nS01,BRK000,1\n");
  try {
    mi::stage_metrics(c, tape);
    FAIL() << "expected an error";
  } catch (const mi::InputError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find(std::string(mi::kHiddenOrdersHeader)), std::string::npos) << what;
    EXPECT_NE(what.find("stock,member,oops"), std::string::npos) << what;
    EXPECT_EQ(mi::exit_code_for(e), 2);
  }
}

TEST(Pipeline, PcaRefusesTinyInput) {
  const TempDir dir("pipe_pca");
  auto c = small_config(dir);
  synthesize(c);
  fs::create_directories(c.output_dir);
  mi::OrderMetrics m;
  m.order.stock = "S01";
  m.order.member = "BRK000";
  m.order.epsilon = 1;
  m.order.n_trades = 12;
  m.order.signed_volume = 5000;
  m.order.T_seconds = 300;
  m.f_mo = 0.5;
  m.alpha = 0.2;
  const std::vector<mi::OrderMetrics> two{m, m};
  mi::csv::write_file(c.output_dir / mi::files::kOrderMetrics, mi::order_metrics_csv(two));
  try {
    mi::stage_pca(c);
    FAIL() << "expected an error";
  } catch (const mi::PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("30"), std::string::npos) << e.what();
    EXPECT_EQ(mi::exit_code_for(e), 3);
  }
}

TEST(Pipeline, InvalidConfigRejected) {
  const TempDir dir("pipe_invalid");
  auto c = small_config(dir);
  c.seg.p_threshold = 1.5;
  EXPECT_THROW(c.validate(), mi::InputError);
  mi::ParamTable table;
  c.bind(table);
  EXPECT_THROW(table.set("no_such_key", "1"), mi::InputError);
  EXPECT_THROW(table.set("significance", "bogus"), mi::InputError);
  EXPECT_THROW(table.set("workers", "-3"), mi::InputError);
}
