#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include <gtest/gtest.h>

#include "metaimpact/artifacts.hpp"
#include "metaimpact/pipeline.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
namespace mi = metaimpact;
using namespace testing_support;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

/// Runs the command line tool with `args` (already shell-quoted as needed).
Result cli(const TempDir& dir, const std::string& args, const std::string& env = "") {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd =
      env + " '" + std::string(METAIMPACT_CLI) + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

const std::string kSmall =
    " --synth-n-stocks 2 --synth-n-sessions 40 --synth-n-orders 60 --min-active-sessions 30"
    " --min-year-trades 200 --min-orders-per-stock-year 0 --bins-per-decade 4 --min-bin-count 5"
    " --profile-min-count 5 --bootstrap 100 --index-windows 50 --index-min-bin-count 5";

std::string in_out(const TempDir& dir, const std::string& out) {
  return " --input-dir '" + dir.path().string() + "' --output-dir '" + (dir / out).string() + "'";
}

}  // namespace

TEST(Cli, HelpAndParseErrors) {
  const TempDir dir("cli_parse");
  EXPECT_EQ(cli(dir, "--help").code, 0);
  EXPECT_EQ(cli(dir, "").code, 2);
  EXPECT_EQ(cli(dir, "run --no-such-flag 1").code, 2);
  EXPECT_EQ(cli(dir, "frobnicate").code, 2);
  const auto bad = cli(dir, "run --p-threshold abc");
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("p_threshold"), std::string::npos) << bad.err;
  EXPECT_EQ(cli(dir, "run --p-threshold 1.5").code, 2);
}

TEST(Cli, MissingQuoteFileExitsThreeNamingPath) {
  const TempDir dir("cli_missing");
  ASSERT_EQ(cli(dir, "synth" + kSmall + " --output-dir '" + dir.path().string() + "'").code, 0);
  fs::remove(dir / "quotes.csv");
  const auto r = cli(dir, "run" + kSmall + in_out(dir, "out"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find((dir / "quotes.csv").string()), std::string::npos) << r.err;
  EXPECT_TRUE(fs::exists(dir / "out" / "FAILED"));
}

TEST(Cli, FlagsOverrideConfigFileAndEnvironment) {
  const TempDir dir("cli_config");
  dir.write("run.cfg", "# analysis settings\np_threshold = 0.9\nmin_seg = 7\nworkers = 2\n");
  const auto r = cli(dir, "run --config '" + (dir / "run.cfg").string() + "' --p-threshold 0.97 --print-config");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("p_threshold = 0.97\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("min_seg = 7\n"), std::string::npos);
  EXPECT_NE(r.out.find("workers = 2\n"), std::string::npos);

  const auto env = cli(dir, "run --config '" + (dir / "run.cfg").string() + "' --print-config", "METAIMPACT_WORKERS=5");
  EXPECT_NE(env.out.find("workers = 5\n"), std::string::npos) << env.out;
  const auto flag = cli(dir, "run --workers 3 --print-config", "METAIMPACT_WORKERS=5");
  EXPECT_NE(flag.out.find("workers = 3\n"), std::string::npos) << flag.out;

  dir.write("bad.cfg", "p_threshold = 0.9\nunknown_key = 1\n");
  const auto bad = cli(dir, "run --config '" + (dir / "bad.cfg").string() + "' --print-config");
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("unknown_key"), std::string::npos) << bad.err;
}

TEST(Cli, SubcommandsComposeToRun) {
  const TempDir dir("cli_compose");
  ASSERT_EQ(cli(dir, "synth" + kSmall + " --output-dir '" + dir.path().string() + "'").code, 0);
  const auto run = cli(dir, "run" + kSmall + in_out(dir, "run"));
  ASSERT_EQ(run.code, 0) << run.err;
  for (const char* stage : {"detect", "metrics", "impact", "profile", "pca", "score"}) {
    const auto r = cli(dir, std::string(stage) + kSmall + in_out(dir, "staged"));
    ASSERT_EQ(r.code, 0) << stage << ": " << r.err;
  }
  for (const auto& e : fs::directory_iterator(dir / "staged")) {
    const auto name = e.path().filename();
    EXPECT_EQ(slurp(e.path()), slurp(dir / "run" / name)) << name;
  }
  const auto score = nlohmann::json::parse(slurp(dir / "staged" / mi::files::kScore));
  EXPECT_TRUE(score.contains("precision"));
  EXPECT_TRUE(score.contains("recall"));

  const auto again = cli(dir, "run" + kSmall + in_out(dir, "run_again"));
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(slurp(dir / "run" / mi::files::kFits), slurp(dir / "run_again" / mi::files::kFits));
}

TEST(Cli, PcaOnTwoOrdersRefuses) {
  const TempDir dir("cli_pca");
  ASSERT_EQ(cli(dir, "synth" + kSmall + " --output-dir '" + dir.path().string() + "'").code, 0);
  mi::OrderMetrics m;
  m.order.stock = "S01";
  m.order.member = "BRK000";
  m.order.epsilon = 1;
  m.order.n_trades = 12;
  m.order.signed_volume = 5000;
  m.order.T_seconds = 300;
  fs::create_directories(dir / "out");
  mi::csv::write_file(dir / "out" / mi::files::kOrderMetrics, mi::order_metrics_csv(std::vector<mi::OrderMetrics>{m, m}));
  const auto r = cli(dir, "pca" + kSmall + in_out(dir, "out"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("at least 30 orders"), std::string::npos) << r.err;
}

TEST(Cli, MetricsWithoutDetectOutputIsMissingFile) {
  const TempDir dir("cli_nodetect");
  ASSERT_EQ(cli(dir, "synth" + kSmall + " --output-dir '" + dir.path().string() + "'").code, 0);
  const auto r = cli(dir, "metrics" + kSmall + in_out(dir, "empty"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("hidden_orders.csv"), std::string::npos) << r.err;
}
