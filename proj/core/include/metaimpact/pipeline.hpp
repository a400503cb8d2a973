#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "metaimpact/config.hpp"
#include "metaimpact/impact.hpp"
#include "metaimpact/order_metrics.hpp"
#include "metaimpact/segmentation.hpp"
#include "metaimpact/signing.hpp"
#include "metaimpact/synth.hpp"
#include "metaimpact/tape.hpp"

namespace metaimpact {

inline constexpr std::string_view kVersion = "0.3.0";

/// Every tunable of a pipeline run. Keys in the serialized form match the
/// struct field names; synth keys carry a `synth_` prefix.
struct RunConfig {
  std::filesystem::path input_dir = ".";
  /// Explicit file paths override `input_dir/<default name>`.
  std::optional<std::filesystem::path> trades_file;
  std::optional<std::filesystem::path> quotes_file;
  std::optional<std::filesystem::path> calendar_file;
  std::optional<std::filesystem::path> index_file;         // index.csv used when present
  std::optional<std::filesystem::path> ground_truth_file;  // ground_truth.csv used when present
  std::filesystem::path output_dir = "out";
  /// 0 selects the hardware concurrency. Output bytes never depend on it.
  std::size_t workers = 0;

  Nanos lr_delay_ns = 0;
  bool write_signed_trades = false;

  ActivityFilter activity;
  SegParams seg;
  ExtractParams extract;

  FilterSpec filters;
  double fmo_high = 0.8;  // band [fmo_high, 1]
  double fmo_low = 0.2;   // band [0, fmo_low]
  double fmo_threshold = 0.8;

  std::size_t grid_inner = 30;
  std::size_t grid_outer = 20;
  CurveParams curve;
  FitWeighting fit_weighting = FitWeighting::None;
  std::size_t profile_min_count = 20;
  std::size_t profile_bins = 20;
  std::size_t timing_bins = 20;

  PcaParams pca;
  IndexParams index;
  double min_jaccard = 0.5;

  SynthConfig synth;

  /// Registers every field. The table holds references into *this.
  void bind(ParamTable& table);
  [[nodiscard]] std::string serialize();
  void validate() const;

  [[nodiscard]] std::filesystem::path trades_path() const;
  [[nodiscard]] std::filesystem::path quotes_path() const;
  [[nodiscard]] std::filesystem::path calendar_path() const;
  /// Empty when no index is configured and none exists in input_dir.
  [[nodiscard]] std::optional<std::filesystem::path> index_path() const;
  [[nodiscard]] std::optional<std::filesystem::path> ground_truth_path() const;
  [[nodiscard]] std::size_t worker_count() const;
  [[nodiscard]] ImpactGrid grid() const { return ImpactGrid(grid_inner, grid_outer); }
};

/// Artifact names inside the output directory.
namespace files {
inline constexpr const char* kHiddenOrders = "hidden_orders.csv";
inline constexpr const char* kSignedTrades = "signed_trades.csv";
inline constexpr const char* kOrderMetrics = "orders_metrics.csv";
inline constexpr const char* kImpacts = "impacts.csv";
inline constexpr const char* kImpactPaths = "impact_paths.csv";
inline constexpr const char* kImpactCurve = "impact_curve.csv";
inline constexpr const char* kImpactCurveHigh = "impact_curve_fmo_high.csv";
inline constexpr const char* kImpactCurveLow = "impact_curve_fmo_low.csv";
inline constexpr const char* kImpactCurveBySide = "impact_curve_by_side.csv";
inline constexpr const char* kImpactVsT = "impact_vs_T.csv";
inline constexpr const char* kProfile = "profile.csv";
inline constexpr const char* kTiming = "timing_hist.csv";
inline constexpr const char* kStats = "stats.json";
inline constexpr const char* kFits = "fits.json";
inline constexpr const char* kScore = "score.json";
inline constexpr const char* kDetect = "detect.json";
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kConfig = "config.txt";
inline constexpr const char* kFailed = "FAILED";
}  // namespace files

struct StageReport {
  std::string name;
  std::string status = "ok";  // ok, skipped or failed
  std::string message;
  double seconds = 0.0;
  std::vector<std::pair<std::string, std::size_t>> rows;  // artifact, data rows
};

Tape load_tape(const RunConfig& config, IngestReport* report = nullptr);

/// Each stage reads its inputs from the tape and from earlier artifacts in
/// config.output_dir, and writes its own artifacts there.
StageReport stage_detect(const RunConfig& config, const Tape& tape, const IngestReport* ingest = nullptr);
StageReport stage_metrics(const RunConfig& config, const Tape& tape);
/// Throws PreconditionError when the filters leave no order.
StageReport stage_impact(const RunConfig& config, const Tape& tape);
StageReport stage_profile(const RunConfig& config, const Tape& tape);
StageReport stage_pca(const RunConfig& config);
StageReport stage_score(const RunConfig& config, const Tape& tape);
StageReport stage_synth(const RunConfig& config);

/// detect, metrics, impact, profile, pca, then score when ground truth is
/// available. Analytics stages that lack data are recorded as skipped. On
/// any other error a FAILED marker is written and the error is rethrown.
std::vector<StageReport> run_pipeline(const RunConfig& config);

/// Exit status for an exception escaping a stage: 2 input, 3 precondition
/// or missing file, 4 anything else.
int exit_code_for(const std::exception& e) noexcept;

}  // namespace metaimpact
