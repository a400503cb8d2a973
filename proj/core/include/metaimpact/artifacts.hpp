#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metaimpact/impact.hpp"
#include "metaimpact/order_metrics.hpp"
#include "metaimpact/score.hpp"
#include "metaimpact/segmentation.hpp"
#include "metaimpact/signing.hpp"

namespace metaimpact {

inline constexpr std::string_view kHiddenOrdersHeader =
    "stock,member,epsilon,start_ts,end_ts,n_trades,signed_volume,T_seconds,dominant_fraction,first_idx,last_idx";
inline constexpr std::string_view kOrderMetricsHeader =
    "stock,member,epsilon,start_ts,end_ts,n_trades,signed_volume,T_seconds,dominant_fraction,first_idx,last_idx,"
    "f_mo,alpha";
inline constexpr std::string_view kImpactsHeader =
    "order,stock,member,start_ts,end_ts,first_idx,last_idx,epsilon,n_trades,f_mo,alpha,T_seconds,signed_volume,spread,r,R,truncated";
inline constexpr std::string_view kImpactPathsHeader = "order,node,x,R";
inline constexpr std::string_view kImpactCurveHeader = "bin_lo,bin_hi,bin_center,mean_R,se_R,count";
inline constexpr std::string_view kSideCurveHeader = "side,bin_lo,bin_hi,bin_center,mean_R,se_R,count";
inline constexpr std::string_view kProfileHeader = "curve,x,mean,se,count";
inline constexpr std::string_view kTimingHeader = "kind,bin_lo,bin_hi,probability,count";
inline constexpr std::string_view kImpactVsTHeader =
    "bin_lo,bin_hi,bin_center_seconds,mean_R,se_R,count,mean_index_return,windows";

std::string hidden_orders_csv(std::span<const HiddenOrder> orders);
std::vector<HiddenOrder> read_hidden_orders(const std::filesystem::path& path);

std::string order_metrics_csv(std::span<const OrderMetrics> orders);
/// Reads orders_metrics.csv; mean_child_volume is not serialized and stays 0.
std::vector<OrderMetrics> read_order_metrics(const std::filesystem::path& path);

struct ImpactRecord {
  OrderMetrics metrics;
  OrderImpact impact;
};

std::string impacts_csv(std::span<const ImpactRecord> records);
std::string impact_paths_csv(std::span<const ImpactRecord> records, const ImpactGrid& grid);
/// Rebuilds the records of impacts.csv plus the paths of impact_paths.csv.
std::vector<ImpactRecord> read_impacts(const std::filesystem::path& impacts, const std::filesystem::path& paths,
                                       const ImpactGrid& grid);

std::string impact_curve_csv(const ImpactCurve& curve);
std::string side_curves_csv(const std::optional<ImpactCurve>& buy, const std::optional<ImpactCurve>& sell);

struct NamedProfile {
  std::string name;
  const ProfileCurve* curve = nullptr;
};
std::string profile_csv(std::span<const NamedProfile> curves);
std::string timing_csv(const Histogram& start, const Histogram& end);
std::string impact_vs_T_csv(const IndexComparison& comparison);

// JSON fragments (serialized with sorted keys).
std::string powerlaw_json(const PowerLawFit& fit, std::string_view exponent_name);
std::string pca_json(const PcaExponents& fits);
std::string reversion_json(const Reversion& r);
std::string ensemble_json(const EnsembleStats& stats);
std::string filter_report_json(const FilterReport& report);
std::string score_json(const DetectionScore& score);
/// {"error": message}
std::string error_json(std::string_view message);

/// Builds an object from (key, JSON text) members.
std::string json_object(std::span<const std::pair<std::string, std::string>> members);

/// Replaces one top-level member of the JSON object stored at `path`
/// (created if absent) and rewrites the file with sorted keys.
void merge_json_section(const std::filesystem::path& path, const std::string& section, const std::string& json);

std::string pretty_json(const std::string& json);

}  // namespace metaimpact
