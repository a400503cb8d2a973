#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "metaimpact/segmentation.hpp"
#include "metaimpact/stats.hpp"

namespace metaimpact {

struct OrderMetrics {
  HiddenOrder order;
  double f_mo = 0.0;
  double alpha = 0.0;
  double mean_child_volume = 0.0;
};

/// Unsigned market-order volume over unsigned total volume of the events.
double compute_f_mo(std::span<const SeriesEvent> events);

/// Unsigned volume of the order's own trades over all volume traded in the
/// stock during [start, end] (both endpoints included). A self-crossed trade
/// counts once in the numerator, so the ratio never exceeds 1.
double compute_alpha(std::span<const SeriesEvent> events, const StockTape& stock, Nanos start, Nanos end);

OrderMetrics compute_metrics(const HiddenOrder& order, std::span<const SeriesEvent> events, const StockTape& stock);

struct Band {
  double lo = 0.0;
  double hi = 1.0;
  /// Both bounds inclusive.
  [[nodiscard]] bool contains(double v) const noexcept { return v >= lo && v <= hi; }
};

struct FilterSpec {
  /// Maximum duration in trading days; one day is the length of the order's
  /// starting session. Inclusive.
  std::optional<double> max_T_days = 1.0;
  std::size_t min_trades = 10;
  /// Orders per (stock, calendar year), counted over the unfiltered input.
  std::size_t min_orders_per_stock_year = 250;
  std::optional<Band> fmo_band;
};

struct FilterReport {
  std::size_t input = 0;
  std::size_t failed_duration = 0;
  std::size_t failed_min_trades = 0;
  std::size_t failed_stock_year = 0;
  std::size_t failed_fmo_band = 0;
  std::size_t kept = 0;
};

/// Every filter is evaluated against the full input, so the surviving set
/// does not depend on the order in which filters are listed. An empty result
/// is returned (with report) rather than thrown.
std::vector<OrderMetrics> apply_filters(std::span<const OrderMetrics> orders, const TradingCalendar& calendar,
                                        const FilterSpec& spec, FilterReport* report = nullptr);

struct EnsembleStats {
  std::size_t n_orders = 0;
  stats::MeanSE mean_N;
  stats::MeanSE mean_f_mo;
  stats::MeanSE mean_alpha;
  stats::MeanSE mean_R;
  stats::MeanSE mean_R_given_fmo_gt;
  double fmo_threshold = 0.8;
};

/// `R` is parallel to `orders`; NaN marks orders without an impact value.
/// Throws PreconditionError on an empty ensemble.
EnsembleStats ensemble_stats(std::span<const OrderMetrics> orders, std::span<const double> R,
                             double fmo_threshold = 0.8);

}  // namespace metaimpact
