#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "metaimpact/order_metrics.hpp"
#include "metaimpact/stats.hpp"
#include "metaimpact/tape.hpp"

namespace metaimpact {

/// Normalized-time sampling grid t/T for impact paths: `inner` uniform nodes
/// on [0, 1] followed by `outer` uniform nodes on (1, 3].
class ImpactGrid {
 public:
  ImpactGrid() : ImpactGrid(30, 20) {}
  ImpactGrid(std::size_t inner, std::size_t outer, double horizon = 3.0);

  [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }
  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
  /// Index of the node at exactly t/T = 1.
  [[nodiscard]] std::size_t completion_index() const noexcept { return inner_ - 1; }

 private:
  std::size_t inner_;
  std::vector<double> nodes_;
};

struct OrderImpact {
  int epsilon = 0;
  double r = 0.0;  // log mid(end) - log mid(start)
  double R = 0.0;  // epsilon * r / spread
  double spread = 0.0;
  std::vector<double> path;  // R sampled on the grid; NaN past the end of the tape
  bool truncated = false;
};

/// Log-midprice at `t`, interpolated linearly in trading time between the
/// prevailing quote and the next one. Empty before the first quote and after
/// the last.
std::optional<double> interpolated_log_mid(const StockTape& stock, const TradingCalendar& calendar, Nanos t);

/// Throws NoQuoteError when no quote prevails at the order's start.
OrderImpact order_impact(const HiddenOrder& order, const StockTape& stock, const TradingCalendar& calendar,
                         double spread, const ImpactGrid& grid = {});

/// Mean relative spread over the sessions of one calendar year.
double annual_relative_spread(const StockTape& stock, const TradingCalendar& calendar, int year);

// ---------------------------------------------------------------------------
// Conditional curves and power-law fits

struct CurveBin {
  double lo = 0.0;
  double hi = 0.0;
  double center = 0.0;  // geometric centre
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
};

struct ImpactCurve {
  std::vector<CurveBin> bins;
};

struct CurveParams {
  int bins_per_decade = 8;
  std::size_t min_bin_count = 20;
};

struct ImpactSample {
  double N = 0.0;  // conditioning variable
  double f_mo = 0.0;
  double R = 0.0;
};

/// Mean R per log-spaced bin of the conditioning variable, restricted to
/// samples whose f_mo lies in `band`. Bins with fewer than min_bin_count
/// samples are dropped; throws PreconditionError if none remains.
ImpactCurve impact_vs_N(std::span<const ImpactSample> samples, std::optional<Band> band, const CurveParams& params);

struct PowerLawFit {
  double A = 0.0;  // carries the sign of the fitted means
  double exponent = 0.0;
  double se_A = 0.0;
  double se_exponent = 0.0;
  std::size_t n_points = 0;
  std::size_t dropped = 0;
  std::vector<std::string> warnings;
};

enum class FitWeighting : std::uint8_t { None, Count };

/// OLS of log|y| on log x (weighted when `w` is non-empty). Points with
/// y == 0 are dropped with a warning; fewer than three surviving points is a
/// PreconditionError.
PowerLawFit fit_powerlaw(std::span<const double> x, std::span<const double> y, std::span<const double> w = {});
/// |<R|N>| = A N^gamma over the curve's bin centres.
PowerLawFit fit_powerlaw(const ImpactCurve& curve, FitWeighting weighting = FitWeighting::None);

// ---------------------------------------------------------------------------
// Profiles over normalized time

struct ProfilePoint {
  double x = 0.0;
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
};

struct ProfileCurve {
  std::vector<ProfilePoint> points;
};

/// Cross-order mean of the impact paths at each grid node (NaN entries skipped).
ProfileCurve impact_path_profile(std::span<const OrderImpact> impacts, const ImpactGrid& grid);

/// R = A (t/T)^beta over grid nodes in (0, 1] holding >= min_count orders.
PowerLawFit fit_impact_path(const ProfileCurve& profile, std::size_t min_count);

struct Reversion {
  double R_temp = 0.0;
  double R_perm = 0.0;
  double ratio = 0.0;
  double predicted_ratio = 0.0;  // 1 / (1 + beta)
  std::size_t perm_nodes = 0;
};

/// R_temp is the profile at t/T = 1; R_perm the mean profile over nodes with
/// 1.5 <= t/T <= 3 holding >= min_count orders.
Reversion reversion_ratio(const ProfileCurve& profile, double beta, std::size_t min_count);

// ---------------------------------------------------------------------------
// Allometric exponents

struct PcaFit {
  double exponent = 0.0;  // slope of the first principal axis, y over x
  double variance_explained = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t n_points = 0;
  std::size_t resamples = 0;
  std::uint64_t seed = 0;
};

/// First principal component of the 2x2 covariance of (x, y). Throws
/// PreconditionError if either variable has zero variance.
PcaFit pca_slope(std::span<const double> x, std::span<const double> y);

struct PcaExponents {
  PcaFit g1;  // N ~ V^g1
  PcaFit g2;  // T ~ V^g2
  PcaFit g3;  // N ~ T^g3
};

struct PcaParams {
  std::size_t bootstrap = 1000;
  std::uint64_t seed = 0;
  std::size_t min_orders = 30;
  double confidence = 0.95;
};

/// Exponents from log|V|, log N and log T with percentile bootstrap CIs over
/// orders resampled with replacement. Each CI is widened if needed so that it
/// contains the point estimate.
PcaExponents pca_exponents(std::span<const double> V, std::span<const double> N, std::span<const double> T,
                           const PcaParams& params);
PcaExponents pca_exponents(std::span<const OrderMetrics> orders, const PcaParams& params);

// ---------------------------------------------------------------------------
// Trading profile and timing

struct TradingProfile {
  ProfileCurve own;     // child trade volume over its per-order mean
  ProfileCurve market;  // concurrent non-order volume over its per-order mean
};

struct OrderTrades {
  const StockTape* stock = nullptr;
  HiddenOrder order;
  std::vector<SeriesEvent> events;
};

TradingProfile trading_profile(std::span<const OrderTrades> orders, const TradingCalendar& calendar,
                               std::size_t bins = 20);

struct Histogram {
  std::vector<double> edges;
  std::vector<double> probability;
  std::vector<std::size_t> counts;
};

/// Normalized histograms of order start and end times as fractions of the
/// session elapsed since the open.
std::pair<Histogram, Histogram> start_end_distributions(std::span<const HiddenOrder> orders,
                                                        const TradingCalendar& calendar, std::size_t bins = 20);

// ---------------------------------------------------------------------------
// Impact versus duration, against an index

struct IndexPoint {
  Nanos timestamp = 0;
  double level = 0.0;
};

struct DurationBin {
  double lo = 0.0;
  double hi = 0.0;
  double center = 0.0;  // seconds of trading time
  double mean_R = 0.0;
  double se_R = 0.0;
  std::size_t count = 0;
  double mean_index_return = 0.0;
  std::size_t windows = 0;
};

struct IndexComparison {
  std::vector<DurationBin> bins;
  std::vector<std::string> warnings;
};

struct IndexParams {
  int bins_per_decade = 4;
  std::size_t min_bin_count = 20;
  std::size_t windows = 1000;
  std::uint64_t seed = 0;
};

/// `samples` holds (T seconds, R) pairs. Each retained duration bin also
/// reports the mean index log-return over random windows of the bin's
/// central duration, placed uniformly in trading time.
IndexComparison impact_vs_T_with_index(std::span<const std::pair<double, double>> samples,
                                       std::span<const IndexPoint> index, const TradingCalendar& calendar,
                                       const IndexParams& params);

std::vector<IndexPoint> read_index(const std::filesystem::path& path);
inline constexpr std::string_view kIndexHeader = "timestamp_ns,level";

}  // namespace metaimpact
