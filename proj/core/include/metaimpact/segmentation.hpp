#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "metaimpact/signing.hpp"
#include "metaimpact/tape.hpp"

namespace metaimpact {

/// One side of one trade, seen from a member.
struct SeriesEvent {
  std::size_t trade_index = 0;
  Nanos timestamp = 0;
  double signed_volume = 0.0;  // +price*shares when buying, - when selling
  bool market_order = false;   // the member was the initiator
};

/// Time-ordered events of one member in one stock. A member on both sides
/// of a trade contributes two offsetting events.
struct MemberSeries {
  MemberId member;
  std::string member_code;
  std::string stock;
  std::vector<SeriesEvent> events;
};

struct ActivityFilter {
  std::size_t min_active_sessions = 200;  // sessions with >= 1 trade, per year
  std::size_t min_year_trades = 1000;     // transactions per year
};

struct MemberSeriesSet {
  std::vector<MemberSeries> series;  // sorted by member code
  std::size_t discarded_members = 0;
};

/// Builds one series per member that passes the activity filter in at least
/// one calendar year. A qualifying member keeps its full series.
MemberSeriesSet build_member_series(const Tape& tape, const StockTape& stock, const SigningResult& signing,
                                    const ActivityFilter& filter = {});

/// Events of a member in a stock restricted to trade indices [first, last].
std::vector<SeriesEvent> member_events(const Tape& tape, const StockTape& stock, const SigningResult& signing,
                                       MemberId member, std::size_t first_trade, std::size_t last_trade);

// ---------------------------------------------------------------------------

/// Inclusive event-index range of a series with its mean value.
struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;  // inclusive
  double mean_rate = 0.0;

  [[nodiscard]] std::size_t size() const noexcept { return end - begin + 1; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

enum class SignificanceModel : std::uint8_t { Approximate, Permutation };
enum class SegmentVariable : std::uint8_t { SignedVolume, Sign };

struct SegParams {
  double p_threshold = 0.95;
  std::size_t min_seg = 10;
  SignificanceModel significance = SignificanceModel::Approximate;
  std::size_t permutations = 200;
  SegmentVariable variable = SegmentVariable::SignedVolume;
  std::uint64_t seed = 0;  // permutation test only
};

/// Two-sample statistic |mean_L - mean_R| / s_D for a split of `values` at
/// `left` (left part has `left` elements). Infinite when both parts are
/// exactly constant with different means.
double split_statistic(std::span<const double> values, std::size_t left);

struct SplitCandidate {
  std::size_t left = 0;  // size of the left part; 0 when no candidate exists
  double statistic = 0.0;
};

/// Maximizing split over positions leaving >= min_seg values per side.
SplitCandidate best_split(std::span<const double> values, std::size_t min_seg);

/// Approximate probability that the maximum statistic over a series of
/// length n stays below `tau_max` under the null of a constant mean:
/// [1 - I_{v/(v+t^2)}(d*v, d)]^eta with v = n-2, d = 0.40,
/// eta = 4.19 ln n - 11.54 (floored at 1).
double max_statistic_significance(double tau_max, std::size_t n);

/// Recursive binary segmentation. Returns a partition of [0, n).
std::vector<Segment> segment_values(std::span<const double> values, const SegParams& params);
std::vector<Segment> segment_series(const MemberSeries& series, const SegParams& params);

// ---------------------------------------------------------------------------

struct HiddenOrder {
  std::string stock;
  std::string member;
  int epsilon = 0;
  Nanos start_ts = 0;
  Nanos end_ts = 0;
  std::size_t n_trades = 0;
  double signed_volume = 0.0;
  double T_seconds = 0.0;
  double dominant_fraction = 0.0;
  std::size_t first_idx = 0;  // trade indices within the stock
  std::size_t last_idx = 0;
};

struct ExtractParams {
  std::size_t min_trades = 10;
  double min_dominance = 0.75;
};

struct ExtractionCounts {
  std::size_t too_short = 0;
  std::size_t not_dominant = 0;
  std::size_t zero_volume = 0;
  std::size_t zero_duration = 0;
};

/// Summary of an event range as a candidate order (no qualification check).
HiddenOrder summarize_events(std::span<const SeriesEvent> events, const std::string& stock,
                             const std::string& member, const TradingCalendar& calendar);

std::vector<HiddenOrder> extract_hidden_orders(std::span<const Segment> segments, const MemberSeries& series,
                                               const TradingCalendar& calendar, const ExtractParams& params,
                                               ExtractionCounts* counts = nullptr);

/// Deterministic output order: stock, member, start time, first index.
bool order_less(const HiddenOrder& a, const HiddenOrder& b);

}  // namespace metaimpact
