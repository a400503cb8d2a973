#include "metaimpact/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <tuple>

#include <boost/math/special_functions/beta.hpp>

#include "metaimpact/random.hpp"

namespace metaimpact {

// ---------------------------------------------------------------------------
// Member series

namespace {

void append_events(const StockTape& stock, const SigningResult& signing, std::size_t i, MemberId member,
                   std::vector<SeriesEvent>& out) {
  const auto& t = stock.trades[i];
  const Side initiator = signing.trades[i].initiator;
  const double v = t.volume();
  if (t.buyer == member) out.push_back(SeriesEvent{i, t.timestamp, +v, initiator == Side::Buyer});
  if (t.seller == member) out.push_back(SeriesEvent{i, t.timestamp, -v, initiator == Side::Seller});
}

struct YearActivity {
  std::int64_t last_session = -1;
  std::size_t active_sessions = 0;
  std::size_t trades = 0;
};

}  // namespace

MemberSeriesSet build_member_series(const Tape& tape, const StockTape& stock, const SigningResult& signing,
                                    const ActivityFilter& filter) {
  const auto& cal = tape.calendar();
  std::map<MemberId, std::vector<SeriesEvent>> events;
  std::map<std::pair<MemberId, int>, YearActivity> activity;

  auto touch = [&](MemberId m, std::int64_t session, int year) {
    auto& a = activity[{m, year}];
    ++a.trades;
    if (a.last_session != session) {
      a.last_session = session;
      ++a.active_sessions;
    }
  };

  for (std::size_t i = 0; i < stock.trades.size(); ++i) {
    const auto& t = stock.trades[i];
    std::int64_t session = 0;
    int year = 0;
    if (cal.empty()) {
      session = t.timestamp / (86400 * kNanosPerSecond);
      year = utc_year(t.timestamp);
    } else {
      auto idx = cal.session_index(t.timestamp);
      session = idx ? static_cast<std::int64_t>(*idx) : -2;
      year = cal.year_of(t.timestamp);
    }
    touch(t.buyer, session, year);
    if (t.seller != t.buyer) touch(t.seller, session, year);
    append_events(stock, signing, i, t.buyer, events[t.buyer]);
    if (t.seller != t.buyer) append_events(stock, signing, i, t.seller, events[t.seller]);
  }

  std::map<MemberId, bool> qualifies;
  for (const auto& [key, a] : activity) {
    auto& q = qualifies[key.first];
    if (a.active_sessions >= filter.min_active_sessions && a.trades >= filter.min_year_trades) q = true;
  }

  MemberSeriesSet out;
  for (auto& [member, evs] : events) {
    if (!qualifies[member]) {
      ++out.discarded_members;
      continue;
    }
    MemberSeries s;
    s.member = member;
    s.member_code = tape.members().name(member);
    s.stock = stock.symbol;
    s.events = std::move(evs);
    out.series.push_back(std::move(s));
  }
  std::sort(out.series.begin(), out.series.end(),
            [](const MemberSeries& a, const MemberSeries& b) { return a.member_code < b.member_code; });
  return out;
}

std::vector<SeriesEvent> member_events(const Tape&, const StockTape& stock, const SigningResult& signing,
                                       MemberId member, std::size_t first_trade, std::size_t last_trade) {
  std::vector<SeriesEvent> out;
  last_trade = std::min(last_trade, stock.trades.empty() ? 0 : stock.trades.size() - 1);
  for (std::size_t i = first_trade; i <= last_trade && i < stock.trades.size(); ++i) {
    append_events(stock, signing, i, member, out);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Change-point statistic

namespace {

/// Prefix sums of centred values and squares over one range, plus a
/// scale-relative tolerance below which differences count as exact zeros.
struct Prefix {
  std::vector<double> s;
  std::vector<double> q;
  double tol = 0.0;

  explicit Prefix(std::span<const double> x) : s(x.size() + 1, 0.0), q(x.size() + 1, 0.0) {
    const auto n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double scale = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - mean;
      s[i + 1] = s[i] + d;
      q[i + 1] = q[i] + d * d;
      scale = std::max(scale, std::abs(x[i]));
    }
    tol = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  }

  [[nodiscard]] double statistic(std::size_t left) const {
    const std::size_t n = s.size() - 1;
    const std::size_t right = n - left;
    const auto nl = static_cast<double>(left);
    const auto nr = static_cast<double>(right);
    const double sl = s[left];
    const double sr = s[n] - s[left];
    const double diff = std::abs(sl / nl - sr / nr);
    const double ssl = std::max(0.0, q[left] - sl * sl / nl);
    const double ssr = std::max(0.0, (q[n] - q[left]) - sr * sr / nr);
    const double pooled_ss = ssl + ssr;
    if (diff <= tol) return 0.0;
    if (pooled_ss <= static_cast<double>(n) * tol * tol) return std::numeric_limits<double>::infinity();
    const double sd = std::sqrt(pooled_ss / static_cast<double>(n - 2)) * std::sqrt(1.0 / nl + 1.0 / nr);
    return diff / sd;
  }
};

}  // namespace

double split_statistic(std::span<const double> values, std::size_t left) {
  if (left == 0 || left >= values.size() || values.size() < 3) return 0.0;
  return Prefix(values).statistic(left);
}

SplitCandidate best_split(std::span<const double> values, std::size_t min_seg) {
  SplitCandidate best;
  const std::size_t n = values.size();
  min_seg = std::max<std::size_t>(min_seg, 1);
  if (n < 2 * min_seg || n < 3) return best;
  const Prefix prefix(values);
  for (std::size_t left = min_seg; left + min_seg <= n; ++left) {
    const double t = prefix.statistic(left);
    if (best.left == 0 || t > best.statistic) {
      best.left = left;
      best.statistic = t;
    }
  }
  return best;
}

double max_statistic_significance(double tau_max, std::size_t n) {
  if (n < 3 || !(tau_max > 0.0)) return 0.0;
  if (std::isinf(tau_max)) return 1.0;
  constexpr double delta = 0.40;
  const double nu = static_cast<double>(n - 2);
  const double eta = std::max(1.0, 4.19 * std::log(static_cast<double>(n)) - 11.54);
  const double x = nu / (nu + tau_max * tau_max);
  const double tail = boost::math::ibeta(delta * nu, delta, x);
  return std::pow(std::max(0.0, 1.0 - tail), eta);
}

namespace {

double permutation_significance(std::span<const double> values, double tau_max, const SegParams& params,
                                std::size_t offset) {
  if (std::isinf(tau_max)) return 1.0;
  std::vector<double> shuffled(values.begin(), values.end());
  std::mt19937_64 rng(mix_seed(params.seed, offset, values.size()));
  std::size_t below = 0;
  for (std::size_t k = 0; k < params.permutations; ++k) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    if (best_split(shuffled, params.min_seg).statistic < tau_max) ++below;
  }
  return params.permutations == 0 ? 0.0
                                  : static_cast<double>(below) / static_cast<double>(params.permutations);
}

}  // namespace

std::vector<Segment> segment_values(std::span<const double> values, const SegParams& params) {
  std::vector<Segment> out;
  if (values.empty()) return out;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, values.size()}};  // half-open
  while (!stack.empty()) {
    const auto [b, e] = stack.back();
    stack.pop_back();
    const auto range = values.subspan(b, e - b);
    const SplitCandidate cand = best_split(range, params.min_seg);
    bool split = false;
    if (cand.left != 0) {
      const double p = params.significance == SignificanceModel::Approximate
                           ? max_statistic_significance(cand.statistic, range.size())
                           : permutation_significance(range, cand.statistic, params, b);
      split = p > params.p_threshold;
    }
    if (split) {
      // Right half pushed first so the left half is processed next.
      stack.emplace_back(b + cand.left, e);
      stack.emplace_back(b, b + cand.left);
    } else {
      const double mean = std::accumulate(range.begin(), range.end(), 0.0) / static_cast<double>(range.size());
      out.push_back(Segment{b, e - 1, mean});
    }
  }
  std::sort(out.begin(), out.end(), [](const Segment& a, const Segment& b) { return a.begin < b.begin; });
  return out;
}

std::vector<Segment> segment_series(const MemberSeries& series, const SegParams& params) {
  std::vector<double> x;
  x.reserve(series.events.size());
  for (const auto& e : series.events) {
    if (params.variable == SegmentVariable::Sign) {
      x.push_back(e.signed_volume > 0 ? 1.0 : (e.signed_volume < 0 ? -1.0 : 0.0));
    } else {
      x.push_back(e.signed_volume);
    }
  }
  auto segments = segment_values(x, params);
  if (params.variable == SegmentVariable::Sign) {
    // Report the net volume rate regardless of the segmentation variable.
    for (auto& s : segments) {
      double sum = 0.0;
      for (std::size_t i = s.begin; i <= s.end; ++i) sum += series.events[i].signed_volume;
      s.mean_rate = sum / static_cast<double>(s.size());
    }
  }
  return segments;
}

// ---------------------------------------------------------------------------
// Hidden orders

HiddenOrder summarize_events(std::span<const SeriesEvent> events, const std::string& stock,
                             const std::string& member, const TradingCalendar& calendar) {
  HiddenOrder h;
  h.stock = stock;
  h.member = member;
  if (events.empty()) return h;
  double buy = 0.0;
  double sell = 0.0;
  std::size_t distinct = 0;
  std::size_t last_index = std::numeric_limits<std::size_t>::max();
  for (const auto& e : events) {
    if (e.signed_volume > 0) buy += e.signed_volume;
    else sell -= e.signed_volume;
    if (e.trade_index != last_index) {
      ++distinct;
      last_index = e.trade_index;
    }
  }
  h.signed_volume = std::accumulate(events.begin(), events.end(), 0.0,
                                    [](double acc, const SeriesEvent& e) { return acc + e.signed_volume; });
  h.epsilon = h.signed_volume > 0 ? 1 : (h.signed_volume < 0 ? -1 : 0);
  const double total = buy + sell;
  h.dominant_fraction = total > 0 ? std::max(buy, sell) / total : 0.0;
  h.n_trades = distinct;
  h.start_ts = events.front().timestamp;
  h.end_ts = events.back().timestamp;
  h.first_idx = events.front().trade_index;
  h.last_idx = events.back().trade_index;
  h.T_seconds = calendar.trading_seconds(h.start_ts, h.end_ts);
  return h;
}

std::vector<HiddenOrder> extract_hidden_orders(std::span<const Segment> segments, const MemberSeries& series,
                                               const TradingCalendar& calendar, const ExtractParams& params,
                                               ExtractionCounts* counts) {
  ExtractionCounts local;
  std::vector<HiddenOrder> out;
  const std::span<const SeriesEvent> events(series.events);
  for (const auto& seg : segments) {
    const auto slice = events.subspan(seg.begin, seg.size());
    HiddenOrder h = summarize_events(slice, series.stock, series.member_code, calendar);
    if (h.n_trades < params.min_trades) {
      ++local.too_short;
      continue;
    }
    if (h.dominant_fraction < params.min_dominance) {
      ++local.not_dominant;
      continue;
    }
    if (h.signed_volume == 0.0) {
      ++local.zero_volume;
      continue;
    }
    if (!(h.T_seconds > 0.0)) {
      ++local.zero_duration;
      continue;
    }
    out.push_back(std::move(h));
  }
  if (counts) {
    counts->too_short += local.too_short;
    counts->not_dominant += local.not_dominant;
    counts->zero_volume += local.zero_volume;
    counts->zero_duration += local.zero_duration;
  }
  return out;
}

bool order_less(const HiddenOrder& a, const HiddenOrder& b) {
  return std::tie(a.stock, a.member, a.start_ts, a.first_idx, a.last_idx) <
         std::tie(b.stock, b.member, b.start_ts, b.first_idx, b.last_idx);
}

}  // namespace metaimpact
