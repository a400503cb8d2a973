#include "metaimpact/order_metrics.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "metaimpact/errors.hpp"

namespace metaimpact {

double compute_f_mo(std::span<const SeriesEvent> events) {
  double mo = 0.0;
  double total = 0.0;
  for (const auto& e : events) {
    const double v = std::abs(e.signed_volume);
    total += v;
    if (e.market_order) mo += v;
  }
  return total > 0.0 ? mo / total : 0.0;
}

double compute_alpha(std::span<const SeriesEvent> events, const StockTape& stock, Nanos start, Nanos end) {
  double own = 0.0;
  std::size_t last = std::numeric_limits<std::size_t>::max();
  for (const auto& e : events) {
    if (e.trade_index == last) continue;
    last = e.trade_index;
    own += stock.trades[e.trade_index].volume();
  }
  const auto [lo, hi] = stock.trade_range(start, end);
  double market = 0.0;
  for (std::size_t i = lo; i < hi; ++i) market += stock.trades[i].volume();
  if (!(market > 0.0)) return 0.0;
  return std::min(1.0, own / market);
}

OrderMetrics compute_metrics(const HiddenOrder& order, std::span<const SeriesEvent> events, const StockTape& stock) {
  OrderMetrics m;
  m.order = order;
  m.f_mo = compute_f_mo(events);
  m.alpha = compute_alpha(events, stock, order.start_ts, order.end_ts);
  double vol = 0.0;
  for (const auto& e : events) vol += std::abs(e.signed_volume);
  m.mean_child_volume = events.empty() ? 0.0 : vol / static_cast<double>(events.size());
  return m;
}

std::vector<OrderMetrics> apply_filters(std::span<const OrderMetrics> orders, const TradingCalendar& calendar,
                                        const FilterSpec& spec, FilterReport* report) {
  FilterReport r;
  r.input = orders.size();

  std::map<std::pair<std::string, int>, std::size_t> per_stock_year;
  for (const auto& o : orders) ++per_stock_year[{o.order.stock, calendar.year_of(o.order.start_ts)}];

  std::vector<OrderMetrics> kept;
  for (const auto& o : orders) {
    bool ok = true;
    if (spec.max_T_days) {
      double day_seconds = 86400.0;
      if (auto s = calendar.session_index(o.order.start_ts)) {
        day_seconds = static_cast<double>(calendar.sessions()[*s].length()) / kNanosPerSecond;
      }
      if (o.order.T_seconds > *spec.max_T_days * day_seconds) {
        ++r.failed_duration;
        ok = false;
      }
    }
    if (o.order.n_trades < spec.min_trades) {
      ++r.failed_min_trades;
      ok = false;
    }
    if (per_stock_year[{o.order.stock, calendar.year_of(o.order.start_ts)}] < spec.min_orders_per_stock_year) {
      ++r.failed_stock_year;
      ok = false;
    }
    if (spec.fmo_band && !spec.fmo_band->contains(o.f_mo)) {
      ++r.failed_fmo_band;
      ok = false;
    }
    if (ok) kept.push_back(o);
  }
  r.kept = kept.size();
  if (report) *report = r;
  return kept;
}

EnsembleStats ensemble_stats(std::span<const OrderMetrics> orders, std::span<const double> R, double fmo_threshold) {
  if (orders.empty()) throw PreconditionError("ensemble statistics need at least one order");
  if (R.size() != orders.size()) throw PreconditionError("impact values do not match orders");
  stats::Accumulator n, fmo, alpha, r_all, r_high;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    const auto& o = orders[i];
    n.add(static_cast<double>(o.order.n_trades));
    fmo.add(o.f_mo);
    alpha.add(o.alpha);
    if (!std::isnan(R[i])) {
      r_all.add(R[i]);
      if (o.f_mo >= fmo_threshold) r_high.add(R[i]);
    }
  }
  EnsembleStats s;
  s.n_orders = orders.size();
  s.mean_N = n.result();
  s.mean_f_mo = fmo.result();
  s.mean_alpha = alpha.result();
  s.mean_R = r_all.result();
  s.mean_R_given_fmo_gt = r_high.result();
  s.fmo_threshold = fmo_threshold;
  return s;
}

}  // namespace metaimpact
