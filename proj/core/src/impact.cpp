#include "metaimpact/impact.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "metaimpact/csv.hpp"
#include "metaimpact/errors.hpp"

namespace metaimpact {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

ImpactGrid::ImpactGrid(std::size_t inner, std::size_t outer, double horizon) : inner_(inner) {
  if (inner < 2) throw PreconditionError("impact grid needs at least 2 nodes on [0,1]");
  nodes_.reserve(inner + outer);
  for (std::size_t i = 0; i < inner; ++i) {
    nodes_.push_back(static_cast<double>(i) / static_cast<double>(inner - 1));
  }
  for (std::size_t k = 1; k <= outer; ++k) {
    nodes_.push_back(1.0 + (horizon - 1.0) * static_cast<double>(k) / static_cast<double>(outer));
  }
}

// ---------------------------------------------------------------------------
// Per-order impact

std::optional<double> interpolated_log_mid(const StockTape& stock, const TradingCalendar& calendar, Nanos t) {
  const auto qa = stock.prevailing_quote(t);
  if (!qa) return std::nullopt;
  const auto& a = stock.quotes[*qa];
  if (t == a.timestamp) return std::log(a.mid());
  if (*qa + 1 >= stock.quotes.size()) return std::nullopt;
  const auto& b = stock.quotes[*qa + 1];
  const auto span = static_cast<double>(calendar.trading_duration(a.timestamp, b.timestamp));
  const double la = std::log(a.mid());
  if (!(span > 0.0)) return std::log(b.mid());
  const double w = static_cast<double>(calendar.trading_duration(a.timestamp, t)) / span;
  return la + w * (std::log(b.mid()) - la);
}

OrderImpact order_impact(const HiddenOrder& order, const StockTape& stock, const TradingCalendar& calendar,
                         double spread, const ImpactGrid& grid) {
  if (!(spread > 0.0)) throw PreconditionError("spread must be positive for " + stock.symbol);
  const auto mid0 = stock.mid_at(order.start_ts);
  if (!mid0) throw NoQuoteError();
  const auto mid1 = stock.mid_at(order.end_ts);
  OrderImpact out;
  out.epsilon = order.epsilon;
  out.spread = spread;
  out.r = std::log(*mid1) - std::log(*mid0);
  out.R = order.epsilon * out.r / spread;

  const Nanos start_offset = calendar.trading_offset(order.start_ts);
  const Nanos duration = calendar.trading_duration(order.start_ts, order.end_ts);
  const auto base = interpolated_log_mid(stock, calendar, order.start_ts);
  out.path.assign(grid.size(), kNaN);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double u = grid.nodes()[k];
    if (u == 0.0) {
      out.path[k] = 0.0;
      continue;
    }
    const Nanos t = calendar.wall_time_at(start_offset + std::llround(u * static_cast<double>(duration)));
    const auto lm = base ? interpolated_log_mid(stock, calendar, t) : std::nullopt;
    if (!lm) {
      out.truncated = true;
      continue;
    }
    out.path[k] = order.epsilon * (*lm - *base) / spread;
  }
  return out;
}

double annual_relative_spread(const StockTape& stock, const TradingCalendar& calendar, int year) {
  const auto sessions = calendar.sessions_in_year(year);
  TimeWindow window;
  if (sessions.empty()) {
    if (stock.quotes.empty()) throw PreconditionError("no quotes for " + stock.symbol);
    window = {stock.quotes.front().timestamp, stock.quotes.back().timestamp};
  } else {
    window = {calendar.sessions()[sessions.front()].open, calendar.sessions()[sessions.back()].close};
  }
  return mean_relative_spread(stock, calendar, window);
}

// ---------------------------------------------------------------------------
// Curves and fits

ImpactCurve impact_vs_N(std::span<const ImpactSample> samples, std::optional<Band> band, const CurveParams& params) {
  std::vector<const ImpactSample*> in;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& s : samples) {
    if (band && !band->contains(s.f_mo)) continue;
    if (!(s.N > 0.0) || std::isnan(s.R)) continue;
    in.push_back(&s);
    lo = std::min(lo, s.N);
    hi = std::max(hi, s.N);
  }
  if (in.empty()) throw PreconditionError("no orders in the requested f_mo band");
  const auto edges = stats::log_bin_edges(lo, hi, params.bins_per_decade);
  std::vector<stats::Accumulator> acc(edges.size() - 1);
  for (const auto* s : in) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), s->N);
    const auto b = static_cast<std::size_t>(std::distance(edges.begin(), it)) - 1;
    acc[std::min(b, acc.size() - 1)].add(s->R);
  }
  ImpactCurve curve;
  for (std::size_t b = 0; b < acc.size(); ++b) {
    if (acc[b].count() < params.min_bin_count || acc[b].count() == 0) continue;
    const auto r = acc[b].result();
    curve.bins.push_back(CurveBin{edges[b], edges[b + 1], std::sqrt(edges[b] * edges[b + 1]), r.mean,
                                  r.se.value_or(0.0), r.count});
  }
  if (curve.bins.empty()) {
    throw PreconditionError("no bin holds at least " + std::to_string(params.min_bin_count) + " orders");
  }
  return curve;
}

PowerLawFit fit_powerlaw(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  PowerLawFit fit;
  std::vector<double> lx;
  std::vector<double> ly;
  std::vector<double> lw;
  double sign_sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] == 0.0 || std::isnan(y[i])) {
      ++fit.dropped;
      fit.warnings.push_back("dropped point at x=" + csv::format_double(x[i]) + " with zero mean");
      continue;
    }
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(std::abs(y[i])));
    if (!w.empty()) lw.push_back(w[i]);
    sign_sum += y[i];
  }
  if (lx.size() < 3) {
    throw PreconditionError("power-law fit needs at least 3 nonzero points, have " + std::to_string(lx.size()));
  }
  const auto ols = stats::wls(lx, ly, lw);
  const double sign = sign_sum < 0.0 ? -1.0 : 1.0;
  fit.A = sign * std::exp(ols.intercept);
  fit.se_A = std::abs(fit.A) * ols.se_intercept;
  fit.exponent = ols.slope;
  fit.se_exponent = ols.se_slope;
  fit.n_points = lx.size();
  return fit;
}

PowerLawFit fit_powerlaw(const ImpactCurve& curve, FitWeighting weighting) {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> w;
  for (const auto& b : curve.bins) {
    x.push_back(b.center);
    y.push_back(b.mean);
    if (weighting == FitWeighting::Count) w.push_back(static_cast<double>(b.count));
  }
  return fit_powerlaw(x, y, w);
}

// ---------------------------------------------------------------------------
// Profiles

ProfileCurve impact_path_profile(std::span<const OrderImpact> impacts, const ImpactGrid& grid) {
  std::vector<stats::Accumulator> acc(grid.size());
  for (const auto& imp : impacts) {
    for (std::size_t k = 0; k < grid.size() && k < imp.path.size(); ++k) {
      if (!std::isnan(imp.path[k])) acc[k].add(imp.path[k]);
    }
  }
  ProfileCurve out;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto r = acc[k].result();
    out.points.push_back(ProfilePoint{grid.nodes()[k], r.mean, r.se.value_or(0.0), r.count});
  }
  return out;
}

PowerLawFit fit_impact_path(const ProfileCurve& profile, std::size_t min_count) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& p : profile.points) {
    if (p.x > 0.0 && p.x <= 1.0 && p.count >= min_count && p.count > 0) {
      x.push_back(p.x);
      y.push_back(p.mean);
    }
  }
  return fit_powerlaw(x, y);
}

Reversion reversion_ratio(const ProfileCurve& profile, double beta, std::size_t min_count) {
  Reversion rv;
  const ProfilePoint* peak = nullptr;
  stats::Accumulator perm;
  for (const auto& p : profile.points) {
    if (p.x == 1.0) peak = &p;
    if (p.x >= 1.5 && p.x <= 3.0 && p.count >= min_count && p.count > 0) perm.add(p.mean);
  }
  if (peak == nullptr || peak->count < min_count || peak->count == 0) {
    throw PreconditionError("profile has too few orders at t/T = 1");
  }
  if (perm.count() == 0) throw PreconditionError("profile coverage on 1.5 <= t/T <= 3 is below the minimum count");
  rv.R_temp = peak->mean;
  rv.R_perm = perm.mean();
  rv.perm_nodes = perm.count();
  rv.ratio = rv.R_perm / rv.R_temp;
  rv.predicted_ratio = 1.0 / (1.0 + beta);
  return rv;
}

// ---------------------------------------------------------------------------
// PCA

namespace {

struct Moments {
  double a = 0.0;  // var x
  double b = 0.0;  // cov
  double c = 0.0;  // var y
};

template <typename Index>
Moments moments(std::span<const double> x, std::span<const double> y, const Index& idx, std::size_t n) {
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[idx(i)];
    my += y[idx(i)];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  Moments m;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[idx(i)] - mx;
    const double dy = y[idx(i)] - my;
    m.a += dx * dx;
    m.b += dx * dy;
    m.c += dy * dy;
  }
  const auto d = static_cast<double>(n - 1);
  m.a /= d;
  m.b /= d;
  m.c /= d;
  return m;
}

/// Slope of the leading eigenvector of [[a, b], [b, c]], choosing the
/// cancellation-free expression.
double principal_slope(const Moments& m) {
  const double diff = m.c - m.a;
  const double root = std::sqrt(diff * diff + 4.0 * m.b * m.b);
  if (diff >= 0.0) {
    if (m.b == 0.0) return diff > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return (diff + root) / (2.0 * m.b);
  }
  return 2.0 * m.b / (-diff + root);
}

double explained(const Moments& m) {
  const double half = 0.5 * (m.a + m.c);
  const double lambda1 = half + std::sqrt(0.25 * (m.a - m.c) * (m.a - m.c) + m.b * m.b);
  return std::min(1.0, lambda1 / (m.a + m.c));
}

}  // namespace

PcaFit pca_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("PCA needs at least two paired points");
  const auto m = moments(x, y, [](std::size_t i) { return i; }, x.size());
  if (!(m.a > 0.0) || !(m.c > 0.0)) throw PreconditionError("degenerate covariance: a log variable is constant");
  PcaFit f;
  f.exponent = principal_slope(m);
  f.variance_explained = explained(m);
  f.ci_lo = f.ci_hi = f.exponent;
  f.n_points = x.size();
  return f;
}

PcaExponents pca_exponents(std::span<const double> V, std::span<const double> N, std::span<const double> T,
                           const PcaParams& params) {
  const std::size_t n = V.size();
  if (N.size() != n || T.size() != n) throw PreconditionError("PCA inputs differ in length");
  if (n < params.min_orders) {
    throw PreconditionError("PCA needs at least " + std::to_string(params.min_orders) + " orders, have " +
                            std::to_string(n));
  }
  std::vector<double> lv(n);
  std::vector<double> ln(n);
  std::vector<double> lt(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(std::abs(V[i]) > 0.0) || !(N[i] > 0.0) || !(T[i] > 0.0)) {
      throw PreconditionError("PCA requires |V|, N and T to be positive");
    }
    lv[i] = std::log(std::abs(V[i]));
    ln[i] = std::log(N[i]);
    lt[i] = std::log(T[i]);
  }

  PcaExponents out;
  out.g1 = pca_slope(lv, ln);
  out.g2 = pca_slope(lv, lt);
  out.g3 = pca_slope(lt, ln);

  std::array<std::vector<double>, 3> reps;
  if (params.bootstrap > 0) {
    std::mt19937_64 rng(params.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> idx(n);
    for (std::size_t b = 0; b < params.bootstrap; ++b) {
      for (auto& i : idx) i = pick(rng);
      auto at = [&idx](std::size_t i) { return idx[i]; };
      const Moments m1 = moments(lv, ln, at, n);
      const Moments m2 = moments(lv, lt, at, n);
      const Moments m3 = moments(lt, ln, at, n);
      // Resamples that collapse a variable are skipped.
      if (m1.a > 0 && m1.c > 0) reps[0].push_back(principal_slope(m1));
      if (m2.a > 0 && m2.c > 0) reps[1].push_back(principal_slope(m2));
      if (m3.a > 0 && m3.c > 0) reps[2].push_back(principal_slope(m3));
    }
  }
  const double tail = 0.5 * (1.0 - params.confidence);
  std::array<PcaFit*, 3> fits{&out.g1, &out.g2, &out.g3};
  for (std::size_t k = 0; k < 3; ++k) {
    auto& f = *fits[k];
    f.seed = params.seed;
    f.resamples = reps[k].size();
    if (!reps[k].empty()) {
      f.ci_lo = std::min(f.exponent, stats::quantile(reps[k], tail));
      f.ci_hi = std::max(f.exponent, stats::quantile(reps[k], 1.0 - tail));
    }
  }
  return out;
}

PcaExponents pca_exponents(std::span<const OrderMetrics> orders, const PcaParams& params) {
  std::vector<double> V;
  std::vector<double> N;
  std::vector<double> T;
  for (const auto& o : orders) {
    V.push_back(o.order.signed_volume);
    N.push_back(static_cast<double>(o.order.n_trades));
    T.push_back(o.order.T_seconds);
  }
  return pca_exponents(V, N, T, params);
}

// ---------------------------------------------------------------------------
// Trading profile and timing

namespace {

ProfileCurve to_profile(const std::vector<stats::Accumulator>& acc) {
  ProfileCurve out;
  const auto bins = static_cast<double>(acc.size());
  for (std::size_t k = 0; k < acc.size(); ++k) {
    const auto r = acc[k].result();
    out.points.push_back(ProfilePoint{(static_cast<double>(k) + 0.5) / bins, r.mean, r.se.value_or(0.0), r.count});
  }
  return out;
}

std::size_t bin_of(double u, std::size_t bins) {
  const auto b = static_cast<std::size_t>(std::max(0.0, std::floor(u * static_cast<double>(bins))));
  return std::min(b, bins - 1);
}

}  // namespace

TradingProfile trading_profile(std::span<const OrderTrades> orders, const TradingCalendar& calendar,
                               std::size_t bins) {
  if (bins == 0) throw PreconditionError("trading profile needs at least one bin");
  std::vector<stats::Accumulator> own(bins);
  std::vector<stats::Accumulator> market(bins);
  for (const auto& ot : orders) {
    const auto& o = ot.order;
    const auto duration = static_cast<double>(calendar.trading_duration(o.start_ts, o.end_ts));
    if (!(duration > 0.0) || ot.events.empty() || ot.stock == nullptr) continue;
    auto u_of = [&](Nanos t) { return static_cast<double>(calendar.trading_duration(o.start_ts, t)) / duration; };

    double own_mean = 0.0;
    for (const auto& e : ot.events) own_mean += std::abs(e.signed_volume);
    own_mean /= static_cast<double>(ot.events.size());
    for (const auto& e : ot.events) own[bin_of(u_of(e.timestamp), bins)].add(std::abs(e.signed_volume) / own_mean);

    std::vector<std::size_t> mine;
    for (const auto& e : ot.events) mine.push_back(e.trade_index);
    std::sort(mine.begin(), mine.end());
    const auto& trades = ot.stock->trades;
    const auto [lo, hi] = ot.stock->trade_range(o.start_ts, o.end_ts);
    std::vector<std::size_t> others;
    double other_mean = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      if (std::binary_search(mine.begin(), mine.end(), i)) continue;
      others.push_back(i);
      other_mean += trades[i].volume();
    }
    if (others.empty()) continue;
    other_mean /= static_cast<double>(others.size());
    for (auto i : others) market[bin_of(u_of(trades[i].timestamp), bins)].add(trades[i].volume() / other_mean);
  }
  return TradingProfile{to_profile(own), to_profile(market)};
}

std::pair<Histogram, Histogram> start_end_distributions(std::span<const HiddenOrder> orders,
                                                        const TradingCalendar& calendar, std::size_t bins) {
  if (bins == 0) throw PreconditionError("timing histogram needs at least one bin");
  auto make = [bins]() {
    Histogram h;
    for (std::size_t k = 0; k <= bins; ++k) h.edges.push_back(static_cast<double>(k) / static_cast<double>(bins));
    h.counts.assign(bins, 0);
    h.probability.assign(bins, 0.0);
    return h;
  };
  Histogram start = make();
  Histogram end = make();
  auto place = [&](Histogram& h, Nanos t) {
    const auto s = calendar.session_index(t);
    if (!s) return;
    const auto& session = calendar.sessions()[*s];
    if (t > session.close) return;
    const double u = static_cast<double>(t - session.open) / static_cast<double>(session.length());
    ++h.counts[bin_of(u, bins)];
  };
  for (const auto& o : orders) {
    place(start, o.start_ts);
    place(end, o.end_ts);
  }
  for (auto* h : {&start, &end}) {
    const auto total = std::accumulate(h->counts.begin(), h->counts.end(), std::size_t{0});
    for (std::size_t k = 0; k < bins && total > 0; ++k) {
      h->probability[k] = static_cast<double>(h->counts[k]) / static_cast<double>(total);
    }
  }
  return {std::move(start), std::move(end)};
}

// ---------------------------------------------------------------------------
// Index comparison

IndexComparison impact_vs_T_with_index(std::span<const std::pair<double, double>> samples,
                                       std::span<const IndexPoint> index, const TradingCalendar& calendar,
                                       const IndexParams& params) {
  IndexComparison out;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& [T, R] : samples) {
    if (!(T > 0.0) || std::isnan(R)) continue;
    lo = std::min(lo, T);
    hi = std::max(hi, T);
  }
  if (!(hi > 0.0)) throw PreconditionError("no orders with positive duration");
  if (index.size() < 2) throw PreconditionError("index series needs at least two points");

  const auto edges = stats::log_bin_edges(lo, hi, params.bins_per_decade);
  std::vector<stats::Accumulator> acc(edges.size() - 1);
  for (const auto& [T, R] : samples) {
    if (!(T > 0.0) || std::isnan(R)) continue;
    const auto it = std::upper_bound(edges.begin(), edges.end(), T);
    const auto b = static_cast<std::size_t>(std::distance(edges.begin(), it)) - 1;
    acc[std::min(b, acc.size() - 1)].add(R);
  }

  auto level_at = [&](Nanos t) {
    auto it = std::upper_bound(index.begin(), index.end(), t,
                               [](Nanos v, const IndexPoint& p) { return v < p.timestamp; });
    if (it == index.begin()) return index.front().level;
    return std::prev(it)->level;
  };
  const Nanos first = calendar.trading_offset(index.front().timestamp);
  const Nanos last = calendar.trading_offset(index.back().timestamp);

  for (std::size_t b = 0; b < acc.size(); ++b) {
    if (acc[b].count() < params.min_bin_count || acc[b].count() == 0) continue;
    DurationBin bin;
    bin.lo = edges[b];
    bin.hi = edges[b + 1];
    bin.center = std::sqrt(edges[b] * edges[b + 1]);
    const auto r = acc[b].result();
    bin.mean_R = r.mean;
    bin.se_R = r.se.value_or(0.0);
    bin.count = r.count;
    const auto width = static_cast<Nanos>(std::llround(bin.center * kNanosPerSecond));
    if (last - first < width) {
      out.warnings.push_back("index too short for duration bin centred at " + csv::format_double(bin.center) +
                             " s; bin skipped");
      continue;
    }
    std::mt19937_64 rng(params.seed ^ (0x9E3779B97F4A7C15ULL * (b + 1)));
    std::uniform_int_distribution<Nanos> pick(first, last - width);
    double sum = 0.0;
    for (std::size_t m = 0; m < params.windows; ++m) {
      const Nanos o = pick(rng);
      sum += std::log(level_at(calendar.wall_time_at(o + width)) / level_at(calendar.wall_time_at(o)));
    }
    bin.windows = params.windows;
    bin.mean_index_return = params.windows ? sum / static_cast<double>(params.windows) : 0.0;
    out.bins.push_back(bin);
  }
  return out;
}

std::vector<IndexPoint> read_index(const std::filesystem::path& path) {
  const auto table = csv::read_table(path, kIndexHeader);
  std::vector<IndexPoint> out;
  out.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    auto ts = csv::parse_int(row[0]);
    auto level = csv::parse_double(row[1]);
    const auto where = path.string() + ":" + std::to_string(table.line_numbers[i]);
    if (!ts || !level || !(*level > 0.0)) throw InputError(where + ": malformed index row");
    if (!out.empty() && *ts < out.back().timestamp) throw InputError(where + ": index timestamps out of order");
    out.push_back(IndexPoint{*ts, *level});
  }
  return out;
}

}  // namespace metaimpact
