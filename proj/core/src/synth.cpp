#include "metaimpact/synth.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <random>

#include "metaimpact/csv.hpp"
#include "metaimpact/errors.hpp"
#include "metaimpact/random.hpp"

namespace metaimpact {

namespace {

constexpr Nanos kNanosPerDay = 86'400LL * kNanosPerSecond;

std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2 ? 1 : 0;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::string civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  const auto y = static_cast<int>(yoe + era * 400 + (m <= 2 ? 1 : 0));
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, d);
  return buf;
}

std::int64_t parse_date(const std::string& date) {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  if (date.size() != 10 || std::sscanf(date.c_str(), "%4d-%2u-%2u", &y, &m, &d) != 3 || m < 1 || m > 12 || d < 1 ||
      d > 31) {
    throw InputError("invalid date '" + date + "', expected YYYY-MM-DD");
  }
  return days_from_civil(y, m, d);
}

std::string padded(std::string_view prefix, std::size_t value, int width) {
  std::string digits = std::to_string(value);
  if (static_cast<int>(digits.size()) < width) digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  return std::string(prefix) + digits;
}

struct Slot {
  Nanos t = 0;
  double u = 0.0;  // fraction of the session elapsed
  int order = -1;
  bool market_order = false;
};

struct Draft {
  std::size_t broker = 0;
  int epsilon = 1;
  std::size_t N = 0;
  std::size_t M = 0;
  std::size_t start = 0;
  double f_mo = 0.0;
  std::size_t first = 0;
  std::size_t last = 0;
  std::vector<std::size_t> children;
};

class StockGenerator {
 public:
  StockGenerator(const SynthConfig& c, const TradingCalendar& calendar, std::size_t stock_index,
                 const std::vector<double>& factor, Nanos factor_step)
      : c_(c),
        calendar_(calendar),
        stock_(stock_index),
        factor_(factor),
        factor_step_(factor_step),
        rng_(mix_seed(c.seed, stock_index + 1)) {}

  void run(std::size_t n_orders, const std::string& symbol, TapeBuilder& builder, std::vector<TrueOrder>& truth,
           std::vector<std::pair<Nanos, double>>& log_mids);

 private:
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }

  void draw_slots();
  void place_orders(std::size_t n_orders);
  std::int64_t draw_shares(double u, double scale);

  const SynthConfig& c_;
  const TradingCalendar& calendar_;
  std::size_t stock_;
  const std::vector<double>& factor_;
  Nanos factor_step_;
  std::mt19937_64 rng_;
  std::vector<Slot> slots_;
  std::vector<Draft> orders_;
};

void StockGenerator::draw_slots() {
  for (const auto& s : calendar_.sessions()) {
    const double expected = c_.trade_rate * static_cast<double>(s.length()) / kNanosPerSecond;
    const auto n = std::poisson_distribution<long>(expected)(rng_);
    std::uniform_int_distribution<Nanos> when(s.open, s.close);
    std::vector<Nanos> times(static_cast<std::size_t>(n));
    for (auto& t : times) t = when(rng_);
    std::sort(times.begin(), times.end());
    for (auto t : times) {
      if (!slots_.empty() && t <= slots_.back().t) t = slots_.back().t + 1;
      slots_.push_back(Slot{t, static_cast<double>(t - s.open) / static_cast<double>(s.length())});
    }
  }
}

void StockGenerator::place_orders(std::size_t n_orders) {
  const std::size_t S = slots_.size();
  const std::size_t brokers = c_.brokers_per_stock;
  for (std::size_t j = 0; j < n_orders; ++j) {
    Draft d;
    d.broker = j % brokers;
    const std::size_t per_broker = n_orders / brokers + (d.broker < n_orders % brokers ? 1 : 0);
    const double cell = static_cast<double>(S) / static_cast<double>(per_broker);
    const double cell_start = static_cast<double>(j / brokers) * cell;

    const double tail_draw = 1.0 - uniform();  // (0, 1]
    const double n_draw = std::floor(static_cast<double>(c_.size_min) * std::pow(tail_draw, -1.0 / c_.size_tail));
    d.N = static_cast<std::size_t>(std::min(n_draw, static_cast<double>(c_.size_max)));
    const double alpha = c_.alpha * (1.0 + c_.alpha_spread * (2.0 * uniform() - 1.0));
    const double mix = uniform();
    if (mix < c_.fmo_high_weight) {
      d.f_mo = 0.8 + 0.2 * uniform();
    } else if (mix < c_.fmo_high_weight + c_.fmo_low_weight) {
      d.f_mo = 0.2 * uniform();
    } else {
      d.f_mo = 0.2 + 0.6 * uniform();
    }
    d.epsilon = uniform() < 0.5 ? 1 : -1;

    const auto max_window = static_cast<std::size_t>(std::floor(0.8 * cell));
    d.M = std::max<std::size_t>(d.N, static_cast<std::size_t>(std::llround(static_cast<double>(d.N) / alpha)));
    if (d.M > max_window) {
      d.N = static_cast<std::size_t>(std::floor(static_cast<double>(max_window) * alpha));
      d.M = static_cast<std::size_t>(std::llround(static_cast<double>(d.N) / alpha));
    }
    if (d.N < c_.size_min || d.N < 2) {
      throw PreconditionError("synthetic tape too short for " + std::to_string(n_orders) + " orders per stock");
    }
    d.start = static_cast<std::size_t>(cell_start + std::floor((cell - static_cast<double>(d.M)) *
                                                               (0.25 + 0.5 * uniform())));
    orders_.push_back(std::move(d));
  }

  std::vector<std::size_t> by_start(orders_.size());
  for (std::size_t k = 0; k < by_start.size(); ++k) by_start[k] = k;
  std::stable_sort(by_start.begin(), by_start.end(),
                   [this](std::size_t a, std::size_t b) { return orders_[a].start < orders_[b].start; });

  for (auto k : by_start) {
    auto& d = orders_[k];
    std::size_t first = d.start;
    while (first < S && slots_[first].order >= 0) ++first;
    std::vector<std::size_t> free;
    std::size_t end = first + d.M - 1;
    for (std::size_t i = first + 1; i < S && (i <= end || free.size() < d.N - 1); ++i) {
      if (slots_[i].order < 0) free.push_back(i);
      end = std::max(end, i);
    }
    if (first >= S || free.size() < d.N - 1) throw PreconditionError("synthetic order runs past the end of the tape");
    // Keep the window tight: the last child is the last free slot needed.
    while (free.size() > d.N - 1 && free.back() > first + d.M - 1) free.pop_back();
    d.first = first;
    d.last = free.back();
    free.pop_back();
    d.children.push_back(first);
    std::sample(free.begin(), free.end(), std::back_inserter(d.children), d.N - 2, rng_);
    d.children.push_back(d.last);
    for (auto i : d.children) {
      slots_[i].order = static_cast<int>(k);
      slots_[i].market_order = uniform() < d.f_mo;
    }
  }
}

std::int64_t StockGenerator::draw_shares(double u, double scale) {
  const double w = 1.0 + c_.u_shape * (12.0 * (u - 0.5) * (u - 0.5) - 1.0);
  const double z = normal();
  const double size = c_.shares_mean * w * std::exp(c_.size_sigma * z - 0.5 * c_.size_sigma * c_.size_sigma) * scale;
  return std::max<std::int64_t>(1, std::llround(size));
}

void StockGenerator::run(std::size_t n_orders, const std::string& symbol, TapeBuilder& builder,
                         std::vector<TrueOrder>& truth, std::vector<std::pair<Nanos, double>>& log_mids) {
  const double log_p0 = std::log(20.0) + std::log(5.0) * uniform();
  draw_slots();
  if (slots_.empty()) throw PreconditionError("synthetic stock " + symbol + " has no trades");
  place_orders(n_orders);
  const std::size_t S = slots_.size();

  std::vector<char> covered(S, 0);
  for (const auto& d : orders_) std::fill(covered.begin() + d.first, covered.begin() + d.last + 1, 1);

  const std::size_t brokers = c_.brokers_per_stock;
  auto broker_code = [&](std::size_t b) { return padded("BRK", stock_ * brokers + b, 3); };
  auto member_code = [&](std::size_t m) { return padded("M", m, 4); };
  std::uniform_int_distribution<std::size_t> pick_member(0, c_.n_members - 1);
  const double per_session = c_.trade_rate * c_.session_seconds;
  const double p_broker = c_.broker_background_per_session / (2.0 * per_session);

  std::vector<std::size_t> order_of_first(orders_.size());
  for (std::size_t k = 0; k < order_of_first.size(); ++k) order_of_first[k] = k;
  std::sort(order_of_first.begin(), order_of_first.end(),
            [this](std::size_t a, std::size_t b) { return orders_[a].first < orders_[b].first; });

  struct Active {
    std::size_t order;
    Nanos t0;
    double T;
    double amplitude;
  };
  std::vector<Active> active;
  std::size_t next_order = 0;
  double permanent = 0.0;
  double noise = 0.0;
  std::vector<double> prices(S);
  std::vector<std::int64_t> shares(S);

  for (std::size_t i = 0; i < S; ++i) {
    const auto& slot = slots_[i];
    while (next_order < order_of_first.size() && orders_[order_of_first[next_order]].first == i) {
      const auto& d = orders_[order_of_first[next_order]];
      const Nanos t0 = slots_[d.first].t;
      const double amp = d.epsilon * c_.spread * c_.impact_A * std::pow(static_cast<double>(d.N), c_.impact_gamma);
      active.push_back(Active{order_of_first[next_order], t0,
                              static_cast<double>(calendar_.trading_duration(t0, slots_[d.last].t)), amp});
      ++next_order;
    }
    double impact = 0.0;
    for (auto it = active.begin(); it != active.end();) {
      if (orders_[it->order].last < i) {
        permanent += c_.reversion == ReversionMode::None ? it->amplitude : it->amplitude / (1.0 + c_.impact_beta);
        it = active.erase(it);
        continue;
      }
      const double u = static_cast<double>(calendar_.trading_duration(it->t0, slot.t)) / it->T;
      impact += it->amplitude * std::pow(u, c_.impact_beta);
      ++it;
    }
    if (i > 0) noise += c_.sigma * normal();
    const auto f = static_cast<std::size_t>(calendar_.trading_offset(slot.t) / factor_step_);
    const double log_mid = log_p0 + noise + factor_[std::min(f, factor_.size() - 1)] + permanent + impact;
    const double mid = std::exp(log_mid);
    const double bid = mid * (1.0 - 0.5 * c_.spread);
    const double ask = mid * (1.0 + 0.5 * c_.spread);
    builder.add_quote(symbol, slot.t, bid, ask);
    log_mids.emplace_back(slot.t, log_mid);

    std::string buyer;
    std::string seller;
    bool buyer_initiates = false;
    double scale = 1.0;
    if (slot.order >= 0) {
      const auto& d = orders_[static_cast<std::size_t>(slot.order)];
      const auto broker = broker_code(d.broker);
      const auto other = member_code(pick_member(rng_));
      buyer = d.epsilon > 0 ? broker : other;
      seller = d.epsilon > 0 ? other : broker;
      buyer_initiates = slot.market_order == (d.epsilon > 0);
    } else {
      auto side = [&]() -> std::pair<std::string, bool> {
        if (!covered[i]) {
          const double draw = uniform();
          if (draw < p_broker * static_cast<double>(brokers)) {
            return {broker_code(std::min(brokers - 1, static_cast<std::size_t>(draw / p_broker))), true};
          }
        }
        return {member_code(pick_member(rng_)), false};
      };
      auto [b, b_broker] = side();
      auto [s, s_broker] = side();
      while (s == b) {
        s = member_code(pick_member(rng_));
        s_broker = false;
      }
      buyer = std::move(b);
      seller = std::move(s);
      if (b_broker || s_broker) scale = c_.broker_size_scale;
      buyer_initiates = uniform() < 0.5;
    }
    shares[i] = draw_shares(slot.u, scale);
    prices[i] = buyer_initiates ? ask : bid;
    Aggressor flag = buyer_initiates ? Aggressor::Buyer : Aggressor::Seller;
    if (uniform() < c_.unknown_flag_fraction) flag = Aggressor::Unknown;
    if (auto bad = builder.add_trade(symbol, slot.t, prices[i], shares[i], buyer, seller, flag)) {
      throw std::logic_error("generated trade rejected: " + *bad);
    }
  }

  for (auto k : order_of_first) {
    const auto& d = orders_[k];
    TrueOrder o;
    o.stock = symbol;
    o.member = broker_code(d.broker);
    o.epsilon = d.epsilon;
    o.first_idx = d.first;
    o.last_idx = d.last;
    o.N = d.children.size();
    double own = 0.0;
    double aggressive = 0.0;
    for (auto i : d.children) {
      const double v = prices[i] * static_cast<double>(shares[i]);
      own += v;
      if (slots_[i].market_order) aggressive += v;
    }
    double market = 0.0;
    for (std::size_t i = d.first; i <= d.last; ++i) market += prices[i] * static_cast<double>(shares[i]);
    o.V = d.epsilon * own;
    o.T_seconds = calendar_.trading_seconds(slots_[d.first].t, slots_[d.last].t);
    o.f_mo = aggressive / own;
    o.alpha = own / market;
    truth.push_back(std::move(o));
  }
}

}  // namespace

void SynthConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw PreconditionError(std::string("invalid synthetic market: ") + what);
  };
  require(n_stocks >= 1 && n_sessions >= 1, "need at least one stock and one session");
  require(session_seconds > 0.0 && open_seconds >= 0.0 && open_seconds + session_seconds <= 86400.0,
          "sessions must fit within a day");
  require(trade_rate > 0.0, "trade_rate must be positive");
  require(n_members >= 2, "need at least two member codes");
  require(n_orders == 0 || brokers_per_stock >= 1, "orders need at least one broker per stock");
  require(size_tail > 0.0, "size_tail must be positive");
  require(size_min >= 2 && size_max >= size_min, "need 2 <= size_min <= size_max");
  require(alpha > 0.0 && alpha < 1.0, "participation target alpha must lie in (0, 1)");
  require(alpha_spread >= 0.0 && alpha_spread < 1.0 && alpha * (1.0 + alpha_spread) < 1.0,
          "per-order participation must stay below 1");
  require(fmo_high_weight >= 0.0 && fmo_low_weight >= 0.0 && fmo_high_weight + fmo_low_weight <= 1.0,
          "f_mo mix weights must be non-negative and sum to at most 1");
  require(impact_beta > 0.0 && impact_gamma >= 0.0, "impact exponents must be positive");
  require(sigma >= 0.0 && market_vol >= 0.0, "volatilities must be non-negative");
  require(spread > 0.0 && spread < 2.0, "spread must lie in (0, 2)");
  require(u_shape >= 0.0 && u_shape < 1.0, "u_shape must lie in [0, 1)");
  require(shares_mean > 0.0 && size_sigma >= 0.0, "trade sizes must be positive");
  require(broker_background_per_session >= 0.0 &&
              broker_background_per_session * static_cast<double>(brokers_per_stock) <
                  trade_rate * session_seconds,
          "broker background exceeds the trade rate");
  require(broker_size_scale > 0.0 && broker_size_scale <= 1.0, "broker_size_scale must lie in (0, 1]");
  require(unknown_flag_fraction >= 0.0 && unknown_flag_fraction <= 1.0, "unknown_flag_fraction must lie in [0, 1]");
  require(index_interval_seconds > 0.0, "index interval must be positive");
}

void SynthConfig::bind(ParamTable& t, const std::string& p) {
  t.add(p + "seed", seed, "random seed");
  t.add(p + "n_stocks", n_stocks, "number of stocks");
  t.add(p + "n_sessions", n_sessions, "number of trading sessions");
  t.add(p + "start_date", start_date, "first session date (weekdays only)");
  t.add(p + "open_seconds", open_seconds, "session open, seconds after UTC midnight");
  t.add(p + "session_seconds", session_seconds, "session length in seconds");
  t.add(p + "trade_rate", trade_rate, "trades per second per stock");
  t.add(p + "n_members", n_members, "non-broker member codes");
  t.add(p + "brokers_per_stock", brokers_per_stock, "brokers executing embedded orders in each stock");
  t.add(p + "n_orders", n_orders, "embedded orders in total");
  t.add(p + "size_tail", size_tail, "Pareto exponent of the child-trade count");
  t.add(p + "size_min", size_min, "minimum child trades per order");
  t.add(p + "size_max", size_max, "maximum child trades per order");
  t.add(p + "alpha", alpha, "target participation rate");
  t.add(p + "alpha_spread", alpha_spread, "relative half-width of the per-order participation");
  t.add(p + "fmo_high_weight", fmo_high_weight, "share of orders with f_mo in [0.8, 1]");
  t.add(p + "fmo_low_weight", fmo_low_weight, "share of orders with f_mo in [0, 0.2]");
  t.add(p + "impact_A", impact_A, "impact amplitude in spreads");
  t.add(p + "impact_beta", impact_beta, "impact growth exponent in t/T");
  t.add(p + "impact_gamma", impact_gamma, "impact scaling exponent in N");
  t.add_custom(
      p + "reversion", [this] { return std::string(reversion == ReversionMode::None ? "none" : "to-vwap"); },
      [this](std::string_view s) {
        if (s == "none") {
          reversion = ReversionMode::None;
        } else if (s == "to-vwap") {
          reversion = ReversionMode::ToVwap;
        } else {
          throw InputError("invalid reversion mode '" + std::string(s) + "' (none or to-vwap)");
        }
      },
      "post-order impact: none or to-vwap");
  t.add(p + "sigma", sigma, "per-trade log-midprice noise");
  t.add(p + "spread", spread, "relative bid-ask spread");
  t.add(p + "u_shape", u_shape, "intraday U-shape amplitude of trade sizes");
  t.add(p + "shares_mean", shares_mean, "mean trade size in shares");
  t.add(p + "size_sigma", size_sigma, "lognormal dispersion of trade sizes");
  t.add(p + "broker_background_per_session", broker_background_per_session,
        "background trades per session per broker outside orders");
  t.add(p + "broker_size_scale", broker_size_scale, "size multiplier of broker background trades");
  t.add(p + "unknown_flag_fraction", unknown_flag_fraction, "share of trades printed without an aggressor flag");
  t.add(p + "market_drift", market_drift, "common log drift per trading day");
  t.add(p + "market_vol", market_vol, "common log volatility per sqrt trading day");
  t.add(p + "index_interval_seconds", index_interval_seconds, "index sampling interval in trading seconds");
}

std::vector<std::string> weekday_dates(const std::string& start, std::size_t count) {
  std::vector<std::string> out;
  for (std::int64_t day = parse_date(start); out.size() < count; ++day) {
    const auto weekday = ((day % 7) + 10) % 7;  // 0 = Monday
    if (weekday < 5) out.push_back(civil_from_days(day));
  }
  return out;
}

SynthMarket generate(const SynthConfig& c) {
  c.validate();
  std::vector<Session> sessions;
  for (const auto& date : weekday_dates(c.start_date, c.n_sessions)) {
    const Nanos midnight = parse_date(date) * kNanosPerDay;
    const Nanos open = midnight + std::llround(c.open_seconds * kNanosPerSecond);
    sessions.push_back(Session{date, open, open + std::llround(c.session_seconds * kNanosPerSecond)});
  }
  TradingCalendar calendar(sessions);

  const Nanos step = std::max<Nanos>(1, std::llround(c.index_interval_seconds * kNanosPerSecond));
  std::vector<double> factor(static_cast<std::size_t>(calendar.total_trading_time() / step) + 1, 0.0);
  {
    std::mt19937_64 rng(mix_seed(c.seed, 0));
    std::normal_distribution<double> z;
    const double dt = c.index_interval_seconds / c.session_seconds;
    for (std::size_t k = 1; k < factor.size(); ++k) {
      factor[k] = factor[k - 1] + c.market_drift * dt + c.market_vol * std::sqrt(dt) * z(rng);
    }
  }

  SynthMarket out;
  TapeBuilder builder;
  builder.set_calendar(calendar);
  const int width = std::max(2, static_cast<int>(std::to_string(c.n_stocks).size()));
  std::vector<std::vector<std::pair<Nanos, double>>> log_mids(c.n_stocks);
  for (std::size_t s = 0; s < c.n_stocks; ++s) {
    const std::size_t n = c.n_orders / c.n_stocks + (s < c.n_orders % c.n_stocks ? 1 : 0);
    StockGenerator gen(c, calendar, s, factor, step);
    gen.run(n, padded("S", s + 1, width), builder, out.truth, log_mids[s]);
  }
  for (std::size_t k = 0; k < out.truth.size(); ++k) out.truth[k].order_id = k + 1;
  out.tape = std::move(builder).build();

  // Equal-weight index of log-midprices relative to each stock's first quote.
  std::vector<std::size_t> cursor(c.n_stocks, 0);
  for (const auto& session : calendar.sessions()) {
    for (Nanos t = session.open; t <= session.close; t += step) {
      double sum = 0.0;
      for (std::size_t s = 0; s < c.n_stocks; ++s) {
        const auto& lm = log_mids[s];
        while (cursor[s] + 1 < lm.size() && lm[cursor[s] + 1].first <= t) ++cursor[s];
        if (!lm.empty() && lm[cursor[s]].first <= t) sum += lm[cursor[s]].second - lm.front().second;
      }
      out.index.push_back(IndexPoint{t, 100.0 * std::exp(sum / static_cast<double>(c.n_stocks))});
    }
  }
  return out;
}

std::string ground_truth_csv(const std::vector<TrueOrder>& truth) {
  std::string out(kGroundTruthHeader);
  out.push_back('\n');
  for (const auto& o : truth) {
    csv::append_int(out, static_cast<std::int64_t>(o.order_id));
    out.push_back(',');
    out.append(o.stock).push_back(',');
    out.append(o.member).push_back(',');
    csv::append_int(out, o.epsilon);
    out.push_back(',');
    csv::append_int(out, static_cast<std::int64_t>(o.first_idx));
    out.push_back(',');
    csv::append_int(out, static_cast<std::int64_t>(o.last_idx));
    out.push_back(',');
    csv::append_int(out, static_cast<std::int64_t>(o.N));
    for (double v : {o.V, o.T_seconds, o.f_mo, o.alpha}) {
      out.push_back(',');
      csv::append_double(out, v);
    }
    out.push_back('\n');
  }
  return out;
}

std::vector<TrueOrder> read_ground_truth(const std::filesystem::path& path) {
  const auto table = csv::read_table(path, kGroundTruthHeader);
  std::vector<TrueOrder> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto where = path.string() + ":" + std::to_string(table.line_numbers[r]);
    auto i = [&](std::size_t k) {
      auto v = csv::parse_int(row[k]);
      if (!v || *v < 0) throw InputError(where + ": malformed integer in column " + std::to_string(k + 1));
      return static_cast<std::size_t>(*v);
    };
    auto d = [&](std::size_t k) {
      auto v = csv::parse_double(row[k]);
      if (!v) throw InputError(where + ": malformed number in column " + std::to_string(k + 1));
      return *v;
    };
    TrueOrder o;
    o.order_id = i(0);
    o.stock = row[1];
    o.member = row[2];
    const auto eps = csv::parse_int(row[3]);
    if (!eps || (*eps != 1 && *eps != -1)) throw InputError(where + ": epsilon must be +1 or -1");
    o.epsilon = static_cast<int>(*eps);
    o.first_idx = i(4);
    o.last_idx = i(5);
    o.N = i(6);
    o.V = d(7);
    o.T_seconds = d(8);
    o.f_mo = d(9);
    o.alpha = d(10);
    out.push_back(std::move(o));
  }
  return out;
}

std::string index_csv(const std::vector<IndexPoint>& index) {
  std::string out(kIndexHeader);
  out.push_back('\n');
  for (const auto& p : index) {
    csv::append_int(out, p.timestamp);
    out.push_back(',');
    csv::append_double(out, p.level);
    out.push_back('\n');
  }
  return out;
}

void write_market(const SynthMarket& market, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  csv::write_file(dir / "trades.csv", trades_csv(market.tape));
  csv::write_file(dir / "quotes.csv", quotes_csv(market.tape));
  csv::write_file(dir / "calendar.csv", calendar_csv(market.tape.calendar()));
  csv::write_file(dir / "index.csv", index_csv(market.index));
  csv::write_file(dir / "ground_truth.csv", ground_truth_csv(market.truth));
}

}  // namespace metaimpact
