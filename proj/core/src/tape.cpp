#include "metaimpact/tape.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "metaimpact/csv.hpp"
#include "metaimpact/errors.hpp"

namespace metaimpact {

MemberId SymbolTable::intern(std::string_view code) {
  if (auto it = index_.find(code); it != index_.end()) return MemberId{it->second};
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(code);
  index_.emplace(std::string(code), id);
  return MemberId{id};
}

bool SymbolTable::contains(std::string_view code) const { return index_.find(code) != index_.end(); }

MemberId SymbolTable::id(std::string_view code) const {
  auto it = index_.find(code);
  if (it == index_.end()) throw InputError("unknown member code '" + std::string(code) + "'");
  return MemberId{it->second};
}

// ---------------------------------------------------------------------------
// StockTape

std::optional<std::size_t> StockTape::prevailing_quote(Nanos t) const {
  auto it = std::upper_bound(quotes.begin(), quotes.end(), t,
                             [](Nanos v, const QuoteSnapshot& q) { return v < q.timestamp; });
  if (it == quotes.begin()) return std::nullopt;
  return static_cast<std::size_t>(std::distance(quotes.begin(), it) - 1);
}

std::optional<double> StockTape::mid_at(Nanos t) const {
  if (auto q = prevailing_quote(t)) return quotes[*q].mid();
  return std::nullopt;
}

bool StockTape::has_prevailing_quote(std::size_t trade_index) const {
  return !quotes.empty() && quotes.front().timestamp <= trades.at(trade_index).timestamp;
}

std::pair<std::size_t, std::size_t> StockTape::trade_range(Nanos from, Nanos to) const {
  auto lo = std::lower_bound(trades.begin(), trades.end(), from,
                             [](const Trade& tr, Nanos v) { return tr.timestamp < v; });
  auto hi = std::upper_bound(lo, trades.end(), to, [](Nanos v, const Trade& tr) { return v < tr.timestamp; });
  return {static_cast<std::size_t>(lo - trades.begin()), static_cast<std::size_t>(hi - trades.begin())};
}

// ---------------------------------------------------------------------------
// Tape

const StockTape& Tape::stock(std::string_view symbol) const {
  if (auto idx = find_stock(symbol)) return stocks_[*idx];
  throw InputError("unknown stock '" + std::string(symbol) + "'");
}

std::optional<std::size_t> Tape::find_stock(std::string_view symbol) const {
  auto it = std::lower_bound(stocks_.begin(), stocks_.end(), symbol,
                             [](const StockTape& s, std::string_view v) { return s.symbol < v; });
  if (it == stocks_.end() || it->symbol != symbol) return std::nullopt;
  return static_cast<std::size_t>(it - stocks_.begin());
}

std::size_t Tape::trade_count() const noexcept {
  return std::accumulate(stocks_.begin(), stocks_.end(), std::size_t{0},
                         [](std::size_t acc, const StockTape& s) { return acc + s.trades.size(); });
}

std::size_t Tape::quote_count() const noexcept {
  return std::accumulate(stocks_.begin(), stocks_.end(), std::size_t{0},
                         [](std::size_t acc, const StockTape& s) { return acc + s.quotes.size(); });
}

// ---------------------------------------------------------------------------
// TapeBuilder

StockTape& TapeBuilder::slot(std::string_view stock) {
  auto it = stock_index_.find(std::string(stock));
  if (it != stock_index_.end()) return stocks_[it->second];
  stock_index_.emplace(std::string(stock), stocks_.size());
  auto& s = stocks_.emplace_back();
  s.symbol = std::string(stock);
  return s;
}

std::optional<std::string> TapeBuilder::add_trade(std::string_view stock, Nanos ts, double price,
                                                  std::int64_t shares, std::string_view buyer,
                                                  std::string_view seller, Aggressor aggressor, std::size_t line) {
  if (stock.empty()) return "empty stock symbol";
  if (!(std::isfinite(price) && price > 0.0)) return "price must be positive";
  if (shares <= 0) return "shares must be positive";
  if (buyer.empty() || seller.empty()) return "member codes must be non-empty";
  auto& s = slot(stock);
  if (!s.trades.empty() && ts < s.trades.back().timestamp) {
    throw InputError(trade_source_ + ":" + std::to_string(line) + ": trade timestamp " + std::to_string(ts) +
                     " precedes previous trade in " + std::string(stock));
  }
  s.trades.push_back(Trade{ts, price, shares, members_.intern(buyer), members_.intern(seller), aggressor});
  return std::nullopt;
}

std::optional<std::string> TapeBuilder::add_quote(std::string_view stock, Nanos ts, double bid, double ask,
                                                  std::size_t line) {
  if (stock.empty()) return "empty stock symbol";
  if (!(std::isfinite(bid) && std::isfinite(ask) && bid > 0.0)) return "bid must be positive";
  if (ask < bid) return "ask below bid";
  auto& s = slot(stock);
  if (!s.quotes.empty() && ts < s.quotes.back().timestamp) {
    throw InputError(quote_source_ + ":" + std::to_string(line) + ": quote timestamp " + std::to_string(ts) +
                     " precedes previous quote in " + std::string(stock));
  }
  s.quotes.push_back(QuoteSnapshot{ts, bid, ask});
  return std::nullopt;
}

Tape TapeBuilder::build(IngestReport* report) && {
  Tape tape;
  tape.stocks_ = std::move(stocks_);
  std::sort(tape.stocks_.begin(), tape.stocks_.end(),
            [](const StockTape& a, const StockTape& b) { return a.symbol < b.symbol; });
  tape.members_ = std::move(members_);
  tape.calendar_ = std::move(calendar_);
  if (report) {
    report->trades = tape.trade_count();
    report->quotes = tape.quote_count();
    report->sessions = tape.calendar_.sessions().size();
    report->unquoted_trades = 0;
    for (const auto& s : tape.stocks_) {
      for (std::size_t i = 0; i < s.trades.size(); ++i) {
        if (!s.has_prevailing_quote(i)) ++report->unquoted_trades;
      }
    }
  }
  return tape;
}

// ---------------------------------------------------------------------------
// CSV ingestion

namespace {

std::optional<Aggressor> parse_aggressor(std::string_view s) {
  if (s == "B") return Aggressor::Buyer;
  if (s == "S") return Aggressor::Seller;
  if (s == "U") return Aggressor::Unknown;
  return std::nullopt;
}

void reject(IngestReport* report, const std::string& file, std::size_t line, std::string reason) {
  if (report) report->rejections.push_back(RowRejection{file, line, std::move(reason)});
}

}  // namespace

char aggressor_code(Aggressor a) noexcept {
  switch (a) {
    case Aggressor::Buyer:
      return 'B';
    case Aggressor::Seller:
      return 'S';
    case Aggressor::Unknown:
      break;
  }
  return 'U';
}

TradingCalendar read_calendar(const std::filesystem::path& path) {
  const std::string buf = csv::read_file(path);
  csv::LineReader reader(buf);
  std::string_view line;
  if (!reader.next(line)) throw InputError("empty calendar file " + path.string());
  csv::expect_header(line, kCalendarHeader, path);
  std::vector<Session> sessions;
  std::vector<std::string_view> f;
  while (reader.next(line)) {
    if (line.empty()) continue;
    csv::split(line, f);
    const auto where = path.string() + ":" + std::to_string(reader.line_number());
    if (f.size() != 3) throw InputError(where + ": expected 3 fields");
    auto open = csv::parse_int(f[1]);
    auto close = csv::parse_int(f[2]);
    if (!open || !close || f[0].size() != 10) throw InputError(where + ": malformed calendar row");
    sessions.push_back(Session{std::string(f[0]), *open, *close});
  }
  return TradingCalendar(std::move(sessions));
}

Tape ingest_tape(const std::filesystem::path& trade_file, const std::filesystem::path& quote_file,
                 const std::filesystem::path& calendar_file, IngestReport* report) {
  // Existence is checked up front so a missing file is reported before any
  // parsing work.
  for (const auto* p : {&trade_file, &quote_file, &calendar_file}) {
    if (!std::filesystem::exists(*p)) throw MissingFileError(p->string());
  }
  TapeBuilder builder;
  builder.set_source_names(trade_file.string(), quote_file.string());
  builder.set_calendar(read_calendar(calendar_file));
  std::vector<std::string_view> f;
  std::string_view line;

  {
    const std::string buf = csv::read_file(quote_file);
    csv::LineReader reader(buf);
    if (!reader.next(line)) throw InputError("empty quote file " + quote_file.string());
    csv::expect_header(line, kQuotesHeader, quote_file);
    while (reader.next(line)) {
      if (line.empty()) continue;
      csv::split(line, f);
      const auto n = reader.line_number();
      if (f.size() != 4) {
        reject(report, quote_file.string(), n, "expected 4 fields");
        continue;
      }
      auto ts = csv::parse_int(f[0]);
      auto bid = csv::parse_double(f[2]);
      auto ask = csv::parse_double(f[3]);
      if (!ts || !bid || !ask) {
        reject(report, quote_file.string(), n, "unparseable field");
        continue;
      }
      if (auto why = builder.add_quote(f[1], *ts, *bid, *ask, n)) reject(report, quote_file.string(), n, *why);
    }
  }
  {
    const std::string buf = csv::read_file(trade_file);
    csv::LineReader reader(buf);
    if (!reader.next(line)) throw InputError("empty trade file " + trade_file.string());
    csv::expect_header(line, kTradesHeader, trade_file);
    while (reader.next(line)) {
      if (line.empty()) continue;
      csv::split(line, f);
      const auto n = reader.line_number();
      if (f.size() != 7) {
        reject(report, trade_file.string(), n, "expected 7 fields");
        continue;
      }
      auto ts = csv::parse_int(f[0]);
      auto price = csv::parse_double(f[2]);
      auto shares = csv::parse_int(f[3]);
      auto aggr = parse_aggressor(f[6]);
      if (!ts || !price || !shares || !aggr) {
        reject(report, trade_file.string(), n, "unparseable field");
        continue;
      }
      if (auto why = builder.add_trade(f[1], *ts, *price, *shares, f[4], f[5], *aggr, n)) {
        reject(report, trade_file.string(), n, *why);
      }
    }
  }
  std::vector<RowRejection> rejected;
  if (report) rejected = std::move(report->rejections);
  Tape tape = std::move(builder).build(report);
  if (report) report->rejections = std::move(rejected);
  return tape;
}

std::string trades_csv(const Tape& tape) {
  std::string out;
  out.reserve(tape.trade_count() * 64 + 128);
  out.append(kTradesHeader).push_back('\n');
  for (const auto& s : tape.stocks()) {
    for (const auto& t : s.trades) {
      csv::append_int(out, t.timestamp);
      out.push_back(',');
      out.append(s.symbol).push_back(',');
      csv::append_double(out, t.price);
      out.push_back(',');
      csv::append_int(out, t.shares);
      out.push_back(',');
      out.append(tape.members().name(t.buyer)).push_back(',');
      out.append(tape.members().name(t.seller)).push_back(',');
      out.push_back(aggressor_code(t.aggressor));
      out.push_back('\n');
    }
  }
  return out;
}

std::string quotes_csv(const Tape& tape) {
  std::string out;
  out.reserve(tape.quote_count() * 48 + 64);
  out.append(kQuotesHeader).push_back('\n');
  for (const auto& s : tape.stocks()) {
    for (const auto& q : s.quotes) {
      csv::append_int(out, q.timestamp);
      out.push_back(',');
      out.append(s.symbol).push_back(',');
      csv::append_double(out, q.bid);
      out.push_back(',');
      csv::append_double(out, q.ask);
      out.push_back('\n');
    }
  }
  return out;
}

std::string calendar_csv(const TradingCalendar& calendar) {
  std::string out(kCalendarHeader);
  out.push_back('\n');
  for (const auto& s : calendar.sessions()) {
    out.append(s.date).push_back(',');
    csv::append_int(out, s.open);
    out.push_back(',');
    csv::append_int(out, s.close);
    out.push_back('\n');
  }
  return out;
}

// ---------------------------------------------------------------------------
// Price queries

double midprice_at(const Tape& tape, std::string_view stock, Nanos t) {
  if (auto mid = tape.stock(stock).mid_at(t)) return *mid;
  throw NoQuoteError();
}

double mean_relative_spread(const StockTape& stock, const TradingCalendar& calendar, TimeWindow window) {
  if (window.to < window.from) throw PreconditionError("spread window ends before it starts");
  const auto& quotes = stock.quotes;
  std::size_t i = 0;
  if (auto q = stock.prevailing_quote(window.from)) {
    i = *q;
  } else {
    auto it = std::lower_bound(quotes.begin(), quotes.end(), window.from,
                               [](const QuoteSnapshot& q, Nanos v) { return q.timestamp < v; });
    i = static_cast<std::size_t>(it - quotes.begin());
  }
  if (i >= quotes.size() || quotes[i].timestamp > window.to) {
    throw PreconditionError("no quote prevails in spread window for " + stock.symbol);
  }
  double weighted = 0.0;
  double total = 0.0;
  const std::size_t first = i;
  for (; i < quotes.size() && quotes[i].timestamp <= window.to; ++i) {
    const Nanos begin = std::max(quotes[i].timestamp, window.from);
    const Nanos end = (i + 1 < quotes.size()) ? std::min(quotes[i + 1].timestamp, window.to) : window.to;
    if (end <= begin) continue;
    const auto w = static_cast<double>(calendar.trading_duration(begin, end));
    weighted += w * quotes[i].relative_spread();
    total += w;
  }
  if (total <= 0.0) {
    // Degenerate window: report the spread prevailing at its start.
    return quotes[first].relative_spread();
  }
  return weighted / total;
}

double mean_relative_spread(const Tape& tape, std::string_view stock, TimeWindow window) {
  return mean_relative_spread(tape.stock(stock), tape.calendar(), window);
}

}  // namespace metaimpact
