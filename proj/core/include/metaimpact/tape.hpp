#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "metaimpact/calendar.hpp"
#include "metaimpact/types.hpp"

namespace metaimpact {

struct Trade {
  Nanos timestamp = 0;
  double price = 0.0;
  std::int64_t shares = 0;
  MemberId buyer;
  MemberId seller;
  Aggressor aggressor = Aggressor::Unknown;

  /// Currency volume (price x shares).
  [[nodiscard]] double volume() const noexcept { return price * static_cast<double>(shares); }
};

struct QuoteSnapshot {
  Nanos timestamp = 0;
  double bid = 0.0;
  double ask = 0.0;

  [[nodiscard]] double mid() const noexcept { return 0.5 * (bid + ask); }
  [[nodiscard]] double relative_spread() const noexcept { return (ask - bid) / mid(); }
};

/// Trades and quotes of one stock, each time-ordered.
struct StockTape {
  std::string symbol;
  std::vector<Trade> trades;
  std::vector<QuoteSnapshot> quotes;

  /// Index of the latest quote with timestamp <= t (ties resolve to the last
  /// quote at t).
  [[nodiscard]] std::optional<std::size_t> prevailing_quote(Nanos t) const;
  [[nodiscard]] std::optional<double> mid_at(Nanos t) const;
  /// False for trades printed before the first quote of the stock; such
  /// trades are excluded from midprice-dependent analytics.
  [[nodiscard]] bool has_prevailing_quote(std::size_t trade_index) const;
  /// Half-open index range of trades with timestamp in [from, to].
  [[nodiscard]] std::pair<std::size_t, std::size_t> trade_range(Nanos from, Nanos to) const;
};

struct RowRejection {
  std::string file;
  std::size_t line = 0;
  std::string reason;
};

struct IngestReport {
  std::size_t trades = 0;
  std::size_t quotes = 0;
  std::size_t sessions = 0;
  std::size_t unquoted_trades = 0;
  std::vector<RowRejection> rejections;
};

/// Immutable market data for a set of stocks. Safe to share across threads.
class Tape {
 public:
  Tape() = default;

  [[nodiscard]] std::span<const StockTape> stocks() const noexcept { return stocks_; }
  /// Throws InputError for an unknown symbol.
  [[nodiscard]] const StockTape& stock(std::string_view symbol) const;
  [[nodiscard]] std::optional<std::size_t> find_stock(std::string_view symbol) const;
  [[nodiscard]] const SymbolTable& members() const noexcept { return members_; }
  [[nodiscard]] const TradingCalendar& calendar() const noexcept { return calendar_; }
  [[nodiscard]] std::size_t trade_count() const noexcept;
  [[nodiscard]] std::size_t quote_count() const noexcept;

 private:
  friend class TapeBuilder;
  std::vector<StockTape> stocks_;  // sorted by symbol
  SymbolTable members_;
  TradingCalendar calendar_;
};

/// Incremental construction with per-row validation. Rows that violate a
/// record invariant are rejected; out-of-order timestamps within a stock
/// are fatal (InputError naming the offending line).
class TapeBuilder {
 public:
  /// Returns a rejection reason, or nullopt if the row was accepted.
  std::optional<std::string> add_trade(std::string_view stock, Nanos ts, double price, std::int64_t shares,
                                       std::string_view buyer, std::string_view seller, Aggressor aggressor,
                                       std::size_t line = 0);
  std::optional<std::string> add_quote(std::string_view stock, Nanos ts, double bid, double ask,
                                       std::size_t line = 0);
  void set_calendar(TradingCalendar calendar) { calendar_ = std::move(calendar); }
  void set_source_names(std::string trades, std::string quotes) {
    trade_source_ = std::move(trades);
    quote_source_ = std::move(quotes);
  }

  Tape build(IngestReport* report = nullptr) &&;

 private:
  StockTape& slot(std::string_view stock);

  std::vector<StockTape> stocks_;
  std::unordered_map<std::string, std::size_t> stock_index_;
  SymbolTable members_;
  TradingCalendar calendar_;
  std::string trade_source_ = "trades";
  std::string quote_source_ = "quotes";
};

inline constexpr std::string_view kTradesHeader =
    "timestamp_ns,stock,price,shares,buyer_member,seller_member,aggressor";
inline constexpr std::string_view kQuotesHeader = "timestamp_ns,stock,bid,ask";
inline constexpr std::string_view kCalendarHeader = "date,open_ns,close_ns";

TradingCalendar read_calendar(const std::filesystem::path& path);

/// Reads the three tape CSVs. Malformed rows are rejected and reported with
/// their line numbers.
Tape ingest_tape(const std::filesystem::path& trade_file, const std::filesystem::path& quote_file,
                 const std::filesystem::path& calendar_file, IngestReport* report = nullptr);

/// Canonical CSV writers; re-ingesting their output reproduces the tape.
std::string trades_csv(const Tape& tape);
std::string quotes_csv(const Tape& tape);
std::string calendar_csv(const TradingCalendar& calendar);

char aggressor_code(Aggressor a) noexcept;

/// (bid + ask) / 2 of the latest quote at or before t. Throws NoQuoteError.
double midprice_at(const Tape& tape, std::string_view stock, Nanos t);

struct TimeWindow {
  Nanos from = 0;
  Nanos to = 0;
};

/// Mean of (ask - bid) / mid weighted by how long each quote prevailed inside
/// the window, measured in trading time. Throws PreconditionError if no quote
/// prevails anywhere in the window.
double mean_relative_spread(const Tape& tape, std::string_view stock, TimeWindow window);
double mean_relative_spread(const StockTape& stock, const TradingCalendar& calendar, TimeWindow window);

}  // namespace metaimpact
