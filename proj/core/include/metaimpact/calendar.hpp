#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "metaimpact/types.hpp"

namespace metaimpact {

struct Session {
  std::string date;  // YYYY-MM-DD
  Nanos open = 0;
  Nanos close = 0;

  [[nodiscard]] Nanos length() const noexcept { return close - open; }
  [[nodiscard]] int year() const;
};

/// Ordered, non-overlapping trading sessions. Maps wall-clock timestamps onto
/// a continuous trading-time axis with the overnight gaps removed.
///
/// An empty calendar is valid: trading time then equals wall-clock time.
class TradingCalendar {
 public:
  TradingCalendar() = default;
  /// Throws InputError if sessions overlap, are out of order or have
  /// non-positive length.
  explicit TradingCalendar(std::vector<Session> sessions);

  [[nodiscard]] std::span<const Session> sessions() const noexcept { return sessions_; }
  [[nodiscard]] bool empty() const noexcept { return sessions_.empty(); }

  /// Trading nanoseconds elapsed from the first open up to `t`.
  [[nodiscard]] Nanos trading_offset(Nanos t) const;
  /// Inverse of trading_offset. Offsets landing on a session boundary map to
  /// that session's close.
  [[nodiscard]] Nanos wall_time_at(Nanos offset) const;
  [[nodiscard]] Nanos trading_duration(Nanos from, Nanos to) const {
    return trading_offset(to) - trading_offset(from);
  }
  [[nodiscard]] double trading_seconds(Nanos from, Nanos to) const {
    return static_cast<double>(trading_duration(from, to)) / kNanosPerSecond;
  }
  [[nodiscard]] Nanos total_trading_time() const;

  /// Session containing `t`, or the latest session opened before `t`.
  [[nodiscard]] std::optional<std::size_t> session_index(Nanos t) const;
  /// Calendar year of the session containing `t` (falls back to the UTC year).
  [[nodiscard]] int year_of(Nanos t) const;
  /// Sessions belonging to a calendar year.
  [[nodiscard]] std::vector<std::size_t> sessions_in_year(int year) const;

 private:
  std::vector<Session> sessions_;
  std::vector<Nanos> cumulative_;  // trading time before each session opens
};

/// UTC calendar year of a timestamp.
int utc_year(Nanos t);

}  // namespace metaimpact
