#include "metaimpact/calendar.hpp"

#include <algorithm>
#include <charconv>

#include "metaimpact/errors.hpp"

namespace metaimpact {

int Session::year() const {
  int y = 0;
  auto [ptr, ec] = std::from_chars(date.data(), date.data() + std::min<std::size_t>(4, date.size()), y);
  if (ec != std::errc{} || ptr != date.data() + 4) {
    return utc_year(open);
  }
  return y;
}

int utc_year(Nanos t) {
  // civil-from-days, proleptic Gregorian.
  std::int64_t days = t / (86400 * kNanosPerSecond);
  if (t < 0 && t % (86400 * kNanosPerSecond) != 0) --days;
  days += 719468;
  const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
  const std::int64_t doe = days - era * 146097;
  const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const std::int64_t mp = (5 * doy + 2) / 153;
  const std::int64_t m = mp + (mp < 10 ? 3 : -9);
  return static_cast<int>(yoe + era * 400 + (m <= 2 ? 1 : 0));
}

TradingCalendar::TradingCalendar(std::vector<Session> sessions) : sessions_(std::move(sessions)) {
  cumulative_.reserve(sessions_.size());
  Nanos acc = 0;
  for (std::size_t i = 0; i < sessions_.size(); ++i) {
    const auto& s = sessions_[i];
    if (s.close <= s.open) {
      throw InputError("calendar session " + s.date + " has close <= open");
    }
    if (i > 0 && s.open < sessions_[i - 1].close) {
      throw InputError("calendar session " + s.date + " overlaps or precedes " + sessions_[i - 1].date);
    }
    cumulative_.push_back(acc);
    acc += s.length();
  }
}

Nanos TradingCalendar::total_trading_time() const {
  if (sessions_.empty()) return 0;
  return cumulative_.back() + sessions_.back().length();
}

std::optional<std::size_t> TradingCalendar::session_index(Nanos t) const {
  auto it = std::upper_bound(sessions_.begin(), sessions_.end(), t,
                             [](Nanos v, const Session& s) { return v < s.open; });
  if (it == sessions_.begin()) return std::nullopt;
  return static_cast<std::size_t>(std::distance(sessions_.begin(), it) - 1);
}

Nanos TradingCalendar::trading_offset(Nanos t) const {
  if (sessions_.empty()) return t;
  auto idx = session_index(t);
  if (!idx) return 0;
  const auto& s = sessions_[*idx];
  return cumulative_[*idx] + (std::min(t, s.close) - s.open);
}

Nanos TradingCalendar::wall_time_at(Nanos offset) const {
  if (sessions_.empty()) return offset;
  if (offset <= 0) return sessions_.front().open;
  // First session whose end offset is >= offset.
  auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), offset);
  std::size_t k = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
  // cumulative_[k] >= offset, so offset falls in session k-1 (or exactly at its end).
  if (k == 0) return sessions_.front().open;
  --k;
  const Nanos within = std::min(offset - cumulative_[k], sessions_[k].length());
  if (k + 1 == sessions_.size() && offset - cumulative_[k] > sessions_[k].length()) {
    // Past the end of the calendar: continue in wall-clock time.
    return sessions_[k].close + (offset - cumulative_[k] - sessions_[k].length());
  }
  return sessions_[k].open + within;
}

int TradingCalendar::year_of(Nanos t) const {
  if (auto idx = session_index(t)) return sessions_[*idx].year();
  return utc_year(t);
}

std::vector<std::size_t> TradingCalendar::sessions_in_year(int year) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < sessions_.size(); ++i) {
    if (sessions_[i].year() == year) out.push_back(i);
  }
  return out;
}

}  // namespace metaimpact
