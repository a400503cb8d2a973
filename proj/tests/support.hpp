#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "metaimpact/csv.hpp"
#include "metaimpact/tape.hpp"

namespace testing_support {

namespace mi = metaimpact;

/// 2023-01-02 00:00 UTC.
inline constexpr mi::Nanos kDay0 = 1672617600LL * mi::kNanosPerSecond;
inline constexpr mi::Nanos kDay = 86400LL * mi::kNanosPerSecond;
inline constexpr mi::Nanos kOpen = 8LL * 3600 * mi::kNanosPerSecond;
inline constexpr mi::Nanos kSession = 8LL * 3600 * mi::kNanosPerSecond + 30LL * 60 * mi::kNanosPerSecond;

inline mi::Nanos seconds(double s) { return static_cast<mi::Nanos>(s * 1e9); }

/// Consecutive daily sessions 08:00-16:30 starting 2023-01-02 (weekends
/// included, which the calendar does not care about).
inline mi::TradingCalendar daily_calendar(std::size_t days, mi::Nanos first_day = kDay0) {
  std::vector<mi::Session> sessions;
  for (std::size_t d = 0; d < days; ++d) {
    const mi::Nanos day = first_day + static_cast<mi::Nanos>(d) * kDay;
    const auto days_since_epoch = day / kDay;
    // civil date from days since epoch
    auto z = days_since_epoch + 719468;
    const auto era = z / 146097;
    const auto doe = z - era * 146097;
    const auto yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    auto y = yoe + era * 400;
    const auto doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const auto mp = (5 * doy + 2) / 153;
    const auto dd = doy - (153 * mp + 2) / 5 + 1;
    const auto mm = mp < 10 ? mp + 3 : mp - 9;
    if (mm <= 2) ++y;
    char date[16];
    std::snprintf(date, sizeof date, "%04lld-%02lld-%02lld", static_cast<long long>(y), static_cast<long long>(mm),
                  static_cast<long long>(dd));
    sessions.push_back(mi::Session{date, day + kOpen, day + kOpen + kSession});
  }
  return mi::TradingCalendar(std::move(sessions));
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("metaimpact_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] const std::filesystem::path& path() const { return path_; }
  [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  void write(const std::string& name, const std::string& contents) const {
    mi::csv::write_file(path_ / name, contents);
  }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) { return mi::csv::read_file(p); }

}  // namespace testing_support
