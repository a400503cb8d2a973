#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace metaimpact::csv {

/// Reads a whole file. Throws MissingFileError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Iterates LF-terminated lines of a buffer, stripping a trailing CR.
class LineReader {
 public:
  explicit LineReader(std::string_view buffer) : rest_(buffer) {}
  bool next(std::string_view& line);
  [[nodiscard]] std::size_t line_number() const noexcept { return line_no_; }

 private:
  std::string_view rest_;
  std::size_t line_no_ = 0;
};

/// Splits on ',' into `out` (reused across calls). No quoting support: none of
/// the tape schemas carry embedded commas.
void split(std::string_view line, std::vector<std::string_view>& out);

std::optional<std::int64_t> parse_int(std::string_view s);
std::optional<double> parse_double(std::string_view s);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);
void append_double(std::string& out, double v);
void append_int(std::string& out, std::int64_t v);

/// Throws InputError naming expected vs found header.
void expect_header(std::string_view found, std::string_view expected, const std::filesystem::path& path);

/// A parsed CSV table with a header, for the small stage artifacts.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  [[nodiscard]] std::size_t column(std::string_view name) const;
};

Table read_table(const std::filesystem::path& path, std::string_view expected_header);

void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace metaimpact::csv
