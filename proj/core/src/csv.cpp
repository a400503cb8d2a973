#include "metaimpact/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "metaimpact/errors.hpp"

namespace metaimpact::csv {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFileError(path.string());
  std::string buf;
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  if (size > 0) {
    buf.resize(static_cast<std::size_t>(size));
    in.seekg(0);
    in.read(buf.data(), size);
  }
  return buf;
}

bool LineReader::next(std::string_view& line) {
  if (rest_.empty()) return false;
  const auto nl = rest_.find('\n');
  if (nl == std::string_view::npos) {
    line = rest_;
    rest_ = {};
  } else {
    line = rest_.substr(0, nl);
    rest_.remove_prefix(nl + 1);
  }
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  ++line_no_;
  return true;
}

void split(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

void append_double(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

void append_int(std::string& out, std::int64_t v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

std::string format_double(double v) {
  std::string s;
  append_double(s, v);
  return s;
}

void expect_header(std::string_view found, std::string_view expected, const std::filesystem::path& path) {
  if (found != expected) {
    throw InputError("schema mismatch in " + path.string() + ": expected header '" + std::string(expected) +
                     "', found '" + std::string(found) + "'");
  }
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw InputError("missing column '" + std::string(name) + "'");
}

Table read_table(const std::filesystem::path& path, std::string_view expected_header) {
  const std::string buf = read_file(path);
  LineReader reader(buf);
  std::string_view line;
  if (!reader.next(line)) {
    throw InputError("empty file " + path.string() + ": expected header '" + std::string(expected_header) + "'");
  }
  expect_header(line, expected_header, path);
  Table table;
  std::vector<std::string_view> fields;
  split(line, fields);
  for (auto f : fields) table.header.emplace_back(f);
  while (reader.next(line)) {
    if (line.empty()) continue;
    split(line, fields);
    if (fields.size() != table.header.size()) {
      throw InputError(path.string() + ":" + std::to_string(reader.line_number()) + ": expected " +
                       std::to_string(table.header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    auto& row = table.rows.emplace_back();
    row.reserve(fields.size());
    for (auto f : fields) row.emplace_back(f);
    table.line_numbers.push_back(reader.line_number());
  }
  return table;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace metaimpact::csv
