#include "metaimpact/config.hpp"

#include <algorithm>

namespace metaimpact {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValues parse_key_values(std::string_view text, const std::string& source) {
  KeyValues out;
  csv::LineReader reader(text);
  std::string_view line;
  while (reader.next(line)) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const auto where = source + ":" + std::to_string(reader.line_number());
    if (eq == std::string_view::npos) throw InputError(where + ": expected key=value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw InputError(where + ": empty key");
    out[std::string(key)] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  return parse_key_values(csv::read_file(path), path.string());
}

namespace detail {

void bad_value(std::string_view key, std::string_view value) {
  throw InputError("invalid value '" + std::string(value) + "' for " + std::string(key));
}

}  // namespace detail

const ParamTable::Param* ParamTable::find(std::string_view key) const {
  auto it = std::find_if(params_.begin(), params_.end(), [key](const Param& p) { return p.key == key; });
  return it == params_.end() ? nullptr : &*it;
}

void ParamTable::set(std::string_view key, std::string_view value) {
  const auto* p = find(key);
  if (p == nullptr) throw InputError("unknown configuration key '" + std::string(key) + "'");
  p->set(value);
}

void ParamTable::apply(const KeyValues& values) {
  for (const auto& [k, v] : values) set(k, v);
}

std::string ParamTable::serialize() const {
  std::string out;
  for (const auto& p : params_) {
    out.append(p.key).append(" = ").append(p.get()).push_back('\n');
  }
  return out;
}

}  // namespace metaimpact
