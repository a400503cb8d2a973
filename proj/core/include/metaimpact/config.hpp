#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "metaimpact/csv.hpp"
#include "metaimpact/errors.hpp"

namespace metaimpact {

/// Parsed `key = value` lines. '#' starts a comment.
using KeyValues = std::map<std::string, std::string, std::less<>>;

KeyValues parse_key_values(std::string_view text, const std::string& source = "config");
KeyValues read_key_values(const std::filesystem::path& path);

/// Named, typed references into a configuration struct. Serialization
/// follows registration order.
class ParamTable {
 public:
  struct Param {
    std::string key;
    std::string help;
    std::function<std::string()> get;
    std::function<void(std::string_view)> set;
  };

  template <typename T>
  void add(std::string key, T& ref, std::string help = {});

  void add_custom(std::string key, std::function<std::string()> get, std::function<void(std::string_view)> set,
                  std::string help = {}) {
    params_.push_back(Param{std::move(key), std::move(help), std::move(get), std::move(set)});
  }

  [[nodiscard]] const std::vector<Param>& params() const noexcept { return params_; }
  [[nodiscard]] const Param* find(std::string_view key) const;

  /// Throws InputError for an unknown key or an unparsable value.
  void set(std::string_view key, std::string_view value);
  /// Applies every pair; unknown keys are an InputError.
  void apply(const KeyValues& values);
  [[nodiscard]] std::string serialize() const;

 private:
  std::vector<Param> params_;
};

namespace detail {

[[noreturn]] void bad_value(std::string_view key, std::string_view value);

template <typename T>
T parse_value(std::string_view key, std::string_view text) {
  if constexpr (std::is_same_v<T, bool>) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    bad_value(key, text);
  } else if constexpr (std::is_floating_point_v<T>) {
    auto v = csv::parse_double(text);
    if (!v) bad_value(key, text);
    return static_cast<T>(*v);
  } else if constexpr (std::is_integral_v<T>) {
    auto v = csv::parse_int(text);
    if (!v || (std::is_unsigned_v<T> && *v < 0)) bad_value(key, text);
    return static_cast<T>(*v);
  } else if constexpr (std::is_same_v<T, std::filesystem::path>) {
    return std::filesystem::path(std::string(text));
  } else {
    return std::string(text);
  }
}

template <typename T>
std::string format_value(const T& v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_floating_point_v<T>) {
    return csv::format_double(static_cast<double>(v));
  } else if constexpr (std::is_integral_v<T>) {
    return std::to_string(v);
  } else if constexpr (std::is_same_v<T, std::filesystem::path>) {
    return v.string();
  } else {
    return v;
  }
}

template <typename T>
struct is_optional : std::false_type {};
template <typename T>
struct is_optional<std::optional<T>> : std::true_type {};

}  // namespace detail

template <typename T>
void ParamTable::add(std::string key, T& ref, std::string help) {
  std::string k = key;
  if constexpr (detail::is_optional<T>::value) {
    using V = typename T::value_type;
    add_custom(
        std::move(key), [&ref] { return ref ? detail::format_value<V>(*ref) : std::string("none"); },
        [&ref, k](std::string_view s) {
          if (s == "none" || s.empty()) {
            ref.reset();
          } else {
            ref = detail::parse_value<V>(k, s);
          }
        },
        std::move(help));
  } else {
    add_custom(
        std::move(key), [&ref] { return detail::format_value<T>(ref); },
        [&ref, k](std::string_view s) { ref = detail::parse_value<T>(k, s); }, std::move(help));
  }
}

}  // namespace metaimpact
