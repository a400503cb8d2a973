#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace metaimpact {

/// Nanoseconds since the Unix epoch (UTC).
using Nanos = std::int64_t;

inline constexpr Nanos kNanosPerSecond = 1'000'000'000;

enum class Side : std::uint8_t { Buyer, Seller };

enum class Aggressor : std::uint8_t { Buyer, Seller, Unknown };

constexpr Side opposite(Side s) noexcept {
  return s == Side::Buyer ? Side::Seller : Side::Buyer;
}

constexpr int sign_of(Side s) noexcept { return s == Side::Buyer ? +1 : -1; }

/// Interned member code. Index into the owning tape's member table.
struct MemberId {
  std::uint32_t value = 0;
  friend constexpr bool operator==(MemberId, MemberId) = default;
  friend constexpr auto operator<=>(MemberId, MemberId) = default;
};

/// Bidirectional string <-> dense id map for member codes.
class SymbolTable {
 public:
  MemberId intern(std::string_view code);
  [[nodiscard]] const std::string& name(MemberId id) const { return names_.at(id.value); }
  [[nodiscard]] std::size_t size() const noexcept { return names_.size(); }
  [[nodiscard]] bool contains(std::string_view code) const;
  [[nodiscard]] MemberId id(std::string_view code) const;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> index_;
};

}  // namespace metaimpact
