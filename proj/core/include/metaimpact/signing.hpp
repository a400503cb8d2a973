#pragma once

#include <string>
#include <vector>

#include "metaimpact/tape.hpp"

namespace metaimpact {

struct SignedTrade {
  std::size_t index = 0;  // into StockTape::trades
  Side initiator = Side::Buyer;
  bool inferred = false;
};

/// How an inferred initiator was obtained; diagnostic only.
enum class SigningRule : std::uint8_t { Flag, QuoteRule, TickTest, Fallback };

struct SigningOptions {
  /// Quotes are looked up at (trade time - delay).
  Nanos lr_delay_ns = 0;
};

struct SigningResult {
  std::vector<SignedTrade> trades;  // parallel to StockTape::trades
  std::vector<SigningRule> rules;
  std::size_t inferred = 0;
  std::size_t tick_tests = 0;
  /// U-flagged trades with neither a prevailing quote nor a prior differing
  /// price; assigned Buyer.
  std::size_t unclassifiable = 0;
};

/// Flagged trades pass through; U-flagged trades are classified with the
/// Lee-Ready quote rule (above mid buys, below mid sells) and the tick test at
/// the midpoint or when no quote prevails.
SigningResult sign_trades(const StockTape& stock, const SigningOptions& options = {});
SigningResult sign_trades(const Tape& tape, std::string_view stock, const SigningOptions& options = {});

inline constexpr std::string_view kSignedTradesHeader =
    "timestamp_ns,stock,price,shares,buyer_member,seller_member,aggressor,initiator,inferred";

std::string signed_trades_csv(const Tape& tape, const std::vector<SigningResult>& per_stock);

}  // namespace metaimpact
