#include "metaimpact/signing.hpp"

#include "metaimpact/csv.hpp"

namespace metaimpact {

SigningResult sign_trades(const StockTape& stock, const SigningOptions& options) {
  SigningResult out;
  const auto& trades = stock.trades;
  out.trades.reserve(trades.size());
  out.rules.reserve(trades.size());

  // Tick-test state: the last traded price, and the last price before the
  // current run of equal prices.
  bool have_prev = false;
  double prev_price = 0.0;       // last traded price
  bool have_diff = false;
  double prev_diff_price = 0.0;  // last price that differed from prev_price

  for (std::size_t i = 0; i < trades.size(); ++i) {
    const auto& t = trades[i];
    SignedTrade s{i, Side::Buyer, false};
    SigningRule rule = SigningRule::Flag;

    if (t.aggressor == Aggressor::Buyer) {
      s.initiator = Side::Buyer;
    } else if (t.aggressor == Aggressor::Seller) {
      s.initiator = Side::Seller;
    } else {
      s.inferred = true;
      ++out.inferred;
      std::optional<double> mid = stock.mid_at(t.timestamp - options.lr_delay_ns);
      if (mid && t.price > *mid) {
        s.initiator = Side::Buyer;
        rule = SigningRule::QuoteRule;
      } else if (mid && t.price < *mid) {
        s.initiator = Side::Seller;
        rule = SigningRule::QuoteRule;
      } else {
        // Reference: the last price different from this trade's price.
        std::optional<double> reference;
        if (have_prev && prev_price != t.price) {
          reference = prev_price;
        } else if (have_diff) {
          reference = prev_diff_price;
        }
        if (reference) {
          ++out.tick_tests;
          rule = SigningRule::TickTest;
          s.initiator = t.price > *reference ? Side::Buyer : Side::Seller;
        } else {
          ++out.unclassifiable;
          rule = SigningRule::Fallback;
          s.initiator = Side::Buyer;
        }
      }
    }

    if (have_prev && t.price != prev_price) {
      prev_diff_price = prev_price;
      have_diff = true;
    }
    prev_price = t.price;
    have_prev = true;

    out.trades.push_back(s);
    out.rules.push_back(rule);
  }
  return out;
}

SigningResult sign_trades(const Tape& tape, std::string_view stock, const SigningOptions& options) {
  return sign_trades(tape.stock(stock), options);
}

std::string signed_trades_csv(const Tape& tape, const std::vector<SigningResult>& per_stock) {
  std::string out(kSignedTradesHeader);
  out.push_back('\n');
  const auto stocks = tape.stocks();
  for (std::size_t k = 0; k < stocks.size() && k < per_stock.size(); ++k) {
    const auto& s = stocks[k];
    for (std::size_t i = 0; i < s.trades.size(); ++i) {
      const auto& t = s.trades[i];
      const auto& st = per_stock[k].trades[i];
      csv::append_int(out, t.timestamp);
      out.push_back(',');
      out.append(s.symbol).push_back(',');
      csv::append_double(out, t.price);
      out.push_back(',');
      csv::append_int(out, t.shares);
      out.push_back(',');
      out.append(tape.members().name(t.buyer)).push_back(',');
      out.append(tape.members().name(t.seller)).push_back(',');
      out.push_back(aggressor_code(t.aggressor));
      out.push_back(',');
      out.push_back(st.initiator == Side::Buyer ? 'B' : 'S');
      out.push_back(',');
      out.push_back(st.inferred ? '1' : '0');
      out.push_back('\n');
    }
  }
  return out;
}

}  // namespace metaimpact
