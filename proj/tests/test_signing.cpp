#include <map>
#include <random>

#include <gtest/gtest.h>

#include "metaimpact/signing.hpp"
#include "metaimpact/tape.hpp"
#include "lee_ready_fixture.hpp"

namespace mi = metaimpact;

namespace {

struct Row {
  mi::Nanos t;
  double price;
  mi::Aggressor flag;
};

mi::Tape build(const std::vector<std::tuple<mi::Nanos, double, double>>& quotes, const std::vector<Row>& trades) {
  mi::TapeBuilder b;
  for (auto [t, bid, ask] : quotes) b.add_quote("X", t, bid, ask);
  for (const auto& r : trades) b.add_trade("X", r.t, r.price, 10, "A", "B", r.flag);
  return std::move(b).build();
}

constexpr auto U = mi::Aggressor::Unknown;

}  // namespace

TEST(Signing, AboveMidIsBuyer) {
  auto tape = build({{0, 99.5, 100.5}}, {{1, 100.5, U}});
  auto r = mi::sign_trades(tape, "X");
  EXPECT_EQ(r.trades[0].initiator, mi::Side::Buyer);
  EXPECT_TRUE(r.trades[0].inferred);
  EXPECT_EQ(r.rules[0], mi::SigningRule::QuoteRule);
}

TEST(Signing, MidpointUsesTickTest) {
  auto tape = build({{0, 99.5, 100.5}}, {{1, 99.0, mi::Aggressor::Seller}, {2, 99.5, U}, {3, 100.0, U}});
  auto r = mi::sign_trades(tape, "X");
  EXPECT_EQ(r.trades[2].initiator, mi::Side::Buyer);
  EXPECT_EQ(r.rules[2], mi::SigningRule::TickTest);
  EXPECT_EQ(r.tick_tests, 1u);
}

TEST(Signing, FlaggedTradesPassThrough) {
  auto tape = build({{0, 99.5, 100.5}}, {{1, 105.0, mi::Aggressor::Seller}, {2, 95.0, mi::Aggressor::Buyer}});
  auto r = mi::sign_trades(tape, "X");
  EXPECT_EQ(r.trades[0].initiator, mi::Side::Seller);
  EXPECT_FALSE(r.trades[0].inferred);
  EXPECT_EQ(r.trades[1].initiator, mi::Side::Buyer);
  EXPECT_EQ(r.inferred, 0u);
}

TEST(Signing, ZeroTickWithoutHistoryFallsBackToBuyer) {
  auto tape = build({{5, 99, 101}}, {{1, 100, U}, {2, 100, U}, {6, 100, U}});
  auto r = mi::sign_trades(tape, "X");
  for (const auto& s : r.trades) EXPECT_EQ(s.initiator, mi::Side::Buyer);
  EXPECT_EQ(r.unclassifiable, 3u);
  EXPECT_EQ(r.rules[2], mi::SigningRule::Fallback);
}

TEST(Signing, LookupDelayUsesEarlierQuote) {
  auto tape = build({{0, 99, 101}, {100, 101, 103}}, {{100, 101.5, U}});
  mi::SigningOptions delayed;
  delayed.lr_delay_ns = 50;
  EXPECT_EQ(mi::sign_trades(tape, "X").trades[0].initiator, mi::Side::Seller);
  EXPECT_EQ(mi::sign_trades(tape, "X", delayed).trades[0].initiator, mi::Side::Buyer);
}

// Reflecting prices about a constant flips every inferred initiator.
TEST(SigningProperty, MirrorSymmetry) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const double c = 100.0;
    std::vector<std::tuple<mi::Nanos, double, double>> quotes;
    std::vector<std::tuple<mi::Nanos, double, double>> mirrored_quotes;
    std::vector<Row> trades;
    std::vector<Row> mirrored;
    mi::Nanos t = 10;
    for (int k = 0; k < 40; ++k) {
      t += 1 + static_cast<mi::Nanos>(rng() % 3);
      if (rng() % 4 == 0) {
        // Prices on a 1/8 grid keep reflections exact in binary.
        const double bid = 99.0 + static_cast<double>(rng() % 8) / 8.0;
        const double ask = bid + static_cast<double>(1 + rng() % 4) / 8.0;
        quotes.emplace_back(t, bid, ask);
        mirrored_quotes.emplace_back(t, 2 * c - ask, 2 * c - bid);
      }
      const double p = 98.5 + static_cast<double>(rng() % 24) / 8.0;
      const auto flag = std::array{mi::Aggressor::Buyer, mi::Aggressor::Seller, U, U}[rng() % 4];
      trades.push_back({t, p, flag});
      const auto swapped = flag == mi::Aggressor::Buyer    ? mi::Aggressor::Seller
                           : flag == mi::Aggressor::Seller ? mi::Aggressor::Buyer
                                                           : U;
      mirrored.push_back({t, 2 * c - p, swapped});
    }
    const auto a = mi::sign_trades(build(quotes, trades), "X");
    const auto b = mi::sign_trades(build(mirrored_quotes, mirrored), "X");
    for (std::size_t i = 0; i < trades.size(); ++i) {
      if (a.rules[i] == mi::SigningRule::Fallback) continue;  // the fallback is not symmetric by design
      EXPECT_NE(a.trades[i].initiator, b.trades[i].initiator) << "trial " << trial << " trade " << i;
      EXPECT_EQ(a.trades[i].inferred, b.trades[i].inferred);
    }
  }
}

TEST(SigningProperty, OffMidTapesNeverUseTickTest) {
  std::mt19937_64 rng(8);
  std::vector<std::tuple<mi::Nanos, double, double>> quotes{{0, 99.0, 101.0}};
  std::vector<Row> trades;
  for (int k = 1; k <= 500; ++k) {
    const double offset = 0.01 + static_cast<double>(rng() % 100) / 100.0;
    trades.push_back({k, rng() % 2 ? 100.0 + offset : 100.0 - offset, U});
  }
  const auto r = mi::sign_trades(build(quotes, trades), "X");
  EXPECT_EQ(r.tick_tests, 0u);
  EXPECT_EQ(r.unclassifiable, 0u);
}

TEST(SigningProperty, Deterministic) {
  std::vector<Row> trades;
  for (int k = 1; k <= 100; ++k) trades.push_back({k, 99.0 + (k * 7 % 11) / 5.0, k % 3 ? U : mi::Aggressor::Buyer});
  const auto tape = build({{0, 99.5, 100.5}, {50, 100, 101}}, trades);
  const auto a = mi::sign_trades(tape, "X");
  const auto b = mi::sign_trades(tape, "X");
  for (std::size_t i = 0; i < trades.size(); ++i) EXPECT_EQ(a.trades[i].initiator, b.trades[i].initiator);
}

TEST(Signing, SignedTradesCsvAppendsColumns) {
  auto tape = build({{0, 99.5, 100.5}}, {{1, 100.5, U}, {2, 99.0, mi::Aggressor::Seller}});
  const auto csv = mi::signed_trades_csv(tape, {mi::sign_trades(tape, "X")});
  EXPECT_EQ(csv, std::string(mi::kSignedTradesHeader) + "\n1,X,100.5,10,A,B,U,B,1\n2,X,99,10,A,B,S,S,0\n");
}

TEST(Signing, HandLabeledFixtureAgreesEverywhere) {
  const auto labels = testing_support::lee_ready_labels();
  ASSERT_EQ(labels.size(), 50u);
  std::map<std::string, int> branches;
  for (const auto& c : labels) ++branches[c.branch];
  for (const char* b : {"above_mid", "below_mid", "at_mid_tick", "no_quote_tick", "flag", "fallback"}) {
    EXPECT_GT(branches[b], 0) << b;
  }
  const auto outcome = testing_support::run_lee_ready();
  EXPECT_EQ(outcome.side_agree, outcome.total);
  EXPECT_EQ(outcome.branch_agree, outcome.total);
  for (const auto& d : outcome.disagreements) ADD_FAILURE() << d;
}
