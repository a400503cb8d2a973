#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "metaimpact/config.hpp"
#include "metaimpact/impact.hpp"
#include "metaimpact/tape.hpp"

namespace metaimpact {

enum class ReversionMode : std::uint8_t { None, ToVwap };

/// Parameters of the synthetic market. Each stock has a few dedicated
/// brokers that execute the embedded orders; everybody else trades at
/// random. Between orders a broker keeps a thin stream of small background
/// trades, and no broker trades outside its orders while any order in the
/// stock is running.
struct SynthConfig {
  std::uint64_t seed = 1;
  std::size_t n_stocks = 10;
  std::size_t n_sessions = 250;
  std::string start_date = "2023-01-02";  // first session; weekends skipped
  double open_seconds = 28800.0;          // session open, seconds after UTC midnight
  double session_seconds = 30600.0;
  double trade_rate = 0.0131;  // background trades per second, per stock
  std::size_t n_members = 400;  // non-broker member codes
  std::size_t brokers_per_stock = 2;

  std::size_t n_orders = 500;
  double size_tail = 1.5;  // Pareto exponent of the child-trade count
  std::size_t size_min = 10;
  std::size_t size_max = 400;
  double alpha = 0.2;          // target participation rate
  double alpha_spread = 0.25;  // per-order alpha uniform in alpha*(1 -+ spread)
  double fmo_high_weight = 0.4;  // share of orders with f_mo in [0.8, 1]
  double fmo_low_weight = 0.3;   // share with f_mo in [0, 0.2]; the rest in (0.2, 0.8)

  double impact_A = 1.0;
  double impact_beta = 0.5;
  double impact_gamma = 0.0;  // peak impact scales as A * N^gamma
  ReversionMode reversion = ReversionMode::None;

  double sigma = 0.0002;  // per-trade log-midprice noise
  double spread = 0.002;  // relative bid-ask spread
  double u_shape = 0.0;   // intraday trade-size multiplier 1 + k (12 (u - 1/2)^2 - 1)
  double shares_mean = 500.0;
  double size_sigma = 0.2;  // lognormal dispersion of trade sizes
  double broker_background_per_session = 4.0;
  double broker_size_scale = 0.05;
  double unknown_flag_fraction = 0.05;
  double market_drift = 0.0;  // common log drift per trading day
  double market_vol = 0.0;    // common log volatility per sqrt trading day
  double index_interval_seconds = 60.0;

  /// Throws PreconditionError for infeasible settings (including alpha >= 1).
  void validate() const;
  void bind(ParamTable& table, const std::string& prefix = "");
};

struct TrueOrder {
  std::size_t order_id = 0;
  std::string stock;
  std::string member;
  int epsilon = 0;
  std::size_t first_idx = 0;
  std::size_t last_idx = 0;
  std::size_t N = 0;
  double V = 0.0;
  double T_seconds = 0.0;
  double f_mo = 0.0;
  double alpha = 0.0;
};

struct SynthMarket {
  Tape tape;
  std::vector<TrueOrder> truth;  // by stock, then first_idx
  std::vector<IndexPoint> index;
};

/// Deterministic in the config.
SynthMarket generate(const SynthConfig& config);

inline constexpr std::string_view kGroundTruthHeader =
    "order_id,stock,member,epsilon,first_idx,last_idx,N,V,T_seconds,f_mo,alpha";

std::string ground_truth_csv(const std::vector<TrueOrder>& truth);
std::vector<TrueOrder> read_ground_truth(const std::filesystem::path& path);
std::string index_csv(const std::vector<IndexPoint>& index);

/// Writes trades.csv, quotes.csv, calendar.csv, index.csv and ground_truth.csv.
void write_market(const SynthMarket& market, const std::filesystem::path& dir);

/// Weekday dates starting at `start` (YYYY-MM-DD).
std::vector<std::string> weekday_dates(const std::string& start, std::size_t count);

}  // namespace metaimpact
