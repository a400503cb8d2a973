#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace metaimpact::stats {

/// Sample mean with standard error s/sqrt(n) (s with n-1 denominator). The
/// standard error is unavailable for n < 2.
struct MeanSE {
  double mean = 0.0;
  std::optional<double> se;
  std::size_t count = 0;
};

/// Streaming accumulator (Welford). merge() is associative up to rounding.
class Accumulator {
 public:
  void add(double x) noexcept;
  void merge(const Accumulator& other) noexcept;
  [[nodiscard]] std::size_t count() const noexcept { return n_; }
  [[nodiscard]] double mean() const noexcept { return mean_; }
  [[nodiscard]] double variance() const noexcept;  // n-1 denominator
  [[nodiscard]] MeanSE result() const noexcept;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

MeanSE mean_se(std::span<const double> xs);

/// y = intercept + slope * x by ordinary least squares.
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double se_intercept = 0.0;
  double se_slope = 0.0;
  std::size_t n = 0;
};

/// Requires >= 3 points and non-constant x (PreconditionError otherwise).
LinearFit ols(std::span<const double> x, std::span<const double> y);
/// Weighted least squares; empty `w` means unit weights.
LinearFit wls(std::span<const double> x, std::span<const double> y, std::span<const double> w);

/// Linear-interpolated quantile of an unsorted sample (type 7), q in [0,1].
double quantile(std::vector<double> xs, double q);

/// Edges 10^(k/per_decade) covering [lo, hi], anchored on the decade grid.
std::vector<double> log_bin_edges(double lo, double hi, int per_decade);

}  // namespace metaimpact::stats
