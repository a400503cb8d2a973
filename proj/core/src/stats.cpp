#include "metaimpact/stats.hpp"

#include <algorithm>
#include <cmath>

#include "metaimpact/errors.hpp"

namespace metaimpact::stats {

void Accumulator::add(double x) noexcept {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

void Accumulator::merge(const Accumulator& o) noexcept {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double n = static_cast<double>(n_ + o.n_);
  const double d = o.mean_ - mean_;
  mean_ += d * static_cast<double>(o.n_) / n;
  m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
  n_ += o.n_;
}

double Accumulator::variance() const noexcept {
  return n_ < 2 ? 0.0 : std::max(0.0, m2_ / static_cast<double>(n_ - 1));
}

MeanSE Accumulator::result() const noexcept {
  MeanSE r;
  r.mean = mean_;
  r.count = n_;
  if (n_ >= 2) r.se = std::sqrt(variance() / static_cast<double>(n_));
  return r;
}

MeanSE mean_se(std::span<const double> xs) {
  MeanSE r;
  r.count = xs.size();
  if (xs.empty()) return r;
  double sum = 0.0;
  for (double x : xs) sum += x;
  r.mean = sum / static_cast<double>(xs.size());
  if (xs.size() >= 2) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return r;
}

LinearFit ols(std::span<const double> x, std::span<const double> y) { return wls(x, y, {}); }

LinearFit wls(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  const std::size_t n = x.size();
  if (n != y.size()) throw PreconditionError("ols: x and y differ in length");
  if (!w.empty() && w.size() != n) throw PreconditionError("ols: weights differ in length");
  if (n < 3) throw PreconditionError("ols: need at least 3 points, have " + std::to_string(n));
  // Weights are normalized to mean 1 so the residual scale matches plain OLS.
  std::vector<double> wn(n, 1.0);
  if (!w.empty()) {
    double total = 0.0;
    for (double v : w) {
      if (!(v > 0.0) || !std::isfinite(v)) throw PreconditionError("ols: weights must be positive");
      total += v;
    }
    for (std::size_t i = 0; i < n; ++i) wn[i] = w[i] * static_cast<double>(n) / total;
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += wn[i] * x[i];
    my += wn[i] * y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += wn[i] * (x[i] - mx) * (x[i] - mx);
    sxy += wn[i] * (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw PreconditionError("ols: x has zero variance");
  LinearFit f;
  f.n = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    rss += wn[i] * r * r;
  }
  const double s2 = rss / static_cast<double>(n - 2);
  f.se_slope = std::sqrt(s2 / sxx);
  f.se_intercept = std::sqrt(s2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
  return f;
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw PreconditionError("quantile of empty sample");
  std::sort(xs.begin(), xs.end());
  const double h = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

std::vector<double> log_bin_edges(double lo, double hi, int per_decade) {
  if (!(lo > 0.0) || !(hi >= lo) || per_decade <= 0) {
    throw PreconditionError("log_bin_edges: need 0 < lo <= hi and per_decade > 0");
  }
  const double step = 1.0 / per_decade;
  auto edge = [step](long k) { return std::pow(10.0, static_cast<double>(k) * step); };
  auto k = static_cast<long>(std::floor(std::log10(lo) * per_decade));
  while (edge(k) > lo) --k;
  while (edge(k + 1) <= lo) ++k;
  std::vector<double> edges{edge(k)};
  while (edges.back() <= hi) {
    ++k;
    edges.push_back(edge(k));
  }
  return edges;
}

}  // namespace metaimpact::stats
