#include "metaimpact/score.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace metaimpact {

namespace {

/// Sorted trade indices of each member in one stock.
class MemberTrades {
 public:
  MemberTrades(const Tape& tape, const StockTape& stock) {
    for (std::size_t i = 0; i < stock.trades.size(); ++i) {
      const auto& t = stock.trades[i];
      by_member_[tape.members().name(t.buyer)].push_back(i);
      if (t.seller != t.buyer) by_member_[tape.members().name(t.seller)].push_back(i);
    }
  }

  [[nodiscard]] std::size_t count(const std::string& member, std::size_t first, std::size_t last) const {
    const auto it = by_member_.find(member);
    if (it == by_member_.end() || last < first) return 0;
    const auto& v = it->second;
    return static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), last) -
                                    std::lower_bound(v.begin(), v.end(), first));
  }

  [[nodiscard]] double jaccard(const std::string& member, std::size_t a0, std::size_t a1, std::size_t b0,
                               std::size_t b1) const {
    const std::size_t lo = std::max(a0, b0);
    const std::size_t hi = std::min(a1, b1);
    if (hi < lo) return 0.0;
    const std::size_t inter = count(member, lo, hi);
    const std::size_t uni = count(member, std::min(a0, b0), std::max(a1, b1));
    if (uni == 0) {
      // Member absent from the tape: fall back to plain interval overlap.
      return static_cast<double>(hi - lo + 1) /
             static_cast<double>(std::max(a1, b1) - std::min(a0, b0) + 1);
    }
    return static_cast<double>(inter) / static_cast<double>(uni);
  }

 private:
  std::map<std::string, std::vector<std::size_t>, std::less<>> by_member_;
};

}  // namespace

double member_jaccard(const Tape& tape, const std::string& stock, const std::string& member, std::size_t a_first,
                      std::size_t a_last, std::size_t b_first, std::size_t b_last) {
  return MemberTrades(tape, tape.stock(stock)).jaccard(member, a_first, a_last, b_first, b_last);
}

DetectionScore score_detection(std::span<const TrueOrder> truth, std::span<const HiddenOrder> detected,
                               const Tape& tape, const ScoreParams& params) {
  DetectionScore score;
  score.n_true = truth.size();
  score.n_detected = detected.size();
  score.min_jaccard = params.min_jaccard;

  using Key = std::pair<std::string, std::string>;
  std::map<Key, std::vector<std::size_t>> true_by_key;
  std::map<Key, std::vector<std::size_t>> det_by_key;
  for (std::size_t i = 0; i < truth.size(); ++i) true_by_key[{truth[i].stock, truth[i].member}].push_back(i);
  for (std::size_t j = 0; j < detected.size(); ++j) det_by_key[{detected[j].stock, detected[j].member}].push_back(j);

  struct Candidate {
    double jaccard;
    std::size_t t;
    std::size_t d;
  };
  std::vector<Candidate> candidates;
  std::map<std::string, MemberTrades> cache;
  for (const auto& [key, ts] : true_by_key) {
    const auto dit = det_by_key.find(key);
    if (dit == det_by_key.end()) continue;
    const auto sidx = tape.find_stock(key.first);
    if (!sidx) continue;
    auto cit = cache.find(key.first);
    if (cit == cache.end()) cit = cache.emplace(key.first, MemberTrades(tape, tape.stocks()[*sidx])).first;
    for (auto t : ts) {
      for (auto d : dit->second) {
        const double j = cit->second.jaccard(key.second, truth[t].first_idx, truth[t].last_idx,
                                             detected[d].first_idx, detected[d].last_idx);
        if (j >= params.min_jaccard) candidates.push_back({j, t, d});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(b.jaccard, a.t, a.d) < std::tie(a.jaccard, b.t, b.d);
  });

  std::vector<char> t_used(truth.size(), 0);
  std::vector<char> d_used(detected.size(), 0);
  double start_sum = 0.0;
  double end_sum = 0.0;
  for (const auto& c : candidates) {
    if (t_used[c.t] || d_used[c.d]) continue;
    t_used[c.t] = d_used[c.d] = 1;
    ++score.matched;
    start_sum += std::abs(static_cast<double>(truth[c.t].first_idx) - static_cast<double>(detected[c.d].first_idx));
    end_sum += std::abs(static_cast<double>(truth[c.t].last_idx) - static_cast<double>(detected[c.d].last_idx));
  }
  const auto m = static_cast<double>(score.matched);
  if (score.n_detected > 0) score.precision = m / static_cast<double>(score.n_detected);
  if (score.n_true > 0) score.recall = m / static_cast<double>(score.n_true);
  if (score.matched > 0) {
    score.start_error = start_sum / m;
    score.end_error = end_sum / m;
    score.boundary_error = 0.5 * (start_sum + end_sum) / m;
  }
  return score;
}

}  // namespace metaimpact
