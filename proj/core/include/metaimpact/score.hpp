#pragma once

#include <optional>
#include <span>

#include "metaimpact/segmentation.hpp"
#include "metaimpact/synth.hpp"
#include "metaimpact/tape.hpp"

namespace metaimpact {

struct ScoreParams {
  double min_jaccard = 0.5;
};

/// Precision, recall and boundary errors are empty when undefined.
struct DetectionScore {
  std::size_t n_true = 0;
  std::size_t n_detected = 0;
  std::size_t matched = 0;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> start_error;  // mean |first index offset| over matches
  std::optional<double> end_error;
  std::optional<double> boundary_error;  // mean of the two
  double min_jaccard = 0.5;
};

/// Overlap of two trade-index intervals of the same member, measured over
/// that member's trades in the stock (|A and B| / |A or B|).
double member_jaccard(const Tape& tape, const std::string& stock, const std::string& member, std::size_t a_first,
                      std::size_t a_last, std::size_t b_first, std::size_t b_last);

/// Only orders of the same stock and member can match. Pairs at or above
/// the threshold are matched one-to-one, greedily by decreasing overlap.
DetectionScore score_detection(std::span<const TrueOrder> truth, std::span<const HiddenOrder> detected,
                               const Tape& tape, const ScoreParams& params = {});

}  // namespace metaimpact
