#pragma once

#include <vector>

#include "dysalign/core/annotation.hpp"
#include "dysalign/metrics/f1.hpp"

namespace dysalign::metrics {

// Intersection over union of two events in frames; an event without an end
// covers the single frame at its start.
double iou(const DysfluencyAnnotation& a, const DysfluencyAnnotation& b);

struct MatchedPair {
  std::size_t pred;
  std::size_t gt;
  double iou;
};

struct MatchResult {
  std::vector<MatchedPair> pairs;
  std::vector<std::size_t> unmatched_pred;
  std::vector<std::size_t> unmatched_gt;

  Counts counts() const;
};

// Greedy one-to-one matching of same-type events by descending IoU, keeping
// pairs with IoU > min_iou. Ties go to the lower (pred, gt) index.
MatchResult match_events(const std::vector<DysfluencyAnnotation>& pred, const std::vector<DysfluencyAnnotation>& gt,
                         double min_iou = 0.5);

// Matching score: F1 of the IoU > 0.5 matching. 1 when both lists are empty.
double matching_score(const std::vector<DysfluencyAnnotation>& pred, const std::vector<DysfluencyAnnotation>& gt,
                      MatchResult* result = nullptr);

// Strict detection F1: same type and any temporal overlap.
Counts strict_counts(const std::vector<DysfluencyAnnotation>& pred, const std::vector<DysfluencyAnnotation>& gt);

}  // namespace dysalign::metrics
