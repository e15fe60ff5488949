#pragma once

#include <optional>
#include <vector>

#include "dysalign/core/annotation.hpp"

namespace dysalign::metrics {

struct Counts {
  double tp = 0;
  double fp = 0;
  double fn = 0;

  Counts& operator+=(const Counts& o);
  // 2tp / (2tp + fp + fn); 1 when all counts are zero.
  double f1() const;
  double precision() const;
  double recall() const;
};

// Micro-averaged F1 over frames. With `ignore`, frames where both sides carry
// that label drop out; a frame where only one side carries it counts only as
// a miss (ref) or a false alarm (hyp). Throws ShapeError on length mismatch.
Counts framewise_counts(const std::vector<int>& ref, const std::vector<int>& hyp,
                        std::optional<int> ignore = std::nullopt);
double framewise_f1(const std::vector<int>& ref, const std::vector<int>& hyp,
                    std::optional<int> ignore = std::nullopt);

// Detection F1 on dysfluency types alone: per type, min(#pred, #gt) hits.
Counts type_counts(const std::vector<DysfluencyAnnotation>& pred, const std::vector<DysfluencyAnnotation>& gt);

}  // namespace dysalign::metrics
