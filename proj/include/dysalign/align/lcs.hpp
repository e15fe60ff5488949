#pragma once

#include <optional>
#include <vector>

#include "dysalign/align/grid.hpp"
#include "dysalign/core/alignment.hpp"

namespace dysalign::align {

struct LcsAlignment {
  std::vector<std::optional<int>> frame_token;  // token matched by each frame
  Alignment spans;  // matches closed over the unmatched frames preceding them
};

// Subsequence DP with the match test y[i][j] * transition[j] > threshold,
// transition[j] = phi(C_j | C_{j-1}) and transition[0] ignored (1). The
// backtrack walks from (T, L) taking a match whenever the test holds.
LcsAlignment sample_alignment(const Grid& y, const std::vector<double>& transition, double threshold);

// Each matched token's span runs from just after the previous match to its
// own frame; unmatched tokens get no span.
Alignment close_spans(const std::vector<std::optional<int>>& frame_token, int tokens);

}  // namespace dysalign::align
