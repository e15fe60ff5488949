#pragma once

#include <span>

#include "dysalign/align/grid.hpp"

namespace dysalign::align {

// -log p(target | Y) for log-probabilities over the alphabet (T x V), with
// `blank` the blank column. Throws InvalidArgument when T frames cannot hold
// the target (its length plus one blank between equal neighbours).
grad::Var ctc_loss(grad::Tape& t, const VarGrid& log_probs, std::span<const int> target, int blank);

// Minimum frames needed to emit `target` under CTC.
int ctc_min_frames(std::span<const int> target);

}  // namespace dysalign::align
