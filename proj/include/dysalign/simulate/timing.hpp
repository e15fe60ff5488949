#pragma once

#include <cstdint>
#include <vector>

#include "dysalign/core/annotation.hpp"
#include "dysalign/core/time.hpp"
#include "dysalign/simulate/inject.hpp"

namespace dysalign::simulate {

// Base durations in frames. Each token gets base + U{-jitter..jitter}
// (at least one frame), multiplied by its duration scale and rounded.
struct DurationModel {
  std::int64_t vowel_frames = 6;
  std::int64_t consonant_frames = 4;
  std::int64_t silence_frames = 5;
  std::int64_t jitter = 1;

  static DurationModel uniform(std::int64_t frames) { return {frames, frames, frames, 0}; }
};

// Contiguous spans starting at frame 0. One jitter draw per token, in order,
// whatever the token.
TimedTokenSequence synth_timed(const Utterance& utt, const DurationModel& model, Rng& rng);

// One annotation per event, sorted by start frame (ties keep event order).
std::vector<DysfluencyAnnotation> annotate(const Utterance& utt, const TimedTokenSequence& timed);

}  // namespace dysalign::simulate
