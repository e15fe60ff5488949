#pragma once

#include <optional>
#include <string>
#include <vector>

namespace dysalign {

// Inclusive frame range [first, last], 0-based.
struct FrameSpan {
  int first = 0;
  int last = 0;

  int length() const { return last - first + 1; }
  friend bool operator==(const FrameSpan&, const FrameSpan&) = default;
};

// Text-position -> speech-frame mapping. Empty spans mark text tokens absent
// from the speech.
struct Alignment {
  int frames = 0;
  std::vector<std::optional<FrameSpan>> spans;

  // Describes the first violated constraint, or nullopt when the alignment
  // is monotonic: spans inside [0, frames), first <= last, and every later
  // non-empty span starts and ends strictly after the previous one ends.
  std::optional<std::string> violation() const;
  bool valid() const { return !violation().has_value(); }

  // Text index owning each frame, -1 for unaligned frames.
  std::vector<int> frame_owner() const;

  friend bool operator==(const Alignment&, const Alignment&) = default;
};

}  // namespace dysalign
