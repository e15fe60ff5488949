#pragma once

#include <cstdint>
#include <vector>

namespace dysalign {

// Frame rate of every time axis in the library (0.02 s per frame).
inline constexpr int kFramesPerSecond = 50;

// Exact for every integer frame: the result is the double nearest to
// frame/50, computed as a single correctly rounded division.
double frames_to_seconds(std::int64_t frame);

// Inverse of frames_to_seconds; rounds to the nearest frame.
std::int64_t seconds_to_frames(double seconds);

// One symbol occupying frames [start, end).
struct TimedToken {
  int symbol = 0;
  std::int64_t start = 0;
  std::int64_t end = 0;

  std::int64_t frames() const { return end - start; }
  double start_seconds() const { return frames_to_seconds(start); }
  double end_seconds() const { return frames_to_seconds(end); }

  friend bool operator==(const TimedToken&, const TimedToken&) = default;
};

// Sorted, non-overlapping timed tokens.
class TimedTokenSequence {
 public:
  TimedTokenSequence() = default;
  // Throws InvalidArgument when tokens are unsorted, overlap, or have
  // negative/inverted times.
  explicit TimedTokenSequence(std::vector<TimedToken> tokens);

  const std::vector<TimedToken>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const TimedToken& operator[](std::size_t i) const { return tokens_[i]; }

  // End frame of the last token (0 when empty).
  std::int64_t total_frames() const;
  std::vector<int> symbols() const;
  // One label per frame in [0, total_frames()); gaps are filled with `gap`.
  std::vector<int> frame_labels(int gap) const;

  friend bool operator==(const TimedTokenSequence&, const TimedTokenSequence&) = default;

 private:
  std::vector<TimedToken> tokens_;
};

}  // namespace dysalign
