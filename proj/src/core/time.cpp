#include "dysalign/core/time.hpp"

#include <cmath>
#include <string>

#include "dysalign/core/error.hpp"

namespace dysalign {

double frames_to_seconds(std::int64_t frame) {
  return static_cast<double>(frame) / static_cast<double>(kFramesPerSecond);
}

std::int64_t seconds_to_frames(double seconds) {
  if (!std::isfinite(seconds)) throw InvalidArgument("non-finite time value");
  return std::llround(seconds * kFramesPerSecond);
}

TimedTokenSequence::TimedTokenSequence(std::vector<TimedToken> tokens) : tokens_(std::move(tokens)) {
  std::int64_t cursor = 0;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const TimedToken& t = tokens_[i];
    if (t.start < 0 || t.end < t.start)
      throw InvalidArgument("token " + std::to_string(i) + " has invalid span");
    if (t.start < cursor) throw InvalidArgument("token " + std::to_string(i) + " overlaps its predecessor");
    cursor = t.end;
  }
}

std::int64_t TimedTokenSequence::total_frames() const { return tokens_.empty() ? 0 : tokens_.back().end; }

std::vector<int> TimedTokenSequence::symbols() const {
  std::vector<int> out;
  out.reserve(tokens_.size());
  for (const auto& t : tokens_) out.push_back(t.symbol);
  return out;
}

std::vector<int> TimedTokenSequence::frame_labels(int gap) const {
  std::vector<int> labels(static_cast<std::size_t>(total_frames()), gap);
  for (const auto& t : tokens_)
    for (std::int64_t f = t.start; f < t.end; ++f) labels[static_cast<std::size_t>(f)] = t.symbol;
  return labels;
}

}  // namespace dysalign
