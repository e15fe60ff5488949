#include "dysalign/core/alignment.hpp"

namespace dysalign {

std::optional<std::string> Alignment::violation() const {
  const FrameSpan* prev = nullptr;
  std::size_t prev_index = 0;
  for (std::size_t j = 0; j < spans.size(); ++j) {
    if (!spans[j]) continue;
    const FrameSpan& s = *spans[j];
    const std::string where = "span " + std::to_string(j);
    if (s.first < 0 || s.last >= frames) return where + " lies outside [0, " + std::to_string(frames) + ")";
    if (s.first > s.last) return where + " has start after end";
    if (prev) {
      const std::string pair = " (after span " + std::to_string(prev_index) + ")";
      if (prev->last > s.first) return where + " starts before its predecessor ends" + pair;
      if (!(prev->first < s.first)) return where + " does not start strictly later" + pair;
      if (!(prev->last < s.last)) return where + " does not end strictly later" + pair;
      if (prev->last == s.first) return where + " shares a frame with its predecessor" + pair;
    }
    prev = &s;
    prev_index = j;
  }
  return std::nullopt;
}

std::vector<int> Alignment::frame_owner() const {
  std::vector<int> owner(static_cast<std::size_t>(frames), -1);
  for (std::size_t j = 0; j < spans.size(); ++j) {
    if (!spans[j]) continue;
    for (int f = spans[j]->first; f <= spans[j]->last; ++f)
      if (f >= 0 && f < frames) owner[f] = static_cast<int>(j);
  }
  return owner;
}

}  // namespace dysalign
