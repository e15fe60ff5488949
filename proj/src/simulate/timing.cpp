#include "dysalign/simulate/timing.hpp"

#include <algorithm>
#include <cmath>

#include "dysalign/core/error.hpp"

namespace dysalign::simulate {

TimedTokenSequence synth_timed(const Utterance& utt, const DurationModel& model, Rng& rng) {
  if (model.vowel_frames < 1 || model.consonant_frames < 1 || model.silence_frames < 1 || model.jitter < 0)
    throw InvalidArgument("duration model needs positive base durations");
  std::uniform_int_distribution<std::int64_t> jitter(-model.jitter, model.jitter);
  std::vector<TimedToken> out;
  out.reserve(utt.tokens.size());
  std::int64_t t = 0;
  for (const auto& tok : utt.tokens) {
    const std::int64_t j = jitter(rng);
    std::int64_t frames;
    if (tok.fixed_frames > 0) {
      frames = tok.fixed_frames;
    } else {
      std::int64_t base = model.consonant_frames;
      if (tok.phoneme == utt.alphabet->silence())
        base = model.silence_frames;
      else if (utt.alphabet->is_vowel(tok.phoneme))
        base = model.vowel_frames;
      if (!(tok.duration_scale > 0)) throw InvalidArgument("duration scale must be positive");
      frames = std::llround(static_cast<double>(std::max<std::int64_t>(1, base + j)) * tok.duration_scale);
      frames = std::max<std::int64_t>(1, frames);
    }
    out.push_back({tok.phoneme, t, t + frames});
    t += frames;
  }
  return TimedTokenSequence(std::move(out));
}

std::vector<DysfluencyAnnotation> annotate(const Utterance& utt, const TimedTokenSequence& timed) {
  if (timed.size() != utt.tokens.size()) throw ShapeError("timed sequence does not match the utterance");
  std::vector<DysfluencyAnnotation> out;
  for (const auto& e : utt.events) {
    const auto [a, b] = utt.region(e);
    DysfluencyAnnotation ann;
    ann.word = utt.words.at(static_cast<std::size_t>(e.word));
    ann.type = e.type;
    ann.start = timed[a].start;
    ann.end = timed[b - 1].end;
    out.push_back(ann);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.start < y.start; });
  return out;
}

}  // namespace dysalign::simulate
