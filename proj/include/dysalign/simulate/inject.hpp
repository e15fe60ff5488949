#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dysalign/core/annotation.hpp"
#include "dysalign/simulate/lexicon.hpp"

namespace dysalign::simulate {

using Rng = std::mt19937_64;

struct SimToken {
  int phoneme = 0;
  int word = -1;                  // -1 for edge silence
  double duration_scale = 1.0;
  std::int64_t fixed_frames = 0;  // > 0 bypasses the duration model
};

struct InjectedEvent {
  DysfluencyType type = DysfluencyType::Repetition;
  int word = -1;
  // Mutated tokens are [position, position + length). For Missing these are
  // the phoneme before the gap and, within the same word, the one after it.
  std::size_t position = 0;
  std::size_t length = 0;
  int original = -1;    // phoneme removed (Missing) or replaced (Replacement)
  double factor = 1.0;  // Prolongation
};

// Token sequence plus the events injected so far. Event positions are kept
// up to date as later edits insert or delete tokens.
struct Utterance {
  const PhonemeAlphabet* alphabet = &PhonemeAlphabet::cmu();
  std::vector<std::string> words;
  std::vector<SimToken> tokens;
  std::vector<InjectedEvent> events;

  std::vector<int> phonemes() const;
  // Token range an annotation should cover.
  std::pair<std::size_t, std::size_t> region(const InjectedEvent& e) const;
  bool tagged(std::size_t token) const;
};

// Fluent utterance, optionally framed by one SIL token on each side.
Utterance make_utterance(const std::vector<LexWord>& words, const PhonemeAlphabet& alphabet,
                         bool edge_silence = true);

struct InjectOptions {
  std::optional<int> cluster{};                // Repetition: phonemes copied (1-2)
  std::optional<int> repeats{};                // Repetition: copies (1-2)
  std::optional<std::int64_t> block_frames{};  // Block: SIL length
  std::optional<int> phoneme{};                // Replacement/Insertion: new symbol
  std::optional<double> factor{};              // Prolongation
};

struct InjectLimits {
  std::int64_t block_min_frames = 10;  // 0.2 s
  std::int64_t block_max_frames = 25;  // 0.5 s
  double prolong_min = 2.0;
  double prolong_max = 4.0;
  int max_repeats = 2;
};

// Throws InvalidArgument if the type cannot be applied at `position`.
//   Repetition    copies tokens [position, position+cluster) in front of themselves
//   Block         inserts SIL before `position`
//   Missing       deletes a non-initial phoneme
//   Replacement   swaps in a confusable phoneme
//   Prolongation  scales the token's duration
//   Insertion     inserts a phoneme before `position`
const InjectedEvent& inject(Utterance& utt, DysfluencyType type, std::size_t position, Rng& rng,
                            const InjectOptions& options = {}, const InjectLimits& limits = {});

// Undoes the most recent event. Applying it after every inject recovers the
// fluent sequence.
void revert_last(Utterance& utt);

// Positions where `type` may be injected without touching tokens owned by an
// earlier event. Repetition candidates are word-initial with a two-phoneme
// cluster available.
std::vector<std::size_t> candidate_positions(const Utterance& utt, DysfluencyType type);

}  // namespace dysalign::simulate
