#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dysalign/core/matrix.hpp"
#include "dysalign/simulate/timing.hpp"

namespace dysalign::simulate {

enum class CoDysMode { Fluent, Single, Multi, Mixed };

std::string_view to_string(CoDysMode mode);
CoDysMode parse_codys_mode(std::string_view name);

using Combo = std::pair<DysfluencyType, DysfluencyType>;

// The five type pairs used for multi-type utterances.
inline constexpr std::array<Combo, 5> kCombos = {{
    {DysfluencyType::Repetition, DysfluencyType::Missing},
    {DysfluencyType::Repetition, DysfluencyType::Block},
    {DysfluencyType::Missing, DysfluencyType::Block},
    {DysfluencyType::Replacement, DysfluencyType::Block},
    {DysfluencyType::Prolongation, DysfluencyType::Block},
}};

struct SimulationConfig {
  CoDysMode mode = CoDysMode::Mixed;
  // Mixed: probability an utterance is single-type; the rest are Multi.
  double single_fraction = 0.6;
  // Single: 2 or 3 instances, 3 with this probability.
  double three_instance_prob = 0.85;
  // Single: type draw weights, indexed like kAllDysfluencyTypes.
  std::array<double, 6> type_weights = {1, 1, 1, 1, 1, 0};
  InjectLimits limits;
  DurationModel durations;
  bool edge_silence = true;

  std::uint64_t seed = 0;
  // Seeds the per-phoneme feature tables; independent of `seed` so corpora
  // generated with different seeds share one acoustic space.
  std::uint64_t table_seed = 1234;
  int feature_dim = 64;
  int articulatory_dim = 12;
  double feature_noise = 0.5;
  double articulatory_noise = 0.1;

  // Throws ConfigError on out-of-range values.
  void validate() const;
  // Expected dysfluencies per utterance.
  double expected_count() const;
};

struct CoDysResult {
  TimedTokenSequence timed;
  std::vector<DysfluencyAnnotation> annotations;
};

// Applies a co-dysfluency pattern in place, then times the result with the
// config's duration model. Positions avoid tokens owned by earlier events and
// prefer words not yet touched. Throws InvalidArgument when the utterance is
// too short for the drawn pattern.
CoDysResult co_dysfluency(Utterance& utt, const SimulationConfig& config, Rng& rng);

// Per-phoneme mean vectors, one column per alphabet symbol.
struct FeatureTables {
  FeatureMatrix features;
  FeatureMatrix articulatory;

  static FeatureTables make(const SimulationConfig& config, const PhonemeAlphabet& alphabet);
};

// Table column of each frame's label plus Gaussian noise.
FeatureMatrix render_features(const FeatureMatrix& table, const TimedTokenSequence& timed, int gap, double noise,
                              Rng& rng);

struct SimulatedUtterance {
  std::string id;
  std::string text;
  std::vector<std::string> words;
  std::vector<int> reference;        // fluent phonemes, edge silences included
  std::vector<int> reference_words;  // word index per reference phoneme, -1 for silence
  TimedTokenSequence timed;          // what was "spoken"
  std::vector<int> token_words;
  std::vector<DysfluencyAnnotation> annotations;
  FeatureMatrix features;      // feature_dim x T
  FeatureMatrix articulatory;  // articulatory_dim x T
};

// Deterministic in (config.seed, index).
SimulatedUtterance simulate_utterance(const std::string& text, std::size_t index, const Lexicon& lexicon,
                                      const SimulationConfig& config, const FeatureTables& tables);

std::string utterance_id(std::size_t index);

struct CorpusSummary {
  std::size_t utterances = 0;
  std::size_t annotations = 0;
  std::string digest;  // SHA-256 hex over every written file
};

// Writes utt_XXXX.{features,articulatory}.nafm, .tokens.json and
// .annotations.json per line of `texts`, then manifest.json.
CorpusSummary generate_corpus(const std::vector<std::string>& texts, const Lexicon& lexicon,
                              const SimulationConfig& config, const std::filesystem::path& out, int jobs = 1);

// Non-empty lines of a text file.
std::vector<std::string> read_texts(const std::filesystem::path& path);

// Reads a directory written by generate_corpus, in manifest order.
std::vector<SimulatedUtterance> load_corpus(const std::filesystem::path& dir);

std::string sha256_hex(std::string_view bytes);

}  // namespace dysalign::simulate
