#pragma once

#include <string>
#include <vector>

#include "dysalign/align/grid.hpp"
#include "dysalign/align/lcs.hpp"
#include "dysalign/core/annotation.hpp"
#include "dysalign/core/time.hpp"
#include "dysalign/pipeline/model.hpp"

namespace dysalign::pipeline {

// What the detector needs from an utterance: the text side and tau.
struct DetectorInput {
  std::vector<std::string> words;
  std::vector<int> reference;        // phonemes with edge silences
  std::vector<int> reference_words;  // word index per reference phoneme, -1 for silence
  const FeatureMatrix* features = nullptr;
};

struct Detection {
  TimedTokenSequence decoded;  // merged frame-argmax segments
  std::vector<DysfluencyAnnotation> annotations;  // canonical, sorted by start
};

class Detector {
 public:
  Detector(Model& model, const RunConfig& config);

  // Frame-wise best non-blank symbol under the noise-free embeddings, with
  // runs shorter than min_segment_frames folded into a neighbour.
  TimedTokenSequence decode(const FeatureMatrix& features) const;

  // Rule-based reading of the edit script between reference and decoded
  // segments. Throws InvalidArgument on inconsistent inputs.
  Detection detect(const DetectorInput& in) const;

  // Noise-free emission grid over the reference and its LCS alignment.
  align::Grid emissions(const FeatureMatrix& features, const std::vector<int>& reference) const;
  align::LcsAlignment align(const FeatureMatrix& features, const std::vector<int>& reference) const;

 private:
  Model& model_;
  RunConfig config_;

  std::int64_t typical_frames(int symbol) const;
};

// {"id": ..., "tokens": [{"phoneme", "start", "end"}, ...]}, frames [start, end).
std::string phonemes_to_json(const std::string& id, const TimedTokenSequence& seq, const PhonemeAlphabet& alphabet);
// Throws FormatError on malformed JSON or unknown phonemes.
TimedTokenSequence phonemes_from_json(const std::string& text, const PhonemeAlphabet& alphabet);

// Runs shorter than `min_frames` join the longer neighbouring run (the
// previous one on ties); adjacent equal runs are then fused.
TimedTokenSequence merge_runs(const std::vector<int>& labels, int min_frames);

}  // namespace dysalign::pipeline
