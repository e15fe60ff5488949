#pragma once

#include <filesystem>
#include <vector>

#include "dysalign/align/emission.hpp"
#include "dysalign/core/alphabet.hpp"
#include "dysalign/align/fcsa.hpp"
#include "dysalign/gestural/encoder.hpp"
#include "dysalign/gestural/flow.hpp"
#include "dysalign/gestural/kmeans.hpp"
#include "dysalign/pipeline/config.hpp"

namespace dysalign::pipeline {

// Every trainable piece plus the fixed gesture dictionary.
class Model {
 public:
  explicit Model(const RunConfig& config);

  void init(std::uint64_t seed);
  // Stable order; optimizer state is keyed on it.
  std::vector<grad::Parameter*> parameters();

  void save(const std::filesystem::path& dir);
  // Throws ShapeError when the checkpoint was written for other dimensions.
  void load(const std::filesystem::path& dir);

  const PhonemeAlphabet& alphabet() const { return *alphabet_; }

  align::TokenEmbeddings embeddings;
  align::TransitionModel transition;
  align::FcsaNetworks fcsa;
  gestural::GesturalEncoder encoder;
  gestural::FlowConfig flow_config;
  gestural::DenseVectorField field;
  gestural::GestureDictionary dictionary;

 private:
  const PhonemeAlphabet* alphabet_;
  grad::Parameter dictionary_param() const;
};

}  // namespace dysalign::pipeline
