#include "dysalign/pipeline/model.hpp"

#include <random>

#include "dysalign/core/error.hpp"
#include "dysalign/grad/checkpoint.hpp"

namespace dysalign::pipeline {

namespace {

gestural::EncoderConfig encoder_config(const RunConfig& c) {
  gestural::EncoderConfig e;
  e.gestures = c.gestures;
  e.channels = c.articulatory_dim;
  e.temperature = c.temperature;
  return e;
}

gestural::FlowConfig flow_config(const RunConfig& c) {
  gestural::FlowConfig f;
  f.sigma_min = c.sigma_min;
  f.step_dim = c.gestures;
  f.hidden = c.train.flow_hidden;
  return f;
}

}  // namespace

Model::Model(const RunConfig& c)
    : embeddings(PhonemeAlphabet::cmu().size(), c.token_dim),
      transition(c.token_dim),
      fcsa(c.train.fcsa_hidden),
      encoder(encoder_config(c)),
      flow_config(pipeline::flow_config(c)),
      field(c.gestures, c.token_dim, flow_config),
      alphabet_(&PhonemeAlphabet::cmu()) {
  dictionary.window = c.pit_window;
  dictionary.channels = c.articulatory_dim;
  dictionary.gestures = c.gestures;
  dictionary.g.assign(static_cast<std::size_t>(c.pit_window) * c.articulatory_dim * c.gestures, 0.0);
}

void Model::init(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  embeddings.init(rng);
  transition.init(rng);
  fcsa.init(rng);
  encoder.init(rng);
  field.init(rng);
}

std::vector<grad::Parameter*> Model::parameters() {
  std::vector<grad::Parameter*> out;
  for (auto* p : embeddings.parameters()) out.push_back(p);
  for (auto* p : transition.parameters()) out.push_back(p);
  for (auto* p : fcsa.parameters()) out.push_back(p);
  for (auto* p : encoder.parameters()) out.push_back(p);
  for (auto* p : field.parameters()) out.push_back(p);
  return out;
}

grad::Parameter Model::dictionary_param() const {
  grad::Parameter p("pit.dictionary", static_cast<std::size_t>(dictionary.window) * dictionary.channels,
                    static_cast<std::size_t>(dictionary.gestures));
  p.values = dictionary.g;
  return p;
}

void Model::save(const std::filesystem::path& dir) {
  auto dict = dictionary_param();
  std::vector<const grad::Parameter*> all;
  for (auto* p : parameters()) all.push_back(p);
  all.push_back(&dict);
  grad::save_checkpoint(dir, all);
}

void Model::load(const std::filesystem::path& dir) {
  auto dict = dictionary_param();
  auto all = parameters();
  all.push_back(&dict);
  grad::load_checkpoint(dir, all);
  dictionary.g = dict.values;
}

}  // namespace dysalign::pipeline
