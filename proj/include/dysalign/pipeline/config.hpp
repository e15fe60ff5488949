#pragma once

#include <filesystem>
#include <string>

#include "dysalign/align/losses.hpp"
#include "dysalign/grad/optim.hpp"
#include "dysalign/simulate/corpus.hpp"

namespace dysalign::pipeline {

struct TrainConfig {
  int steps = 200;
  int batch_size = 4;
  // Gestural losses (KL, FLOW, PIT) see a crop of this many frames.
  int gestural_frames = 40;
  int fcsa_hidden = 4;
  int flow_hidden = 16;
  align::ConsistencyMode consistency = align::ConsistencyMode::Contrastive;
  bool pre_matched_cells_only = false;
  // When false the pre-alignment loss trains the transition model and the
  // aligner networks only; emissions enter it as constants.
  bool pre_updates_emissions = false;
  // Noise scale for the sampled token embeddings during training.
  double embedding_noise = 1.0;
};

struct DetectConfig {
  // Interior silences shorter than this are ignored.
  int min_block_frames = 3;
  // A matched phoneme longer than base + jitter + slack frames is prolonged.
  int prolong_slack = 0;
  // Runs shorter than this many frames are merged into a neighbour.
  int min_segment_frames = 2;
};

struct RunConfig {
  std::uint64_t seed = 0;
  align::Lambdas lambdas = align::kDefaultLambdas;
  double temperature = 2.0;
  double sigma_min = 0.01;
  int gestures = 40;
  int token_dim = 64;
  int articulatory_dim = 12;
  grad::LearningRateSchedule learning_rate;
  double alignment_threshold = 0.5;
  int pit_window = 10;  // 200 ms
  TrainConfig train;
  DetectConfig detect;
  simulate::SimulationConfig simulate;
  std::string lexicon;  // optional pronunciation table

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Missing fields keep their defaults; unknown fields are rejected.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const RunConfig& config);

}  // namespace dysalign::pipeline
