#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "dysalign/grad/optim.hpp"
#include "dysalign/pipeline/dataset.hpp"
#include "dysalign/pipeline/model.hpp"

namespace dysalign::pipeline {

// Loss components in final-loss order (KL, FLOW, PRE, POST, CON, PIT); a
// component is absent when the utterance cannot supply it.
using Components = std::array<std::optional<double>, 6>;

struct UtteranceLoss {
  Components components;
  double total = 0.0;
};

// Fits the gesture dictionary by k-means over articulatory windows.
void fit_dictionary(Model& model, const std::vector<Utterance>& data, std::uint64_t seed);

// Forward pass over one utterance; with `weight` set, also backpropagates
// weight * total into the parameter grads. `workspace` is reset first.
UtteranceLoss utterance_loss(grad::Session& workspace, Model& model, const RunConfig& config, const Utterance& u, std::mt19937_64& rng,
                             std::optional<double> weight);

// Mean of lambda_PRE * L_PRE + lambda_POST * L_POST over `data`, with noise
// and k-samples fixed by `seed`.
double alignment_objective(Model& model, const RunConfig& config, const std::vector<Utterance>& data,
                           std::uint64_t seed);

struct StepReport {
  int step = 0;
  double loss = 0.0;  // mean total over the batch
  double learning_rate = 0.0;
};

class Trainer {
 public:
  Trainer(Model& model, const RunConfig& config);

  // One Adam update on a batch drawn from `data` by (seed, step).
  StepReport step(const std::vector<Utterance>& data);
  int steps_done() const { return step_; }

 private:
  Model& model_;
  RunConfig config_;
  grad::Adam adam_;
  std::vector<grad::Parameter*> params_;
  grad::Session workspace_;
  int step_ = 0;
};

// Fits the dictionary, then runs config.train.steps updates.
std::vector<StepReport> train(Model& model, const RunConfig& config, const std::vector<Utterance>& data,
                              const std::function<void(const StepReport&)>& progress = {});

}  // namespace dysalign::pipeline
