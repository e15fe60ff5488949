#pragma once

#include <span>
#include <vector>

#include "dysalign/grad/tape.hpp"

namespace dysalign::gestural {

struct GumbelSample {
  std::vector<grad::Var> soft;
  std::vector<grad::Var> log_probs;  // log softmax(logits), the posterior
  int hard = 0;
};

// soft = softmax((log pi + g) / temperature), g = -log(-log u); hard is the
// argmax of log pi + g. `uniforms` must lie in (0, 1).
GumbelSample gumbel_categorical_sample(grad::Tape& t, std::span<const grad::Var> logits, double temperature,
                                       std::span<const double> uniforms);

struct GumbelDraw {
  std::vector<double> soft;
  int hard = 0;
};

GumbelDraw gumbel_categorical_sample(std::span<const double> logits, double temperature,
                                     std::span<const double> uniforms);

}  // namespace dysalign::gestural
