#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "dysalign/align/grid.hpp"
#include "dysalign/core/alignment.hpp"
#include "dysalign/core/matrix.hpp"

namespace dysalign::align {

// -mean over cells of alpha beta / y. With a mask, only masked cells count.
grad::Var pre_alignment_loss(grad::Tape& t, const VarGrid& alpha, const VarGrid& beta, const VarGrid& y,
                             const std::vector<bool>* mask = nullptr);

enum class ConsistencyMode { Literal, Contrastive };

struct ConsistencyResult {
  grad::Var loss;
  int skipped = 0;  // terms dropped because every frame belongs to the unit
};

// Sum over units j with a span of the mean over frames f in the span of
//   literal:     exp(s_f) / sum_{i not in span} exp(s_i)
//   contrastive: -log(exp(s_f) / (exp(s_f) + sum_{i not in span} exp(s_i)))
// with s_i = tau_i . C_j. `tau` is D x T; `embeddings` holds L rows of D.
ConsistencyResult consistency_loss(grad::Tape& t, const Alignment& alignment, const FeatureMatrix& tau,
                                   const std::vector<std::vector<grad::Var>>& embeddings, ConsistencyMode mode);

// Order: KL, FLOW, PRE, POST, CON, PIT.
using Lambdas = std::array<double, 6>;
inline constexpr Lambdas kDefaultLambdas = {1, 1, 1, 1, 1, 1};

grad::Var final_loss(grad::Tape& t, const std::array<std::optional<grad::Var>, 6>& components, const Lambdas& lambdas);
double final_loss(const std::array<double, 6>& components, const Lambdas& lambdas);

}  // namespace dysalign::align
