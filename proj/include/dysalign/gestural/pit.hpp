#pragma once

#include <vector>

#include "dysalign/gestural/kmeans.hpp"
#include "dysalign/gestural/scores.hpp"
#include "dysalign/grad/parameter.hpp"

namespace dysalign::gestural {

// X_REC(d, t) = sum_k sum_s G[s][d][k] H[k][t - s]; kernels running past the
// last frame are truncated. Returned row-major channels x T.
std::vector<double> pit_reconstruct(const GesturalScores& h, const GestureDictionary& g);

double pit_loss(const GesturalScores& h, const GestureDictionary& g, const FeatureMatrix& x);

// Differentiable version over dense H (K x T, zero() entries skipped).
grad::Var pit_loss(grad::Session& s, const std::vector<std::vector<grad::Var>>& h, const GestureDictionary& g,
                   const FeatureMatrix& x);

}  // namespace dysalign::gestural
