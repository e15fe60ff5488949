#pragma once

#include <span>

#include "dysalign/gestural/encoder.hpp"
#include "dysalign/grad/tape.hpp"

namespace dysalign::gestural {

// KL(q || uniform over n) given log q.
grad::Var categorical_kl_uniform(grad::Tape& t, std::span<const grad::Var> log_probs);

// KL(N(mu, sigma^2) || N(0, 1)) = 0.5 (mu^2 + sigma^2 - 1 - log sigma^2).
grad::Var gaussian_kl_standard(grad::Tape& t, grad::Var mu, grad::Var sigma);

// Count and index posteriors against uniform priors plus every span value
// against N(0, 1).
grad::Var kl_loss(grad::Tape& t, const EncodedScores& enc);

double categorical_kl_uniform(std::span<const double> probs);
double gaussian_kl_standard(double mu, double sigma);

}  // namespace dysalign::gestural
