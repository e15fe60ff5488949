#include "dysalign/gestural/kl.hpp"

#include <cmath>
#include <vector>

#include "dysalign/core/error.hpp"

namespace dysalign::gestural {

grad::Var categorical_kl_uniform(grad::Tape& t, std::span<const grad::Var> log_probs) {
  if (log_probs.empty()) throw InvalidArgument("categorical KL over zero classes");
  std::vector<grad::Var> probs(log_probs.size());
  for (std::size_t c = 0; c < log_probs.size(); ++c) probs[c] = t.exp(log_probs[c]);
  // sum q log q + log n
  return t.shift(t.dot(probs, log_probs), std::log(static_cast<double>(log_probs.size())));
}

grad::Var gaussian_kl_standard(grad::Tape& t, grad::Var mu, grad::Var sigma) {
  const grad::Var var = t.square(sigma);
  const grad::Var inner = t.sub(t.add(t.square(mu), var), t.log(var));
  return t.scale(t.shift(inner, -1.0), 0.5);
}

grad::Var kl_loss(grad::Tape& t, const EncodedScores& enc) {
  std::vector<grad::Var> terms;
  for (const auto& lp : enc.count_log_probs) terms.push_back(categorical_kl_uniform(t, lp));
  for (const auto& lp : enc.index_log_probs) terms.push_back(categorical_kl_uniform(t, lp));
  for (std::size_t i = 0; i < enc.value_mu.size(); ++i)
    terms.push_back(gaussian_kl_standard(t, enc.value_mu[i], enc.value_sigma[i]));
  return t.sum(terms);
}

double categorical_kl_uniform(std::span<const double> probs) {
  if (probs.empty()) throw InvalidArgument("categorical KL over zero classes");
  double kl = std::log(static_cast<double>(probs.size()));
  for (double p : probs)
    if (p > 0.0) kl += p * std::log(p);
  return kl;
}

double gaussian_kl_standard(double mu, double sigma) {
  return 0.5 * (mu * mu + sigma * sigma - 1.0 - std::log(sigma * sigma));
}

}  // namespace dysalign::gestural
