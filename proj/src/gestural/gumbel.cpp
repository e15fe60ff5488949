#include "dysalign/gestural/gumbel.hpp"

#include <algorithm>
#include <cmath>

#include "dysalign/core/error.hpp"
#include "dysalign/grad/layers.hpp"

namespace dysalign::gestural {

namespace {

void check(std::size_t n, double temperature, std::span<const double> uniforms) {
  if (!(temperature > 0.0)) throw InvalidArgument("Gumbel temperature must be positive");
  if (n == 0) throw InvalidArgument("Gumbel sample over zero classes");
  if (uniforms.size() != n) throw ShapeError("Gumbel noise length differs from class count");
  for (double u : uniforms)
    if (!(u > 0.0 && u < 1.0)) throw InvalidArgument("Gumbel noise must lie in (0, 1)");
}

double gumbel(double u) { return -std::log(-std::log(u)); }

}  // namespace

GumbelSample gumbel_categorical_sample(grad::Tape& t, std::span<const grad::Var> logits, double temperature,
                                       std::span<const double> uniforms) {
  check(logits.size(), temperature, uniforms);
  GumbelSample out;
  out.log_probs = grad::log_softmax(t, logits);
  std::vector<grad::Var> perturbed(logits.size());
  double best = -INFINITY;
  for (std::size_t c = 0; c < logits.size(); ++c) {
    const double g = gumbel(uniforms[c]);
    perturbed[c] = t.scale(t.shift(out.log_probs[c], g), 1.0 / temperature);
    const double score = t.value(out.log_probs[c]) + g;
    if (score > best) {
      best = score;
      out.hard = static_cast<int>(c);
    }
  }
  out.soft = grad::softmax(t, perturbed);
  return out;
}

GumbelDraw gumbel_categorical_sample(std::span<const double> logits, double temperature,
                                     std::span<const double> uniforms) {
  check(logits.size(), temperature, uniforms);
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - m);
  const double lse = m + std::log(z);
  std::vector<double> scores(logits.size());
  GumbelDraw out;
  for (std::size_t c = 0; c < logits.size(); ++c) {
    scores[c] = logits[c] - lse + gumbel(uniforms[c]);
    if (scores[c] > scores[out.hard]) out.hard = static_cast<int>(c);
  }
  const double top = scores[out.hard];
  double total = 0.0;
  out.soft.resize(scores.size());
  for (std::size_t c = 0; c < scores.size(); ++c) total += out.soft[c] = std::exp((scores[c] - top) / temperature);
  for (double& p : out.soft) p /= total;
  return out;
}

}  // namespace dysalign::gestural
