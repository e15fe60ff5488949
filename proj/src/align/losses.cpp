#include "dysalign/align/losses.hpp"

#include <cmath>

#include "dysalign/core/error.hpp"

namespace dysalign::align {

using grad::Var;

Var pre_alignment_loss(grad::Tape& t, const VarGrid& alpha, const VarGrid& beta, const VarGrid& y,
                       const std::vector<bool>* mask) {
  if (alpha.frames != y.frames || beta.frames != y.frames || alpha.tokens != y.tokens || beta.tokens != y.tokens)
    throw ShapeError("alpha, beta and emission grids differ in shape");
  if (mask && mask->size() != y.cells.size()) throw ShapeError("mask does not cover the grid");
  std::vector<Var> terms;
  for (std::size_t n = 0; n < y.cells.size(); ++n) {
    if (mask && !(*mask)[n]) continue;
    if (!(t.value(y.cells[n]) > 0.0)) throw NumericError("emission probability must be positive");
    terms.push_back(t.div(t.mul(alpha.cells[n], beta.cells[n]), y.cells[n]));
  }
  if (terms.empty()) throw InvalidArgument("pre-alignment loss over zero cells");
  return t.scale(t.sum(terms), -1.0 / static_cast<double>(terms.size()));
}

ConsistencyResult consistency_loss(grad::Tape& t, const Alignment& alignment, const FeatureMatrix& tau,
                                   const std::vector<std::vector<Var>>& embeddings, ConsistencyMode mode) {
  if (!alignment.valid()) throw InvalidArgument("consistency loss needs a valid alignment");
  if (static_cast<int>(tau.cols()) != alignment.frames) throw ShapeError("alignment and speech differ in frames");
  if (embeddings.size() != alignment.spans.size()) throw ShapeError("one embedding per aligned unit expected");
  const int T = alignment.frames;
  std::vector<std::vector<double>> cols(T);
  for (int f = 0; f < T; ++f) cols[f] = tau.column(f);

  ConsistencyResult r;
  std::vector<Var> unit_terms;
  for (std::size_t j = 0; j < embeddings.size(); ++j) {
    const auto& span = alignment.spans[j];
    if (!span) continue;
    if (embeddings[j].size() != tau.rows()) throw ShapeError("embedding width differs from speech features");
    std::vector<Var> inside, outside;
    for (int f = 0; f < T; ++f) {
      const Var sim = t.dot(std::span<const double>(cols[f]), embeddings[j]);
      (f >= span->first && f <= span->last ? inside : outside).push_back(sim);
    }
    if (outside.empty()) {
      ++r.skipped;
      continue;
    }
    const Var rest = t.logsumexp(outside);
    std::vector<Var> frame_terms;
    for (Var s : inside) {
      if (mode == ConsistencyMode::Literal) {
        frame_terms.push_back(t.exp(t.sub(s, rest)));
      } else {
        const Var both[2] = {s, rest};
        frame_terms.push_back(t.sub(t.logsumexp(both), s));
      }
    }
    unit_terms.push_back(t.scale(t.sum(frame_terms), 1.0 / static_cast<double>(frame_terms.size())));
  }
  r.loss = unit_terms.empty() ? t.zero() : t.sum(unit_terms);
  return r;
}

Var final_loss(grad::Tape& t, const std::array<std::optional<Var>, 6>& components, const Lambdas& lambdas) {
  std::vector<double> weights;
  std::vector<Var> terms;
  for (int u = 0; u < 6; ++u) {
    if (lambdas[u] == 0.0) continue;
    if (!components[u]) throw InvalidArgument("loss component " + std::to_string(u + 1) + " missing");
    if (!std::isfinite(t.value(*components[u])))
      throw NumericError("loss component " + std::to_string(u + 1) + " is not finite");
    weights.push_back(lambdas[u]);
    terms.push_back(*components[u]);
  }
  if (terms.empty()) return t.zero();
  return t.dot(weights, terms);
}

double final_loss(const std::array<double, 6>& components, const Lambdas& lambdas) {
  double total = 0.0;
  for (int u = 0; u < 6; ++u) {
    if (lambdas[u] == 0.0) continue;
    if (!std::isfinite(components[u]))
      throw NumericError("loss component " + std::to_string(u + 1) + " is not finite");
    total += lambdas[u] * components[u];
  }
  return total;
}

}  // namespace dysalign::align
