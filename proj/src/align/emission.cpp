#include "dysalign/align/emission.hpp"

#include <cmath>

#include "dysalign/core/error.hpp"

namespace dysalign::align {

using grad::Var;

TokenEmbeddings::TokenEmbeddings(int symbols, int dim)
    : mu("align.embed.mu", symbols, dim), sigma_raw("align.embed.sigma_raw", symbols, dim) {
  if (symbols < 1 || dim < 1) throw InvalidArgument("token embeddings need at least one symbol and dimension");
}

void TokenEmbeddings::init(std::mt19937_64& rng) {
  grad::init_normal(mu, rng, 1.0 / std::sqrt(static_cast<double>(mu.cols)));
  std::fill(sigma_raw.values.begin(), sigma_raw.values.end(), grad::inverse_softplus(0.05));
}

std::vector<std::vector<Var>> TokenEmbeddings::sample(grad::Session& s, std::span<const double> noise) {
  if (noise.size() != mu.size()) throw ShapeError("embedding noise must be symbols x dim");
  grad::Tape& t = s.tape;
  const grad::Binding& m = s.bind(mu);
  const grad::Binding& r = s.bind(sigma_raw);
  std::vector<std::vector<Var>> out(mu.rows, std::vector<Var>(mu.cols));
  for (std::size_t c = 0; c < mu.rows; ++c)
    for (std::size_t d = 0; d < mu.cols; ++d)
      out[c][d] = grad::gaussian_sample(t, m.at(c, d), grad::positive(t, r.at(c, d)), noise[c * mu.cols + d]);
  return out;
}

std::vector<double> TokenEmbeddings::draw_noise(std::mt19937_64& rng) const {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> out(mu.size());
  for (double& v : out) v = d(rng);
  return out;
}

namespace {

std::vector<std::vector<double>> columns(const FeatureMatrix& tau) {
  std::vector<std::vector<double>> out(tau.cols());
  for (std::uint32_t f = 0; f < tau.cols(); ++f) out[f] = tau.column(f);
  return out;
}

void check_dims(const FeatureMatrix& tau, const std::vector<std::vector<Var>>& cs) {
  if (cs.empty()) throw InvalidArgument("no token embeddings");
  if (cs[0].size() != tau.rows())
    throw ShapeError("speech features have " + std::to_string(tau.rows()) + " rows, embeddings " +
                     std::to_string(cs[0].size()));
}

}  // namespace

VarGrid emission_grid(grad::Tape& t, const FeatureMatrix& tau, const std::vector<std::vector<Var>>& cs,
                      std::span<const int> reference) {
  check_dims(tau, cs);
  if (reference.empty() || tau.cols() == 0) throw InvalidArgument("emission grid needs T >= 1 and L >= 1");
  for (int id : reference)
    if (id < 0 || id >= static_cast<int>(cs.size())) throw InvalidArgument("reference token outside the alphabet");
  const auto cols = columns(tau);
  const int T = static_cast<int>(tau.cols()), L = static_cast<int>(reference.size());
  VarGrid y(T, L);
  std::vector<Var> logits(L);
  for (int i = 0; i < T; ++i) {
    std::map<int, Var> by_symbol;
    for (int j = 0; j < L; ++j) {
      auto it = by_symbol.find(reference[j]);
      if (it == by_symbol.end())
        it = by_symbol.emplace(reference[j], t.dot(std::span<const double>(cols[i]), cs[reference[j]])).first;
      logits[j] = it->second;
    }
    const std::vector<Var> p = grad::softmax(t, logits);
    for (int j = 0; j < L; ++j) y(i, j) = p[j];
  }
  return y;
}

VarGrid alphabet_log_posteriors(grad::Tape& t, const FeatureMatrix& tau, const std::vector<std::vector<Var>>& cs) {
  check_dims(tau, cs);
  const auto cols = columns(tau);
  const int T = static_cast<int>(tau.cols()), V = static_cast<int>(cs.size());
  VarGrid out(T, V);
  std::vector<Var> logits(V);
  for (int i = 0; i < T; ++i) {
    for (int c = 0; c < V; ++c) logits[c] = t.dot(std::span<const double>(cols[i]), cs[c]);
    const std::vector<Var> lp = grad::log_softmax(t, logits);
    for (int c = 0; c < V; ++c) out(i, c) = lp[c];
  }
  return out;
}

TransitionModel::TransitionModel(int dim) : w("align.transition.w", dim, dim), b("align.transition.b", dim, 1) {}

void TransitionModel::init(std::mt19937_64& rng) {
  grad::init_normal(w, rng, 0.1 / std::sqrt(static_cast<double>(w.cols)));
  std::fill(b.values.begin(), b.values.end(), 0.0);
}

Var TransitionModel::phi(grad::Session& s, Cache& cache, const std::vector<std::vector<Var>>& cs, int m, int n) {
  if (auto it = cache.phi_.find({m, n}); it != cache.phi_.end()) return it->second;
  auto pit = cache.projected_.find(n);
  if (pit == cache.projected_.end()) pit = cache.projected_.emplace(n, grad::dense_forward(s, cs.at(n), w, b)).first;
  const Var v = s.tape.sigmoid(s.tape.dot(cs.at(m), pit->second));
  cache.phi_.emplace(std::make_pair(m, n), v);
  return v;
}

}  // namespace dysalign::align
