#include "dysalign/grad/layers.hpp"

#include <algorithm>
#include <cmath>

#include "dysalign/core/error.hpp"

namespace dysalign::grad {

std::vector<Var> dense_forward(Session& s, std::span<const Var> input, Parameter& weights, Parameter& bias) {
  if (weights.cols != input.size() || bias.size() != weights.rows)
    throw ShapeError("dense_forward: weights " + std::to_string(weights.rows) + "x" + std::to_string(weights.cols) +
                     " do not match input " + std::to_string(input.size()) + " / bias " +
                     std::to_string(bias.size()));
  const Binding& w = s.bind(weights);
  const Binding& b = s.bind(bias);
  std::vector<Var> out(weights.rows);
  for (std::size_t r = 0; r < weights.rows; ++r) {
    const std::vector<Var> row = w.row(r);
    out[r] = s.tape.add(s.tape.dot(row, input), b.at(r));
  }
  return out;
}

std::vector<Var> log_softmax(Tape& t, std::span<const Var> logits) {
  const Var lse = t.logsumexp(logits);
  std::vector<Var> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = t.sub(logits[i], lse);
  return out;
}

std::vector<Var> softmax(Tape& t, std::span<const Var> logits) {
  std::vector<Var> out = log_softmax(t, logits);
  for (Var& v : out) v = t.exp(v);
  return out;
}

std::vector<Var> sigmoid(Tape& t, std::span<const Var> xs) {
  std::vector<Var> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = t.sigmoid(xs[i]);
  return out;
}

std::vector<Var> tanh(Tape& t, std::span<const Var> xs) {
  std::vector<Var> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = t.tanh(xs[i]);
  return out;
}

Var gaussian_sample(Tape& t, Var mu, Var sigma, double noise) {
  if (noise == 0.0) return mu;
  return t.add(mu, t.scale(sigma, noise));
}

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

double inverse_softplus(double y) {
  if (!(y > 0.0)) throw InvalidArgument("inverse_softplus needs a positive argument");
  return y > 30.0 ? y : std::log(std::expm1(y));
}

std::vector<Var> constants(Tape& t, std::span<const double> values) {
  std::vector<Var> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = t.constant(values[i]);
  return out;
}

std::vector<double> values(const Tape& t, std::span<const Var> xs) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = t.value(xs[i]);
  return out;
}

void init_normal(Parameter& p, std::mt19937_64& rng, double stddev) {
  std::normal_distribution<double> d(0.0, stddev);
  for (double& v : p.values) v = d(rng);
}

Mlp::Mlp(const std::string& name, std::size_t in, std::size_t hidden, std::size_t out)
    : w1(name + ".w1", hidden, in), b1(name + ".b1", hidden, 1), w2(name + ".w2", out, hidden), b2(name + ".b2", out, 1) {}

std::vector<Var> Mlp::forward(Session& s, std::span<const Var> input) {
  std::vector<Var> h = tanh(s.tape, dense_forward(s, input, w1, b1));
  return dense_forward(s, h, w2, b2);
}


void Mlp::init(std::mt19937_64& rng) {
  init_normal(w1, rng, 1.0 / std::sqrt(static_cast<double>(w1.cols)));
  init_normal(w2, rng, 1.0 / std::sqrt(static_cast<double>(w2.cols)));
  std::fill(b1.values.begin(), b1.values.end(), 0.0);
  std::fill(b2.values.begin(), b2.values.end(), 0.0);
}

}  // namespace dysalign::grad
