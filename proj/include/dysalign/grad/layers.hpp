#pragma once

#include <random>
#include <span>
#include <vector>

#include "dysalign/grad/parameter.hpp"

namespace dysalign::grad {

// out = W * input + b, with W of shape (out, in) and b of shape (out, 1).
std::vector<Var> dense_forward(Session& s, std::span<const Var> input, Parameter& weights, Parameter& bias);

std::vector<Var> log_softmax(Tape& t, std::span<const Var> logits);
std::vector<Var> softmax(Tape& t, std::span<const Var> logits);
std::vector<Var> sigmoid(Tape& t, std::span<const Var> xs);
std::vector<Var> tanh(Tape& t, std::span<const Var> xs);

// Reparameterised Gaussian draw mu + sigma * noise, differentiable in both.
Var gaussian_sample(Tape& t, Var mu, Var sigma, double noise);

// Strictly positive transform used for every scale parameter.
inline Var positive(Tape& t, Var raw) { return t.softplus(raw); }
double softplus(double x);
double inverse_softplus(double y);

// Leaves for a vector of constants.
std::vector<Var> constants(Tape& t, std::span<const double> values);
std::vector<double> values(const Tape& t, std::span<const Var> xs);

// Fills values with N(0, stddev^2) draws.
void init_normal(Parameter& p, std::mt19937_64& rng, double stddev);

// Two-layer tanh perceptron R^in -> R^out used for small learned maps.
struct Mlp {
  Parameter w1, b1, w2, b2;

  Mlp() = default;
  Mlp(const std::string& name, std::size_t in, std::size_t hidden, std::size_t out);

  std::vector<Var> forward(Session& s, std::span<const Var> input);
  std::vector<Parameter*> parameters() { return {&w1, &b1, &w2, &b2}; }
  // Scaled-normal weights, zero biases.
  void init(std::mt19937_64& rng);
};

}  // namespace dysalign::grad
