#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "dysalign/grad/tape.hpp"

namespace dysalign::grad {

// Trainable matrix of doubles with a same-shape gradient accumulator.
struct Parameter {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<double> grads;

  Parameter() = default;
  Parameter(std::string name, std::size_t rows, std::size_t cols, double fill = 0.0);

  std::size_t size() const { return values.size(); }
  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  void zero_grad();
};

// A parameter's elements placed on a tape as consecutive leaves.
class Binding {
 public:
  Binding() = default;
  Binding(const Parameter* p, std::int32_t first) : param_(p), first_(first) {}

  Var at(std::size_t i) const { return Var{first_ + static_cast<std::int32_t>(i)}; }
  Var at(std::size_t r, std::size_t c) const { return at(r * param_->cols + c); }
  std::vector<Var> row(std::size_t r) const;
  std::vector<Var> all() const;
  const Parameter& param() const { return *param_; }

 private:
  const Parameter* param_ = nullptr;
  std::int32_t first_ = 0;
};

// A tape plus the parameters bound onto it. backward() folds leaf gradients
// back into each bound Parameter::grads.
class Session {
 public:
  Tape tape;

  // Binds `p` once per session; later calls return the same leaves.
  const Binding& bind(Parameter& p);
  void backward(Var root);
  // Empties the tape and forgets every binding; capacity is kept for reuse.
  void reset();

 private:
  std::unordered_map<Parameter*, Binding> bound_;
  std::vector<Parameter*> order_;
};

}  // namespace dysalign::grad
