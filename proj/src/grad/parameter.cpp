#include "dysalign/grad/parameter.hpp"

#include <algorithm>

namespace dysalign::grad {

Parameter::Parameter(std::string n, std::size_t r, std::size_t c, double fill)
    : name(std::move(n)), rows(r), cols(c), values(r * c, fill), grads(r * c, 0.0) {}

void Parameter::zero_grad() { grads.assign(values.size(), 0.0); }

std::vector<Var> Binding::row(std::size_t r) const {
  std::vector<Var> out(param_->cols);
  for (std::size_t c = 0; c < param_->cols; ++c) out[c] = at(r, c);
  return out;
}

std::vector<Var> Binding::all() const {
  std::vector<Var> out(param_->size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i);
  return out;
}

const Binding& Session::bind(Parameter& p) {
  auto it = bound_.find(&p);
  if (it != bound_.end()) return it->second;
  if (p.grads.size() != p.values.size()) p.grads.assign(p.values.size(), 0.0);
  Var first{static_cast<std::int32_t>(tape.size())};
  for (double v : p.values) tape.leaf(v);
  order_.push_back(&p);
  return bound_.emplace(&p, Binding(&p, first.id)).first->second;
}

void Session::reset() {
  tape.clear();
  bound_.clear();
  order_.clear();
}

void Session::backward(Var root) {
  tape.backward(root);
  for (Parameter* p : order_) {
    const Binding& b = bound_.at(p);
    for (std::size_t i = 0; i < p->size(); ++i) p->grads[i] += tape.grad(b.at(i));
  }
}

}  // namespace dysalign::grad
