#include "dysalign/grad/optim.hpp"

#include <cmath>

#include "dysalign/core/error.hpp"

namespace dysalign::grad {

double LearningRateSchedule::at(std::int64_t step) const {
  if (every <= 0) throw InvalidArgument("learning-rate decay interval must be positive");
  return initial * std::pow(decay, static_cast<double>(step / every));
}

void Sgd::step(const std::vector<Parameter*>& params) {
  const double lr = schedule_.at(t_);
  for (Parameter* p : params)
    for (std::size_t i = 0; i < p->size(); ++i) p->values[i] -= lr * p->grads[i];
  ++t_;
}

void Adam::step(const std::vector<Parameter*>& params) {
  if (m_.empty()) {
    for (Parameter* p : params) {
      m_.emplace_back(p->size(), 0.0);
      v_.emplace_back(p->size(), 0.0);
    }
  }
  if (m_.size() != params.size()) throw InvalidArgument("Adam: parameter list changed between steps");
  const double lr = schedule_.at(t_);
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    std::vector<double>& m = m_[k];
    std::vector<double>& v = v_[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double g = p.grads[i];
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g;
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g * g;
      p.values[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
    }
  }
}

}  // namespace dysalign::grad
