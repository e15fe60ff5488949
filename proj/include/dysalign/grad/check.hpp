#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dysalign/grad/parameter.hpp"

namespace dysalign::grad {

// Builds a scalar loss on a fresh session. Must be deterministic: any noise
// has to be frozen inside the closure.
using LossFn = std::function<Var(Session&)>;

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

// Compares reverse-mode gradients with central differences. The relative
// error per element is |analytic - numeric| / max(1, |numeric|). Throws
// NumericError when the loss is not finite. Parameter values are restored.
GradientCheckResult gradient_check(const LossFn& loss, const std::vector<Parameter*>& params, double eps = 1e-5);

// Loss value and analytic gradients (written to Parameter::grads) in one pass.
double evaluate(const LossFn& loss, const std::vector<Parameter*>& params);

}  // namespace dysalign::grad
