#include "dysalign/grad/check.hpp"

#include <algorithm>
#include <cmath>

#include "dysalign/core/error.hpp"

namespace dysalign::grad {

namespace {

double loss_value(const LossFn& loss) {
  Session s;
  const double v = s.tape.value(loss(s));
  if (!std::isfinite(v)) throw NumericError("gradient_check: loss is not finite");
  return v;
}

}  // namespace

double evaluate(const LossFn& loss, const std::vector<Parameter*>& params) {
  for (Parameter* p : params) p->zero_grad();
  Session s;
  const Var root = loss(s);
  const double v = s.tape.value(root);
  if (!std::isfinite(v)) throw NumericError("loss is not finite");
  s.backward(root);
  return v;
}

GradientCheckResult gradient_check(const LossFn& loss, const std::vector<Parameter*>& params, double eps) {
  evaluate(loss, params);
  GradientCheckResult result;
  for (Parameter* p : params) {
    const std::vector<double> analytic = p->grads;
    for (std::size_t i = 0; i < p->size(); ++i) {
      const double saved = p->values[i];
      p->values[i] = saved + eps;
      const double plus = loss_value(loss);
      p->values[i] = saved - eps;
      const double minus = loss_value(loss);
      p->values[i] = saved;
      const double numeric = (plus - minus) / (2.0 * eps);
      const double err = std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(numeric));
      if (err >= result.max_relative_error) {
        result.max_relative_error = err;
        result.worst_parameter = p->name;
        result.worst_index = i;
        result.analytic = analytic[i];
        result.numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace dysalign::grad
