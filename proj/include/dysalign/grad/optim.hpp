#pragma once

#include <cstdint>
#include <vector>

#include "dysalign/grad/parameter.hpp"

namespace dysalign::grad {

// Step decay: lr = initial * rate^floor(step / every).
struct LearningRateSchedule {
  double initial = 1e-3;
  double decay = 0.9;
  std::int64_t every = 10;

  double at(std::int64_t step) const;
};

class Sgd {
 public:
  explicit Sgd(LearningRateSchedule schedule) : schedule_(schedule) {}
  void step(const std::vector<Parameter*>& params);
  std::int64_t steps() const { return t_; }

 private:
  LearningRateSchedule schedule_;
  std::int64_t t_ = 0;
};

class Adam {
 public:
  explicit Adam(LearningRateSchedule schedule, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : schedule_(schedule), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  // Applies one update from the accumulated grads. Moment buffers are keyed
  // by position in `params`, so the same ordering must be used every step.
  void step(const std::vector<Parameter*>& params);
  std::int64_t steps() const { return t_; }

 private:
  LearningRateSchedule schedule_;
  double beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace dysalign::grad
