#pragma once

#include <span>
#include <vector>

#include "dysalign/core/matrix.hpp"
#include "dysalign/grad/layers.hpp"

namespace dysalign::gestural {

struct FlowConfig {
  double sigma_min = 0.01;
  int step_dim = 40;  // K
  int hidden = 16;
};

struct FlowPoint {
  std::vector<double> xt;
  std::vector<double> ut;
};

// x_t = (1 - (1 - sigma_min) t) x0 + t x, u_t = x - (1 - sigma_min) x0.
FlowPoint flow_path(std::span<const double> x0, std::span<const double> x, double t, double sigma_min);

// Sinusoidal embedding of the flow step t in [0, 1].
std::vector<double> step_embedding(double t, int dim);

// Vector field evaluated on one column of H~ = [H; X^_t; X^] plus the step
// embedding column.
class VectorField {
 public:
  virtual ~VectorField() = default;
  virtual std::vector<grad::Var> operator()(grad::Session& s, std::span<const grad::Var> h_col,
                                            std::span<const double> xt_col, std::span<const double> xhat_col,
                                            std::span<const double> step) = 0;
};

class DenseVectorField : public VectorField {
 public:
  DenseVectorField(int gestures, int channels, FlowConfig config = {});
  void init(std::mt19937_64& rng);
  std::vector<grad::Parameter*> parameters() { return net_.parameters(); }

  std::vector<grad::Var> operator()(grad::Session& s, std::span<const grad::Var> h_col,
                                    std::span<const double> xt_col, std::span<const double> xhat_col,
                                    std::span<const double> step) override;

 private:
  int gestures_, channels_;
  grad::Mlp net_;
};

// (1/T) sum_f || u_f - v_f ||^2 with x0 and t frozen by the caller.
// `h` is K x T, `xhat` and `x0` are D x T.
grad::Var flow_loss(grad::Session& s, const std::vector<std::vector<grad::Var>>& h, const FeatureMatrix& xhat,
                    const std::vector<double>& x0, double t, const FlowConfig& config, VectorField& field);

}  // namespace dysalign::gestural
