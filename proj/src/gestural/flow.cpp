#include "dysalign/gestural/flow.hpp"

#include <cmath>

#include "dysalign/core/error.hpp"

namespace dysalign::gestural {

using grad::Var;

FlowPoint flow_path(std::span<const double> x0, std::span<const double> x, double t, double sigma_min) {
  if (x0.size() != x.size()) throw ShapeError("flow_path: x0 and x differ in length");
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("flow_path: t must lie in [0, 1]");
  if (!(sigma_min > 0.0 && sigma_min < 1.0)) throw InvalidArgument("flow_path: sigma_min must lie in (0, 1)");
  FlowPoint p;
  p.xt.resize(x.size());
  p.ut.resize(x.size());
  const double keep = 1.0 - (1.0 - sigma_min) * t;
  for (std::size_t i = 0; i < x.size(); ++i) {
    p.xt[i] = keep * x0[i] + t * x[i];
    p.ut[i] = x[i] - (1.0 - sigma_min) * x0[i];
  }
  return p;
}

std::vector<double> step_embedding(double t, int dim) {
  std::vector<double> out(dim);
  const int half = dim / 2;
  for (int m = 0; m < dim; ++m) {
    const int j = m % std::max(half, 1);
    const double freq = std::pow(10000.0, -static_cast<double>(j) / std::max(half, 1));
    out[m] = m < half ? std::sin(1000.0 * t * freq) : std::cos(1000.0 * t * freq);
  }
  return out;
}

DenseVectorField::DenseVectorField(int gestures, int channels, FlowConfig config)
    : gestures_(gestures),
      channels_(channels),
      net_("flow.field", gestures + 2 * channels + config.step_dim, config.hidden, channels) {}

void DenseVectorField::init(std::mt19937_64& rng) { net_.init(rng); }

std::vector<Var> DenseVectorField::operator()(grad::Session& s, std::span<const Var> h_col,
                                              std::span<const double> xt_col, std::span<const double> xhat_col,
                                              std::span<const double> step) {
  if (static_cast<int>(h_col.size()) != gestures_ || static_cast<int>(xt_col.size()) != channels_ ||
      static_cast<int>(xhat_col.size()) != channels_ || h_col.size() + xt_col.size() + xhat_col.size() + step.size() !=
                                                             net_.w1.cols)
    throw ShapeError("vector field input does not match [H; X_t; X; s_t] layout");
  std::vector<Var> input(h_col.begin(), h_col.end());
  for (double v : xt_col) input.push_back(s.tape.constant(v));
  for (double v : xhat_col) input.push_back(s.tape.constant(v));
  for (double v : step) input.push_back(s.tape.constant(v));
  return net_.forward(s, input);
}

Var flow_loss(grad::Session& s, const std::vector<std::vector<Var>>& h, const FeatureMatrix& xhat,
              const std::vector<double>& x0, double t, const FlowConfig& config, VectorField& field) {
  const std::size_t D = xhat.rows(), T = xhat.cols();
  if (T == 0) throw InvalidArgument("flow_loss over zero frames");
  if (x0.size() != D * T) throw ShapeError("flow_loss: noise must be D x T");
  for (const auto& row : h)
    if (row.size() != T) throw ShapeError("flow_loss: H and X^ differ in frame count");
  const std::vector<double> step = step_embedding(t, config.step_dim);
  grad::Tape& tape = s.tape;
  std::vector<Var> frame_errors;
  std::vector<Var> hcol(h.size());
  std::vector<double> x0col(D);
  for (std::size_t f = 0; f < T; ++f) {
    const std::vector<double> xcol = xhat.column(static_cast<std::uint32_t>(f));
    for (std::size_t d = 0; d < D; ++d) x0col[d] = x0[d * T + f];
    for (std::size_t k = 0; k < h.size(); ++k) hcol[k] = h[k][f];
    const FlowPoint p = flow_path(x0col, xcol, t, config.sigma_min);
    const std::vector<Var> v = field(s, hcol, p.xt, xcol, step);
    if (v.size() != D) throw ShapeError("vector field output has the wrong width");
    std::vector<Var> sq(D);
    for (std::size_t d = 0; d < D; ++d) sq[d] = tape.square(tape.shift(tape.neg(v[d]), p.ut[d]));
    frame_errors.push_back(tape.sum(sq));
  }
  return tape.scale(tape.sum(frame_errors), 1.0 / static_cast<double>(T));
}

}  // namespace dysalign::gestural
