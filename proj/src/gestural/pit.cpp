#include "dysalign/gestural/pit.hpp"

#include "dysalign/core/error.hpp"

namespace dysalign::gestural {

using grad::Var;

std::vector<double> pit_reconstruct(const GesturalScores& h, const GestureDictionary& g) {
  if (h.gestures() != g.gestures) throw ShapeError("gesture count differs between H and G");
  const int T = h.frames();
  std::vector<double> out(std::size_t(g.channels) * T, 0.0);
  for (int k = 0; k < h.gestures(); ++k)
    for (const ScoreSpan& sp : h.row(k))
      for (int f = sp.start; f <= sp.end; ++f) {
        const double v = sp.values[f - sp.start];
        for (int s = 0; s < g.window && f + s < T; ++s)
          for (int d = 0; d < g.channels; ++d) out[std::size_t(d) * T + f + s] += g.at(s, d, k) * v;
      }
  return out;
}

double pit_loss(const GesturalScores& h, const GestureDictionary& g, const FeatureMatrix& x) {
  if (static_cast<int>(x.rows()) != g.channels || static_cast<int>(x.cols()) != h.frames())
    throw ShapeError("X does not match reconstruction shape");
  const std::vector<double> rec = pit_reconstruct(h, g);
  double loss = 0.0;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const double e = x.data()[i] - rec[i];
    loss += e * e;
  }
  return loss;
}

Var pit_loss(grad::Session& s, const std::vector<std::vector<Var>>& h, const GestureDictionary& g,
             const FeatureMatrix& x) {
  if (static_cast<int>(h.size()) != g.gestures) throw ShapeError("gesture count differs between H and G");
  const int T = static_cast<int>(x.cols());
  if (static_cast<int>(x.rows()) != g.channels) throw ShapeError("X channel count differs from G");
  for (const auto& row : h)
    if (static_cast<int>(row.size()) != T) throw ShapeError("H and X differ in frame count");
  grad::Tape& t = s.tape;
  const Var zero = t.zero();
  std::vector<Var> terms;
  std::vector<double> coeffs;
  std::vector<Var> vars;
  for (int d = 0; d < g.channels; ++d)
    for (int f = 0; f < T; ++f) {
      coeffs.clear();
      vars.clear();
      for (int k = 0; k < g.gestures; ++k)
        for (int sh = 0; sh < g.window && sh <= f; ++sh) {
          const Var hv = h[k][f - sh];
          if (hv == zero) continue;
          coeffs.push_back(g.at(sh, d, k));
          vars.push_back(hv);
        }
      const double target = x(d, f);
      if (vars.empty()) {
        terms.push_back(t.constant(target * target));
        continue;
      }
      terms.push_back(t.square(t.shift(t.neg(t.dot(coeffs, vars)), target)));
    }
  return t.sum(terms);
}

}  // namespace dysalign::gestural
