#include "dysalign/metrics/f1.hpp"

#include <algorithm>
#include <map>

#include "dysalign/core/error.hpp"

namespace dysalign::metrics {

Counts& Counts::operator+=(const Counts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  return *this;
}

double Counts::f1() const {
  const double den = 2 * tp + fp + fn;
  return den == 0 ? 1.0 : 2 * tp / den;
}

double Counts::precision() const { return tp + fp == 0 ? 1.0 : tp / (tp + fp); }
double Counts::recall() const { return tp + fn == 0 ? 1.0 : tp / (tp + fn); }

Counts framewise_counts(const std::vector<int>& ref, const std::vector<int>& hyp, std::optional<int> ignore) {
  if (ref.size() != hyp.size()) throw ShapeError("frame label sequences differ in length");
  Counts c;
  for (std::size_t t = 0; t < ref.size(); ++t) {
    const bool r = !ignore || ref[t] != *ignore;
    const bool h = !ignore || hyp[t] != *ignore;
    if (r && h && ref[t] == hyp[t]) {
      c.tp += 1;
    } else {
      if (h) c.fp += 1;
      if (r) c.fn += 1;
    }
  }
  return c;
}

double framewise_f1(const std::vector<int>& ref, const std::vector<int>& hyp, std::optional<int> ignore) {
  return framewise_counts(ref, hyp, ignore).f1();
}

Counts type_counts(const std::vector<DysfluencyAnnotation>& pred, const std::vector<DysfluencyAnnotation>& gt) {
  std::map<DysfluencyType, double> p, g;
  for (const auto& a : pred) p[a.type] += 1;
  for (const auto& a : gt) g[a.type] += 1;
  Counts c;
  for (auto t : kAllDysfluencyTypes) {
    const double hit = std::min(p[t], g[t]);
    c.tp += hit;
    c.fp += p[t] - hit;
    c.fn += g[t] - hit;
  }
  return c;
}

}  // namespace dysalign::metrics
