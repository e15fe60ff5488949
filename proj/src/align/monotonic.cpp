#include "dysalign/align/monotonic.hpp"

#include <cmath>
#include <limits>

#include "dysalign/core/error.hpp"

namespace dysalign::align {

namespace {

double log_add(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

Grid monotonic_forward_log(const Grid& y) {
  if (y.frames < 1 || y.tokens < 1) throw InvalidArgument("monotonic_forward needs a non-empty grid");
  Grid a(y.frames, y.tokens, -INFINITY);
  a(0, 0) = std::log(y(0, 0));
  for (int i = 1; i < y.frames; ++i)
    for (int j = 0; j < y.tokens; ++j) {
      const double stay = a(i - 1, j);
      const double advance = j > 0 ? a(i - 1, j - 1) : -INFINITY;
      const double acc = log_add(stay, advance);
      a(i, j) = acc == -INFINITY ? -INFINITY : acc + std::log(y(i, j));
    }
  return a;
}

Grid monotonic_forward(const Grid& y) {
  Grid a = monotonic_forward_log(y);
  for (double& v : a.cells) v = std::exp(v);
  return a;
}

}  // namespace dysalign::align
