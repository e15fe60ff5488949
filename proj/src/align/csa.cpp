#include "dysalign/align/csa.hpp"

#include <cmath>

#include "dysalign/core/error.hpp"

namespace dysalign::align {

namespace {

void check(const Grid& y, const CsaOptions& o) {
  if (y.frames < 1 || y.tokens < 1) throw InvalidArgument("CSA needs a non-empty grid");
  if (!(o.decay > 0.0 && o.decay < 1.0)) throw InvalidArgument("CSA decay must lie in (0, 1)");
}

}  // namespace

Grid csa_forward(const Grid& y, const TransitionValue& transition, const CsaOptions& o) {
  check(y, o);
  Grid a(y.frames, y.tokens, 0.0);
  a(0, 0) = 1.0;
  for (int i = 1; i < y.frames; ++i)
    for (int j = 0; j < y.tokens; ++j) {
      double skip = 0.0;
      const int kmax = o.max_skip < 0 ? j : std::min(j, o.max_skip);
      for (int k = 1; k <= kmax; ++k) {
        const double gate = k == 1 ? transition(j - 1, j) : 1.0;
        skip += std::pow(o.decay, k) * a(i - 1, j - k) * gate;
      }
      a(i, j) = a(i - 1, j) + skip * y(i, j);
    }
  return a;
}

Grid csa_backward(const Grid& y, const TransitionValue& transition, const CsaOptions& o) {
  check(y, o);
  const int T = y.frames, L = y.tokens;
  Grid b(T, L, 0.0);
  b(T - 1, L - 1) = 1.0;
  for (int i = T - 2; i >= 0; --i)
    for (int j = 0; j < L; ++j) {
      double skip = 0.0;
      const int kmax = o.max_skip < 0 ? L - 1 - j : std::min(L - 1 - j, o.max_skip);
      for (int k = 1; k <= kmax; ++k) {
        const double gate = k == 1 ? transition(j, j + 1) : 1.0;
        skip += std::pow(o.decay, k) * b(i + 1, j + k) * gate;
      }
      b(i, j) = b(i + 1, j) + skip * y(i, j);
    }
  return b;
}

}  // namespace dysalign::align
