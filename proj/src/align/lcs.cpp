#include "dysalign/align/lcs.hpp"

#include <algorithm>

#include "dysalign/core/error.hpp"

namespace dysalign::align {

LcsAlignment sample_alignment(const Grid& y, const std::vector<double>& transition, double threshold) {
  const int T = y.frames, L = y.tokens;
  if (static_cast<int>(transition.size()) != L) throw ShapeError("one transition value per token expected");
  auto matches = [&](int i, int j) {  // 1-based
    const double trans = j > 1 ? transition[j - 1] : 1.0;
    return y(i - 1, j - 1) * trans > threshold;
  };
  std::vector<std::vector<int>> dp(T + 1, std::vector<int>(L + 1, 0));
  for (int i = 1; i <= T; ++i)
    for (int j = 1; j <= L; ++j)
      dp[i][j] = matches(i, j) ? dp[i - 1][j - 1] + 1 : std::max(dp[i - 1][j], dp[i][j - 1]);

  LcsAlignment out;
  out.frame_token.assign(T, std::nullopt);
  int i = T, j = L;
  while (i > 0 && j > 0) {
    if (matches(i, j)) {
      out.frame_token[i - 1] = j - 1;
      --i;
      --j;
    } else if (dp[i - 1][j] > dp[i][j - 1]) {
      --i;
    } else {
      --j;
    }
  }
  out.spans = close_spans(out.frame_token, L);
  return out;
}

Alignment close_spans(const std::vector<std::optional<int>>& frame_token, int tokens) {
  Alignment a{static_cast<int>(frame_token.size()), std::vector<std::optional<FrameSpan>>(tokens)};
  int open = 0;
  for (int f = 0; f < a.frames; ++f) {
    if (!frame_token[f]) continue;
    const int j = *frame_token[f];
    if (j < 0 || j >= tokens) throw InvalidArgument("frame matched to a token outside the reference");
    if (a.spans[j]) throw InvalidArgument("token matched by more than one frame");
    a.spans[j] = FrameSpan{open, f};
    open = f + 1;
  }
  return a;
}

}  // namespace dysalign::align
