#include "dysalign/metrics/edit.hpp"

#include <algorithm>
#include <map>

#include "dysalign/core/error.hpp"

namespace dysalign::metrics {

namespace {

std::vector<std::vector<std::size_t>> table(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j - 1] + (a[i - 1] != b[j - 1]), d[i - 1][j] + 1, d[i][j - 1] + 1});
  return d;
}

}  // namespace

std::vector<EditOp> edit_alignment(const std::vector<int>& ref, const std::vector<int>& hyp) {
  const auto d = table(ref, hyp);
  std::vector<EditOp> ops;
  std::size_t i = ref.size(), j = hyp.size();
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1])) {
      ops.push_back({ref[i - 1] == hyp[j - 1] ? EditKind::Match : EditKind::Substitute, int(i - 1), int(j - 1)});
      --i, --j;
    } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      ops.push_back({EditKind::Delete, int(i - 1), -1});
      --i;
    } else {
      ops.push_back({EditKind::Insert, -1, int(j - 1)});
      --j;
    }
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

std::size_t edit_distance(const std::vector<int>& ref, const std::vector<int>& hyp) {
  return table(ref, hyp)[ref.size()][hyp.size()];
}

double wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  if (ref.empty()) throw InvalidArgument("WER needs a non-empty reference");
  std::map<std::string, int> vocab;
  auto encode = [&](const std::vector<std::string>& words) {
    std::vector<int> out;
    for (const auto& w : words) out.push_back(vocab.emplace(w, static_cast<int>(vocab.size())).first->second);
    return out;
  };
  const auto r = encode(ref);
  const auto h = encode(hyp);
  return static_cast<double>(edit_distance(r, h)) / static_cast<double>(ref.size());
}

}  // namespace dysalign::metrics
