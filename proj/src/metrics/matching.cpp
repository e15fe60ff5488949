#include "dysalign/metrics/matching.hpp"

#include <algorithm>

namespace dysalign::metrics {

namespace {

std::pair<std::int64_t, std::int64_t> interval(const DysfluencyAnnotation& a) {
  return {a.start, a.end.value_or(a.start + 1)};
}

}  // namespace

double iou(const DysfluencyAnnotation& a, const DysfluencyAnnotation& b) {
  const auto [a0, a1] = interval(a);
  const auto [b0, b1] = interval(b);
  const auto inter = std::max<std::int64_t>(0, std::min(a1, b1) - std::max(a0, b0));
  const auto uni = (a1 - a0) + (b1 - b0) - inter;
  return uni <= 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

Counts MatchResult::counts() const {
  Counts c;
  c.tp = static_cast<double>(pairs.size());
  c.fp = static_cast<double>(unmatched_pred.size());
  c.fn = static_cast<double>(unmatched_gt.size());
  return c;
}

MatchResult match_events(const std::vector<DysfluencyAnnotation>& pred, const std::vector<DysfluencyAnnotation>& gt,
                         double min_iou) {
  std::vector<MatchedPair> cands;
  for (std::size_t i = 0; i < pred.size(); ++i)
    for (std::size_t j = 0; j < gt.size(); ++j) {
      if (pred[i].type != gt[j].type) continue;
      const double v = iou(pred[i], gt[j]);
      if (v > min_iou) cands.push_back({i, j, v});
    }
  std::stable_sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) { return a.iou > b.iou; });
  std::vector<bool> used_p(pred.size()), used_g(gt.size());
  MatchResult r;
  for (const auto& c : cands) {
    if (used_p[c.pred] || used_g[c.gt]) continue;
    used_p[c.pred] = used_g[c.gt] = true;
    r.pairs.push_back(c);
  }
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (!used_p[i]) r.unmatched_pred.push_back(i);
  for (std::size_t j = 0; j < gt.size(); ++j)
    if (!used_g[j]) r.unmatched_gt.push_back(j);
  return r;
}

double matching_score(const std::vector<DysfluencyAnnotation>& pred, const std::vector<DysfluencyAnnotation>& gt,
                      MatchResult* result) {
  auto r = match_events(pred, gt, 0.5);
  const double ms = r.counts().f1();
  if (result) *result = std::move(r);
  return ms;
}

Counts strict_counts(const std::vector<DysfluencyAnnotation>& pred, const std::vector<DysfluencyAnnotation>& gt) {
  return match_events(pred, gt, 0.0).counts();
}

}  // namespace dysalign::metrics
