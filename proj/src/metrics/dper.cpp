#include "dysalign/metrics/dper.hpp"

#include <cmath>
#include <limits>

#include "dysalign/core/error.hpp"
#include "dysalign/metrics/edit.hpp"

namespace dysalign::metrics {

DperAccumulators& DperAccumulators::operator+=(const DperAccumulators& o) {
  substitutions += o.substitutions;
  insertions += o.insertions;
  deletions += o.deletions;
  correct += o.correct;
  return *this;
}

double DperAccumulators::ratio() const {
  const double num = substitutions + deletions + insertions;
  if (num == 0) return 0;
  const double den = substitutions + deletions + correct;
  if (den == 0) return std::numeric_limits<double>::infinity();
  return num / den;
}

DperAccumulators dper_accumulate(const std::vector<Phone>& ref, const std::vector<Phone>& hyp) {
  std::vector<int> r, h;
  for (const auto& p : ref) {
    if (!(p.duration >= 0)) throw InvalidArgument("dPER durations must be non-negative");
    r.push_back(p.symbol);
  }
  for (const auto& p : hyp) {
    if (!(p.duration >= 0)) throw InvalidArgument("dPER durations must be non-negative");
    h.push_back(p.symbol);
  }
  DperAccumulators acc;
  for (const auto& op : edit_alignment(r, h)) {
    switch (op.kind) {
      case EditKind::Match:
        acc.correct += std::abs(ref[op.ref].duration - hyp[op.hyp].duration);
        break;
      case EditKind::Substitute:
        acc.substitutions += ref[op.ref].duration + hyp[op.hyp].duration;
        break;
      case EditKind::Delete:
        acc.deletions += ref[op.ref].duration;
        break;
      case EditKind::Insert:
        acc.insertions += hyp[op.hyp].duration;
        break;
    }
  }
  return acc;
}

double dper(const std::vector<Phone>& ref, const std::vector<Phone>& hyp) {
  return dper_accumulate(ref, hyp).ratio();
}

std::vector<Phone> phones(const TimedTokenSequence& seq) {
  std::vector<Phone> out;
  for (const auto& t : seq.tokens()) out.push_back({t.symbol, frames_to_seconds(t.frames())});
  return out;
}

double dper(const TimedTokenSequence& ref, const TimedTokenSequence& hyp) { return dper(phones(ref), phones(hyp)); }

}  // namespace dysalign::metrics
