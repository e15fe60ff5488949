#pragma once

#include <vector>

#include "dysalign/core/time.hpp"

namespace dysalign::metrics {

struct Phone {
  int symbol = 0;
  double duration = 0;  // seconds
};

// Duration-weighted substitution/insertion/deletion/correct totals.
struct DperAccumulators {
  double substitutions = 0;
  double insertions = 0;
  double deletions = 0;
  double correct = 0;

  DperAccumulators& operator+=(const DperAccumulators& o);
  // (S + D + I) / (S + D + C). 0 whenever the numerator is 0; +inf when only
  // insertions were seen.
  double ratio() const;
};

// Aligns the symbol sequences with edit_alignment and applies
//   sub: S += d_i + d_j   ins: I += d_j   del: D += d_i   match: C += |d_i - d_j|
// Throws InvalidArgument on negative durations.
DperAccumulators dper_accumulate(const std::vector<Phone>& ref, const std::vector<Phone>& hyp);
double dper(const std::vector<Phone>& ref, const std::vector<Phone>& hyp);

// Durations are token lengths in seconds.
std::vector<Phone> phones(const TimedTokenSequence& seq);
double dper(const TimedTokenSequence& ref, const TimedTokenSequence& hyp);

}  // namespace dysalign::metrics
