#include "dysalign/align/ctc.hpp"

#include <vector>

#include "dysalign/core/error.hpp"

namespace dysalign::align {

using grad::Var;

int ctc_min_frames(std::span<const int> target) {
  int n = static_cast<int>(target.size());
  for (std::size_t i = 1; i < target.size(); ++i) n += target[i] == target[i - 1];
  return n;
}

Var ctc_loss(grad::Tape& t, const VarGrid& log_probs, std::span<const int> target, int blank) {
  const int T = log_probs.frames, V = log_probs.tokens;
  if (blank < 0 || blank >= V) throw InvalidArgument("blank id outside the alphabet");
  for (int c : target)
    if (c < 0 || c >= V || c == blank) throw InvalidArgument("CTC target symbol outside the alphabet or blank");
  if (T < ctc_min_frames(target))
    throw InvalidArgument("CTC target needs " + std::to_string(ctc_min_frames(target)) + " frames, got " +
                          std::to_string(T));
  // Extended label sequence: blank, l1, blank, l2, ..., blank.
  const int S = 2 * static_cast<int>(target.size()) + 1;
  auto label = [&](int s) { return s % 2 == 0 ? blank : target[s / 2]; };
  const Var none{};
  std::vector<Var> prev(S, none), cur(S, none);
  prev[0] = log_probs(0, label(0));
  if (S > 1) prev[1] = log_probs(0, label(1));
  std::vector<Var> terms;
  for (int i = 1; i < T; ++i) {
    for (int s = 0; s < S; ++s) {
      terms.clear();
      if (prev[s].valid()) terms.push_back(prev[s]);
      if (s >= 1 && prev[s - 1].valid()) terms.push_back(prev[s - 1]);
      if (s >= 2 && label(s) != blank && label(s) != label(s - 2) && prev[s - 2].valid()) terms.push_back(prev[s - 2]);
      if (terms.empty()) {
        cur[s] = none;
        continue;
      }
      const Var acc = terms.size() == 1 ? terms[0] : t.logsumexp(terms);
      cur[s] = t.add(acc, log_probs(i, label(s)));
    }
    std::swap(prev, cur);
  }
  terms.clear();
  if (prev[S - 1].valid()) terms.push_back(prev[S - 1]);
  if (S >= 2 && prev[S - 2].valid()) terms.push_back(prev[S - 2]);
  return t.neg(terms.size() == 1 ? terms[0] : t.logsumexp(terms));
}

}  // namespace dysalign::align
