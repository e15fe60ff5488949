#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace dysalign::metrics {

enum class EditKind { Match, Substitute, Delete, Insert };

// One step of a minimal edit script. `ref`/`hyp` are indices into the input
// sequences; the unused one is -1 for Delete/Insert.
struct EditOp {
  EditKind kind;
  int ref = -1;
  int hyp = -1;
};

// Levenshtein alignment in left-to-right order. Among minimal scripts the
// backtrace prefers match/substitution, then deletion, then insertion.
std::vector<EditOp> edit_alignment(const std::vector<int>& ref, const std::vector<int>& hyp);

std::size_t edit_distance(const std::vector<int>& ref, const std::vector<int>& hyp);

// Word error rate. Throws InvalidArgument on an empty reference.
double wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp);

}  // namespace dysalign::metrics
