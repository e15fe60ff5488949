#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dysalign/core/matrix.hpp"

namespace dysalign::gestural {

// Active run of one gesture row: frames [start, end], both inclusive and
// 0-based, with one activation per frame.
struct ScoreSpan {
  int start = 0;
  int end = 0;
  std::vector<double> values;

  int length() const { return end - start + 1; }
  friend bool operator==(const ScoreSpan&, const ScoreSpan&) = default;
};

// Sparse K x T gestural scores stored as per-row span lists. Entries outside
// every span are exactly zero.
class GesturalScores {
 public:
  GesturalScores() = default;
  GesturalScores(int k, int t);

  int gestures() const { return k_; }
  int frames() const { return t_; }
  const std::vector<ScoreSpan>& row(int i) const { return rows_.at(i); }

  // Spans must lie in [0, T), be sorted, disjoint and non-adjacent, carry
  // length() values, and a row may hold at most ceil(T/4) of them.
  void set_row(int i, std::vector<ScoreSpan> spans);

  double at(int i, int t) const;
  std::size_t nonzero_bound() const;  // total span length over all rows
  int max_spans_per_row() const { return (t_ + 3) / 4; }

  std::vector<double> to_dense() const;  // row-major K*T
  // Maximal runs of non-zero entries become spans.
  static GesturalScores from_dense(int k, int t, const std::vector<double>& dense);

  FeatureMatrix to_matrix() const;

  std::string to_json() const;
  static GesturalScores from_json(const std::string& text);

  friend bool operator==(const GesturalScores&, const GesturalScores&) = default;

 private:
  int k_ = 0;
  int t_ = 0;
  std::vector<std::vector<ScoreSpan>> rows_;
};

// Orders each (start, end) draw, sorts by start and unions overlapping or
// touching intervals.
std::vector<std::pair<int, int>> generate_spans(std::vector<std::pair<int, int>> draws);

}  // namespace dysalign::gestural
