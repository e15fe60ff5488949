#pragma once

#include <string>
#include <vector>

#include "dysalign/core/alignment.hpp"
#include "dysalign/grad/tape.hpp"

namespace dysalign::align {

// T x L lattice, 0-based (frame i, token j).
template <typename V>
struct BasicGrid {
  int frames = 0;
  int tokens = 0;
  std::vector<V> cells;

  BasicGrid() = default;
  BasicGrid(int t, int l, V fill = V{}) : frames(t), tokens(l), cells(std::size_t(t) * l, fill) {}

  V& operator()(int i, int j) { return cells[std::size_t(i) * tokens + j]; }
  const V& operator()(int i, int j) const { return cells[std::size_t(i) * tokens + j]; }
  bool contains(int i, int j) const { return i >= 0 && j >= 0 && i < frames && j < tokens; }
};

using Grid = BasicGrid<double>;
using VarGrid = BasicGrid<grad::Var>;

Grid values(const grad::Tape& t, const VarGrid& g);
VarGrid constants(grad::Tape& t, const Grid& g);

// "frame,token,value" rows in frame-major order.
std::string grid_to_csv(const Grid& g);
// "frame,token" rows, token empty for unaligned frames.
std::string alignment_to_csv(const Alignment& a);

}  // namespace dysalign::align
