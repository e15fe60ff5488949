#include "dysalign/align/grid.hpp"

#include <sstream>

#include <fmt/format.h>

namespace dysalign::align {

Grid values(const grad::Tape& t, const VarGrid& g) {
  Grid out(g.frames, g.tokens);
  for (std::size_t n = 0; n < g.cells.size(); ++n) out.cells[n] = t.value(g.cells[n]);
  return out;
}

VarGrid constants(grad::Tape& t, const Grid& g) {
  VarGrid out(g.frames, g.tokens);
  for (std::size_t n = 0; n < g.cells.size(); ++n) out.cells[n] = t.constant(g.cells[n]);
  return out;
}

std::string grid_to_csv(const Grid& g) {
  std::string out = "frame,token,value\n";
  for (int i = 0; i < g.frames; ++i)
    for (int j = 0; j < g.tokens; ++j) out += fmt::format("{},{},{:.17g}\n", i, j, g(i, j));
  return out;
}

std::string alignment_to_csv(const Alignment& a) {
  std::string out = "frame,token\n";
  const std::vector<int> owner = a.frame_owner();
  for (int f = 0; f < a.frames; ++f) {
    out += std::to_string(f) + ",";
    if (owner[f] >= 0) out += std::to_string(owner[f]);
    out += "\n";
  }
  return out;
}

}  // namespace dysalign::align
