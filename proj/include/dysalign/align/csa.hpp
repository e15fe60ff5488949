#pragma once

#include <functional>

#include "dysalign/align/grid.hpp"

namespace dysalign::align {

// Position-level transition p(C_m | C_n), 0-based token positions.
using TransitionValue = std::function<double(int m, int n)>;

struct CsaOptions {
  double decay = 0.5;  // delta
  int max_skip = -1;   // largest k summed; -1 for no limit
};

// alpha[i][j] = alpha[i-1][j] + sum_{k>=1} delta^k alpha[i-1][j-k] y[i][j] g_k,
// with g_1 = p(C_{j-1} | C_j) and g_k = 1 otherwise. alpha[0][0] = 1, every
// reference outside the grid is 0.
Grid csa_forward(const Grid& y, const TransitionValue& transition, const CsaOptions& options);

// beta[i][j] = beta[i+1][j] + sum_{k>=1} delta^k beta[i+1][j+k] y[i][j] g_k,
// with g_1 = p(C_j | C_{j+1}); beta[T-1][L-1] = 1.
Grid csa_backward(const Grid& y, const TransitionValue& transition, const CsaOptions& options);

}  // namespace dysalign::align
