#pragma once

#include "dysalign/align/grid.hpp"

namespace dysalign::align {

// Stay-or-advance DP without blanks, in log space:
// log alpha[i][j] = log(alpha[i-1][j] + alpha[i-1][j-1]) + log y[i][j],
// alpha[0][0] = y[0][0] and alpha[0][j>0] = 0 (log -inf).
Grid monotonic_forward_log(const Grid& y);

// exp of the above.
Grid monotonic_forward(const Grid& y);

}  // namespace dysalign::align
