#pragma once

#include <array>
#include <vector>

namespace dysalign::metrics {

// (c - b) * 0.3 + (b - a) * 0.4 for results at 30%, 60%, 100% training data.
double scaling_factor(double a, double b, double c);
double scaling_factor(const std::array<double, 3>& results);

// Share of flags equal to 1. Throws InvalidArgument on an empty list.
double fp_rate(const std::vector<int>& has_dysfluency);

// Share of utterances with at least one phonetic error.
double pper(const std::vector<int>& phonetic_error_flags);

// PPER / FP. Throws InvalidArgument when fp is 0.
double pper_fp_ratio(double pper, double fp);

}  // namespace dysalign::metrics
