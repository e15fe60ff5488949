#include "dysalign/metrics/rates.hpp"

#include <cmath>
#include <string>

#include "dysalign/core/error.hpp"

namespace dysalign::metrics {

double scaling_factor(double a, double b, double c) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c))
    throw InvalidArgument("scaling factor needs finite results");
  return (c - b) * 0.3 + (b - a) * 0.4;
}

double scaling_factor(const std::array<double, 3>& r) { return scaling_factor(r[0], r[1], r[2]); }

namespace {

double share(const std::vector<int>& flags, const char* what) {
  if (flags.empty()) throw InvalidArgument(std::string(what) + " needs at least one utterance");
  double ones = 0;
  for (int f : flags) {
    if (f != 0 && f != 1) throw InvalidArgument(std::string(what) + " flags must be 0 or 1");
    ones += f;
  }
  return ones / static_cast<double>(flags.size());
}

}  // namespace

double fp_rate(const std::vector<int>& has_dysfluency) { return share(has_dysfluency, "FP rate"); }

double pper(const std::vector<int>& flags) { return share(flags, "PPER"); }

double pper_fp_ratio(double p, double fp) {
  if (!(fp > 0)) throw InvalidArgument("PPER/FP ratio is undefined when FP is 0");
  return p / fp;
}

}  // namespace dysalign::metrics
