#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "dysalign/align/grid.hpp"
#include "dysalign/grad/parameter.hpp"

namespace dysalign::align {

// phi(C_m | C_n) by 0-based token position.
using PositionTransition = std::function<grad::Var(int m, int n)>;

inline constexpr double kPassInserted = 1.0;  // stack 5
inline constexpr double kPassRemoved = 1e-5;  // stack 6

// Offsets (k, k_hat) with 1 <= k <= k_hat <= bound per cell, or (0, 0) when
// the bound is below 1 (stacks 2-4 then see only out-of-range references).
struct KSamples {
  int frames = 0;
  int tokens = 0;
  std::vector<std::pair<int, int>> forward;   // bound min(i, j) - 1, 1-based
  std::vector<std::pair<int, int>> backward;  // bound min(T - i, L - j) - 1

  static KSamples draw(int frames, int tokens, std::mt19937_64& rng);
  static int forward_bound(int i, int j) { return std::min(i + 1, j + 1) - 1; }
  static int backward_bound(int frames, int tokens, int i, int j) {
    return std::min(frames - 1 - i, tokens - 1 - j) - 1;
  }
};

// f1: R^3 -> R and f2: R -> R, both one-hidden-layer tanh nets.
class FcsaNetworks {
 public:
  explicit FcsaNetworks(int hidden = 4);

  void init(std::mt19937_64& rng);
  std::vector<grad::Parameter*> parameters() { return {&f1_w1, &f1_b1, &f1_w2, &f1_b2, &f2_w1, &f2_b1, &f2_w2, &f2_b2}; }

  grad::Var f1(grad::Session& s, grad::Var score, grad::Var transition, grad::Var emission);
  grad::Var f2(grad::Session& s, grad::Var x);

  grad::Parameter f1_w1, f1_b1, f1_w2, f1_b2;
  grad::Parameter f2_w1, f2_b1, f2_w2, f2_b2;

 private:
  std::vector<grad::Var> hidden_, weights_;  // scratch
};

struct FcsaGrid {
  VarGrid scores;                          // alpha or beta
  BasicGrid<std::array<grad::Var, 6>> stacks;  // per-stack scores alpha_u
};

// Forward recursion over the six stacks; cell = f0(f2(sum_u alpha_u)),
// alpha[0][0] = 1.
FcsaGrid fcsa_forward(grad::Session& s, FcsaNetworks& nets, const VarGrid& y, const PositionTransition& phi,
                      const KSamples& k);

// Mirror recursion with (i + a_u, j + b_u), beta[T-1][L-1] = 1.
FcsaGrid fcsa_backward(grad::Session& s, FcsaNetworks& nets, const VarGrid& y, const PositionTransition& phi,
                       const KSamples& k);

}  // namespace dysalign::align
