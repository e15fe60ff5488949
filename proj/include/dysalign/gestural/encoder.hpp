#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dysalign/gestural/scores.hpp"
#include "dysalign/grad/layers.hpp"

namespace dysalign::gestural {

struct EncoderConfig {
  int gestures = 40;        // K
  int channels = 12;        // rows of X
  double temperature = 2.0;
  double box_sharpness = 1.0;  // kappa of the straight-through surrogate
  double value_noise = 1.0;    // scales the Gaussian draw; 0 returns the means
  // Hard span mask in the forward pass with the soft box gradient. When off,
  // the soft box is used in both passes, which makes the loss smooth in the
  // index parameters (used for finite-difference checks).
  bool straight_through = true;
};

// Differentiable view of one encoding pass.
struct EncodedScores {
  GesturalScores scores;
  std::vector<std::vector<grad::Var>> dense;  // K x T, zero() outside spans
  std::vector<std::vector<grad::Var>> count_log_probs;  // per row, ceil(T/4) classes
  std::vector<std::vector<grad::Var>> index_log_probs;  // per drawn start/end, T classes
  std::vector<grad::Var> value_mu;
  std::vector<grad::Var> value_sigma;
  std::vector<int> raw_counts;  // drawn count per row before merging
};

// Stand-in count, index and value encoders: small dense maps on a learned
// projection r_i(t) = P_i . x_t of the input trajectory.
class GesturalEncoder {
 public:
  explicit GesturalEncoder(EncoderConfig config = {});

  void init(std::mt19937_64& rng);
  std::vector<grad::Parameter*> parameters();
  const EncoderConfig& config() const { return config_; }

  // Count logits for one projected row, with stats [mean r, mean r^2, 1] and
  // basis [1, q, q^2] at class position q = c / C1. Zero weights give
  // uniform logits.
  std::vector<grad::Var> count_logits(grad::Session& s, const std::vector<grad::Var>& r);

  // All randomness (Gumbel and Gaussian) comes from `noise_seed`.
  EncodedScores encode(grad::Session& s, const FeatureMatrix& x, std::uint64_t noise_seed);

  grad::Parameter projection;  // K x channels
  grad::Parameter count_w;     // 3 x 3
  grad::Parameter index_w;     // 2 x 3: rows start/end, cols (a, b, c)
  grad::Parameter value_w;     // 2 x (channels + 2): rows mu/sigma

 private:
  EncoderConfig config_;
};

// Number of count classes for T frames: ceil(T/4), at least 1.
int count_classes(int frames);

}  // namespace dysalign::gestural
