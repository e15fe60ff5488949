#pragma once

#include <map>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "dysalign/align/grid.hpp"
#include "dysalign/core/matrix.hpp"
#include "dysalign/grad/layers.hpp"

namespace dysalign::align {

// Learned Gaussian token embeddings N(mu_c, sigma_c^2), one row per alphabet
// symbol; sigma = softplus(sigma_raw).
class TokenEmbeddings {
 public:
  TokenEmbeddings(int symbols, int dim);

  void init(std::mt19937_64& rng);
  std::vector<grad::Parameter*> parameters() { return {&mu, &sigma_raw}; }
  int symbols() const { return static_cast<int>(mu.rows); }
  int dim() const { return static_cast<int>(mu.cols); }

  // C^S = mu + sigma * noise for every symbol; noise is symbols x dim.
  std::vector<std::vector<grad::Var>> sample(grad::Session& s, std::span<const double> noise);
  std::vector<double> draw_noise(std::mt19937_64& rng) const;

  grad::Parameter mu;
  grad::Parameter sigma_raw;
};

// y^{i,j} = softmax_j(tau_i . C^S_{ref_j}); tau is D x T.
VarGrid emission_grid(grad::Tape& t, const FeatureMatrix& tau, const std::vector<std::vector<grad::Var>>& cs,
                      std::span<const int> reference);

// log softmax over the whole alphabet of tau_i . C^S_c, T x symbols.
VarGrid alphabet_log_posteriors(grad::Tape& t, const FeatureMatrix& tau,
                                const std::vector<std::vector<grad::Var>>& cs);

// phi(m | n) = sigmoid(C^S_m . (W C^S_n + b)), memoised per session.
class TransitionModel {
 public:
  explicit TransitionModel(int dim);

  void init(std::mt19937_64& rng);
  std::vector<grad::Parameter*> parameters() { return {&w, &b}; }

  class Cache {
   public:
    friend class TransitionModel;

   private:
    std::map<int, std::vector<grad::Var>> projected_;
    std::map<std::pair<int, int>, grad::Var> phi_;
  };

  grad::Var phi(grad::Session& s, Cache& cache, const std::vector<std::vector<grad::Var>>& cs, int m, int n);

  grad::Parameter w;
  grad::Parameter b;
};

}  // namespace dysalign::align
