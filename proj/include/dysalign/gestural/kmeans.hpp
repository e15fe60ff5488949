#pragma once

#include <cstdint>
#include <vector>

#include "dysalign/core/matrix.hpp"

namespace dysalign::gestural {

// G[s][d][k], window T' x channels x K.
struct GestureDictionary {
  int window = 10;
  int channels = 12;
  int gestures = 0;
  std::vector<double> g;

  double at(int s, int d, int k) const { return g[(std::size_t(s) * channels + d) * gestures + k]; }
  double& at(int s, int d, int k) { return g[(std::size_t(s) * channels + d) * gestures + k]; }
};

struct KMeansResult {
  std::vector<std::vector<double>> centroids;
  std::vector<int> assignment;
  std::vector<double> objective;  // after each Lloyd iteration
};

// k-means++ seeding then Lloyd iterations until assignments stop changing.
KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed, int max_iterations = 100);

// Window s, channel d of frame t0 + s flattened as s * channels + d.
std::vector<std::vector<double>> extract_windows(const FeatureMatrix& x, int window, int stride);

GestureDictionary kmeans_gestures(const std::vector<std::vector<double>>& windows, int window, int channels, int k,
                                  std::uint64_t seed);

}  // namespace dysalign::gestural
