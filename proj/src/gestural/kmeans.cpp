#include "dysalign/gestural/kmeans.hpp"

#include <limits>
#include <random>

#include "dysalign/core/error.hpp"

namespace dysalign::gestural {

namespace {

double sqdist(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

int nearest(const std::vector<double>& p, const std::vector<std::vector<double>>& centroids, double* dist = nullptr) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = sqdist(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  if (dist) *dist = best_d;
  return best;
}

}  // namespace

KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed, int max_iterations) {
  if (k < 1) throw InvalidArgument("k-means needs k >= 1");
  if (static_cast<int>(points.size()) < k)
    throw InvalidArgument("k-means needs at least k points (" + std::to_string(points.size()) + " < " +
                          std::to_string(k) + ")");
  const std::size_t dim = points[0].size();
  for (const auto& p : points)
    if (p.size() != dim) throw ShapeError("k-means points differ in dimension");

  std::mt19937_64 rng(seed);
  KMeansResult r;
  r.centroids.push_back(points[std::uniform_int_distribution<std::size_t>(0, points.size() - 1)(rng)]);
  std::vector<double> d2(points.size());
  while (static_cast<int>(r.centroids.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      nearest(points[i], r.centroids, &d2[i]);
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double target = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (pick = 0; pick + 1 < points.size(); ++pick) {
        target -= d2[pick];
        if (target < 0.0 && d2[pick] > 0.0) break;
      }
    } else {
      pick = std::uniform_int_distribution<std::size_t>(0, points.size() - 1)(rng);
    }
    r.centroids.push_back(points[pick]);
  }

  r.assignment.assign(points.size(), -1);
  for (int it = 0; it < max_iterations; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const int c = nearest(points[i], r.centroids);
      if (c != r.assignment[i]) changed = true;
      r.assignment[i] = c;
    }
    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      ++counts[r.assignment[i]];
      for (std::size_t d = 0; d < dim; ++d) sums[r.assignment[i]][d] += points[i][d];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its centroid
      for (std::size_t d = 0; d < dim; ++d) r.centroids[c][d] = sums[c][d] / counts[c];
    }
    double obj = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) obj += sqdist(points[i], r.centroids[r.assignment[i]]);
    r.objective.push_back(obj);
    if (!changed) break;
  }
  return r;
}

std::vector<std::vector<double>> extract_windows(const FeatureMatrix& x, int window, int stride) {
  if (window < 1 || stride < 1) throw InvalidArgument("window and stride must be positive");
  std::vector<std::vector<double>> out;
  const int T = static_cast<int>(x.cols()), D = static_cast<int>(x.rows());
  for (int t0 = 0; t0 + window <= T; t0 += stride) {
    std::vector<double> w(std::size_t(window) * D);
    for (int s = 0; s < window; ++s)
      for (int d = 0; d < D; ++d) w[std::size_t(s) * D + d] = x(d, t0 + s);
    out.push_back(std::move(w));
  }
  return out;
}

GestureDictionary kmeans_gestures(const std::vector<std::vector<double>>& windows, int window, int channels, int k,
                                  std::uint64_t seed) {
  for (const auto& w : windows)
    if (static_cast<int>(w.size()) != window * channels) throw ShapeError("window size differs from T' x channels");
  const KMeansResult r = kmeans(windows, k, seed);
  GestureDictionary g{window, channels, k, std::vector<double>(std::size_t(window) * channels * k)};
  for (int c = 0; c < k; ++c)
    for (int s = 0; s < window; ++s)
      for (int d = 0; d < channels; ++d) g.at(s, d, c) = r.centroids[c][std::size_t(s) * channels + d];
  return g;
}

}  // namespace dysalign::gestural
