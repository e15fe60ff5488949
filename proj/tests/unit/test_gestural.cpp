#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "dysalign/core/error.hpp"
#include "dysalign/gestural/encoder.hpp"
#include "dysalign/gestural/flow.hpp"
#include "dysalign/gestural/gumbel.hpp"
#include "dysalign/gestural/kl.hpp"
#include "dysalign/gestural/kmeans.hpp"
#include "dysalign/gestural/pit.hpp"
#include "dysalign/gestural/scores.hpp"
#include "dysalign/grad/check.hpp"
#include "dysalign/grad/optim.hpp"

using namespace dysalign;
using namespace dysalign::gestural;
using grad::Var;

namespace {

FeatureMatrix random_matrix(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<float> d(0.0f, static_cast<float>(scale));
  std::vector<float> data(std::size_t(rows) * cols);
  for (float& v : data) v = d(rng);
  return FeatureMatrix(rows, cols, data);
}

// Exact-value oracle for any field that should return u_t.
class OracleField : public VectorField {
 public:
  OracleField(double sigma_min, const std::vector<double>* x0, std::size_t frames)
      : sigma_min_(sigma_min), x0_(x0), frames_(frames) {}
  std::vector<Var> operator()(grad::Session& s, std::span<const Var>, std::span<const double>,
                              std::span<const double> xhat, std::span<const double>) override {
    std::vector<Var> out;
    for (std::size_t d = 0; d < xhat.size(); ++d)
      out.push_back(s.tape.constant(xhat[d] - (1 - sigma_min_) * (*x0_)[d * frames_ + frame_]));
    ++frame_;
    return out;
  }

 private:
  double sigma_min_;
  const std::vector<double>* x0_;
  std::size_t frames_;
  std::size_t frame_ = 0;
};

class ZeroField : public VectorField {
 public:
  std::vector<Var> operator()(grad::Session& s, std::span<const Var>, std::span<const double>,
                              std::span<const double> xhat, std::span<const double>) override {
    return std::vector<Var>(xhat.size(), s.tape.zero());
  }
};

}  // namespace

TEST_CASE("gumbel sample: symmetry, low temperature, errors") {
  grad::Tape t;
  std::vector<Var> logits(4, t.constant(0.3));
  std::vector<double> half(4, 0.5);
  auto g = gumbel_categorical_sample(t, logits, 2.0, half);
  for (Var v : g.soft) CHECK(t.value(v) == doctest::Approx(0.25).epsilon(1e-12));

  std::vector<double> lv = {0.1, 1.2, -0.4};
  std::vector<double> u = {0.3, 0.6, 0.9};
  auto cold = gumbel_categorical_sample(lv, 1e-6, u);
  int expect = 0;
  double best = -1e300;
  for (int c = 0; c < 3; ++c) {
    const double sc = lv[c] - std::log(-std::log(u[c]));
    if (sc > best) best = sc, expect = c;
  }
  CHECK(cold.hard == expect);
  for (int c = 0; c < 3; ++c) CHECK(cold.soft[c] == doctest::Approx(c == expect ? 1.0 : 0.0));

  CHECK_THROWS_AS(gumbel_categorical_sample(lv, 0.0, u), InvalidArgument);
  CHECK_THROWS_AS(gumbel_categorical_sample(lv, -1.0, u), InvalidArgument);
  std::vector<double> bad = {0.0, 0.5, 0.5};
  CHECK_THROWS_AS(gumbel_categorical_sample(lv, 1.0, bad), InvalidArgument);
}

TEST_CASE("gumbel hard-index frequencies match softmax over 100k draws") {
  const std::vector<double> logits = {0.5, -1.0, 1.5, 0.0};
  std::vector<double> p(logits.size());
  double z = 0;
  for (std::size_t c = 0; c < logits.size(); ++c) z += p[c] = std::exp(logits[c]);
  for (double& v : p) v /= z;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unif(std::nextafter(0.0, 1.0), 1.0);
  std::vector<int> counts(logits.size(), 0);
  const int draws = 100000;
  std::vector<double> u(logits.size());
  for (int n = 0; n < draws; ++n) {
    for (double& v : u) v = unif(rng);
    ++counts[gumbel_categorical_sample(logits, 2.0, u).hard];
  }
  for (std::size_t c = 0; c < p.size(); ++c) CHECK(std::abs(double(counts[c]) / draws - p[c]) < 0.01);
}

TEST_CASE("count classes and the stand-in count encoder") {
  CHECK(count_classes(24) == 6);
  CHECK(count_classes(4) == 1);
  CHECK(count_classes(5) == 2);
  GesturalEncoder enc({3, 2});
  grad::Session s;
  std::vector<Var> r;
  for (double v : {0.3, -1.0, 2.0, 0.5, 0.1, 0.0, 0.7, 1.1, -0.2, 0.4, 0.9, 1.3, 0.2, 0.6, 0.8, -0.5, 0.1, 0.2, 0.3,
                   0.4, 0.5, 0.6, 0.7, 0.8})
    r.push_back(s.tape.constant(v));
  auto logits = enc.count_logits(s, r);
  REQUIRE(logits.size() == 6);
  for (Var l : logits) CHECK(s.tape.value(l) == 0.0);
  CHECK_THROWS_AS(enc.count_logits(s, {}), InvalidArgument);
}

TEST_CASE("generate_spans sorts and merges") {
  using P = std::pair<int, int>;
  CHECK(generate_spans({{3, 1}}) == std::vector<P>{{1, 3}});
  CHECK(generate_spans({{5, 5}}) == std::vector<P>{{5, 5}});
  CHECK(generate_spans({{1, 4}, {3, 6}}) == std::vector<P>{{1, 6}});

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<P> draws;
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) draws.push_back({static_cast<int>(rng() % 30), static_cast<int>(rng() % 30)});
    // Oracle: mark covered frames, read maximal runs back.
    std::vector<bool> covered(30, false);
    for (auto [a, b] : draws)
      for (int f = std::min(a, b); f <= std::max(a, b); ++f) covered[f] = true;
    std::vector<P> expect;
    for (int f = 0; f < 30; ++f) {
      if (!covered[f]) continue;
      if (!expect.empty() && expect.back().second == f - 1)
        expect.back().second = f;
      else
        expect.push_back({f, f});
    }
    REQUIRE(generate_spans(draws) == expect);
  }
}

TEST_CASE("gestural scores enforce span invariants") {
  GesturalScores h(2, 8);
  CHECK_NOTHROW(h.set_row(0, {{0, 1, {1, 2}}, {4, 4, {3}}}));
  CHECK_THROWS_AS(h.set_row(1, {{0, 8, std::vector<double>(9, 1)}}), InvalidArgument);
  CHECK_THROWS_AS(h.set_row(1, {{3, 4, {1, 1}}, {0, 1, {1, 1}}}), InvalidArgument);
  CHECK_THROWS_AS(h.set_row(1, {{0, 1, {1, 1}}, {2, 3, {1, 1}}}), InvalidArgument);
  CHECK_THROWS_AS(h.set_row(1, {{0, 1, {1}}}), ShapeError);
  CHECK_THROWS_AS(h.set_row(1, {{0, 0, {1}}, {2, 2, {1}}, {4, 4, {1}}}), InvalidArgument);
  CHECK(h.at(0, 1) == 2.0);
  CHECK(h.at(0, 2) == 0.0);
}

TEST_CASE("encoder output is sparse and converts losslessly") {
  std::mt19937_64 rng(13);
  GesturalEncoder enc({6, 4});
  enc.init(rng);
  for (int trial = 0; trial < 10; ++trial) {
    const FeatureMatrix x = random_matrix(4, 12 + trial * 3, rng);
    grad::Session s;
    EncodedScores e = enc.encode(s, x, 100 + trial);
    const GesturalScores& h = e.scores;
    const std::vector<double> dense = h.to_dense();
    std::size_t nonzero = 0;
    for (double v : dense) nonzero += v != 0.0;
    CHECK(nonzero <= h.nonzero_bound());
    CHECK(GesturalScores::from_dense(h.gestures(), h.frames(), dense) == h);
    CHECK(GesturalScores::from_json(h.to_json()) == h);
    for (int i = 0; i < h.gestures(); ++i) {
      CHECK(static_cast<int>(h.row(i).size()) <= h.max_spans_per_row());
      CHECK(static_cast<int>(h.row(i).size()) >= 1);
      CHECK(static_cast<int>(h.row(i).size()) <= e.raw_counts[i]);
      for (int f = 0; f < h.frames(); ++f) CHECK(s.tape.value(e.dense[i][f]) == h.at(i, f));
    }
  }
}

TEST_CASE("value encoder: zero noise returns the means") {
  std::mt19937_64 rng(2);
  GesturalEncoder enc({3, 2, 2.0, 1.0, 0.0});
  enc.init(rng);
  grad::Session s;
  EncodedScores e = enc.encode(s, random_matrix(2, 9, rng), 5);
  std::vector<double> values;
  for (int i = 0; i < 3; ++i)
    for (const ScoreSpan& sp : e.scores.row(i)) values.insert(values.end(), sp.values.begin(), sp.values.end());
  REQUIRE(values.size() == e.value_mu.size());
  for (std::size_t n = 0; n < values.size(); ++n) CHECK(values[n] == s.tape.value(e.value_mu[n]));
}

TEST_CASE("KL terms") {
  grad::Tape t;
  CHECK(t.value(gaussian_kl_standard(t, t.constant(0.0), t.constant(1.0))) == 0.0);
  for (double mu : {-2.0, -0.3, 0.0, 0.7, 3.0})
    CHECK(t.value(gaussian_kl_standard(t, t.constant(mu), t.constant(1.0))) == doctest::Approx(mu * mu / 2));
  std::vector<Var> logits(5, t.constant(1.7));
  CHECK(std::abs(t.value(categorical_kl_uniform(t, grad::log_softmax(t, logits)))) < 1e-15);
  for (int n : {2, 3, 7}) {
    std::vector<double> onehot(n, 0.0);
    onehot[0] = 1.0;
    CHECK(categorical_kl_uniform(onehot) == doctest::Approx(std::log(n)));
    CHECK(categorical_kl_uniform(std::vector<double>(n, 1.0 / n)) == doctest::Approx(0.0));
  }
  // Saturated logits approach the one-hot value.
  std::vector<Var> sharp = {t.constant(60.0), t.constant(0.0), t.constant(0.0)};
  CHECK(t.value(categorical_kl_uniform(t, grad::log_softmax(t, sharp))) == doctest::Approx(std::log(3.0)));
}

TEST_CASE("KL loss of the encoder is non-negative") {
  std::mt19937_64 rng(4);
  GesturalEncoder enc({4, 3});
  enc.init(rng);
  for (int trial = 0; trial < 5; ++trial) {
    grad::Session s;
    EncodedScores e = enc.encode(s, random_matrix(3, 10, rng), trial);
    CHECK(s.tape.value(kl_loss(s.tape, e)) >= 0.0);
  }
}

TEST_CASE("flow path identities") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> d(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x0(7), x(7);
    for (double& v : x0) v = d(rng);
    for (double& v : x) v = d(rng);
    const auto p0 = flow_path(x0, x, 0.0, 0.01);
    const auto p1 = flow_path(x0, x, 1.0, 0.01);
    const double t = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
    const auto pt = flow_path(x0, x, t, 0.01);
    for (int i = 0; i < 7; ++i) {
      CHECK(p0.xt[i] == x0[i]);
      CHECK(p1.xt[i] == doctest::Approx(0.01 * x0[i] + x[i]).epsilon(1e-15));
      CHECK(pt.ut[i] == p0.ut[i]);
      const double h = 1e-3;
      const double fd = (flow_path(x0, x, t + h, 0.01).xt[i] - flow_path(x0, x, t - h, 0.01).xt[i]) / (2 * h);
      CHECK(fd == doctest::Approx(pt.ut[i]).epsilon(1e-8));
    }
  }
  std::vector<double> a(2), b(3);
  CHECK_THROWS_AS(flow_path(a, b, 0.5, 0.01), ShapeError);
  CHECK_THROWS_AS(flow_path(a, a, 1.5, 0.01), InvalidArgument);
}

TEST_CASE("flow loss with oracle and zero fields") {
  std::mt19937_64 rng(22);
  const FeatureMatrix xhat = random_matrix(3, 5, rng);
  std::vector<double> x0(15);
  std::normal_distribution<double> d(0, 1);
  for (double& v : x0) v = d(rng);
  FlowConfig cfg{0.01, 4, 6};
  const double t = 0.37;

  grad::Session s;
  std::vector<std::vector<Var>> h(2, std::vector<Var>(5, s.tape.zero()));
  OracleField oracle(cfg.sigma_min, &x0, 5);
  CHECK(s.tape.value(flow_loss(s, h, xhat, x0, t, cfg, oracle)) == 0.0);

  ZeroField zero;
  double expect = 0;
  for (int f = 0; f < 5; ++f)
    for (int dd = 0; dd < 3; ++dd) {
      const double u = xhat(dd, f) - 0.99 * x0[dd * 5 + f];
      expect += u * u;
    }
  CHECK(s.tape.value(flow_loss(s, h, xhat, x0, t, cfg, zero)) == doctest::Approx(expect / 5).epsilon(1e-12));

  std::vector<std::vector<Var>> wrong(2, std::vector<Var>(4, s.tape.zero()));
  CHECK_THROWS_AS(flow_loss(s, wrong, xhat, x0, t, cfg, zero), ShapeError);
  DenseVectorField field(3, 3, cfg);
  CHECK_THROWS_AS(flow_loss(s, h, xhat, x0, t, cfg, field), ShapeError);
}

TEST_CASE("flow loss gradient through encoder and field on a 3x5 toy") {
  std::mt19937_64 rng(23);
  FlowConfig cfg{0.01, 3, 4};
  EncoderConfig ec{3, 2};
  ec.straight_through = false;
  GesturalEncoder enc(ec);
  enc.init(rng);
  DenseVectorField field(3, 2, cfg);
  field.init(rng);
  const FeatureMatrix x = random_matrix(2, 5, rng);
  const FeatureMatrix xhat = random_matrix(2, 5, rng);
  std::vector<double> x0(10);
  std::normal_distribution<double> d(0, 1);
  for (double& v : x0) v = d(rng);
  std::vector<grad::Parameter*> params = enc.parameters();
  for (auto* p : field.parameters()) params.push_back(p);
  grad::LossFn loss = [&](grad::Session& s) {
    EncodedScores e = enc.encode(s, x, 77);
    return flow_loss(s, e.dense, xhat, x0, 0.4, cfg, field);
  };
  CHECK(grad::gradient_check(loss, params).max_relative_error < 1e-4);
}

TEST_CASE("KL loss gradient on a toy encoder") {
  std::mt19937_64 rng(24);
  GesturalEncoder enc({3, 2});
  enc.init(rng);
  const FeatureMatrix x = random_matrix(2, 8, rng);
  grad::LossFn loss = [&](grad::Session& s) { return kl_loss(s.tape, enc.encode(s, x, 5)); };
  CHECK(grad::gradient_check(loss, enc.parameters()).max_relative_error < 1e-4);
}

TEST_CASE("k-means") {
  std::mt19937_64 rng(30);
  std::normal_distribution<double> noise(0, 0.05);
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 40; ++i) pts.push_back({noise(rng), noise(rng)});
  for (int i = 0; i < 40; ++i) pts.push_back({10 + noise(rng), -5 + noise(rng)});

  SUBCASE("K=1 gives the mean") {
    auto r = kmeans(pts, 1, 1);
    double mx = 0, my = 0;
    for (auto& p : pts) mx += p[0], my += p[1];
    CHECK(r.centroids[0][0] == doctest::Approx(mx / pts.size()));
    CHECK(r.centroids[0][1] == doctest::Approx(my / pts.size()));
  }
  SUBCASE("two separated clusters are recovered") {
    auto r = kmeans(pts, 2, 9);
    auto c = r.centroids;
    std::sort(c.begin(), c.end());
    CHECK(std::abs(c[0][0]) < 0.05);
    CHECK(std::abs(c[1][0] - 10) < 0.05);
    CHECK(std::abs(c[1][1] + 5) < 0.05);
  }
  SUBCASE("objective never increases and runs are deterministic") {
    std::vector<std::vector<double>> blob;
    std::normal_distribution<double> d(0, 1);
    for (int i = 0; i < 300; ++i) blob.push_back({d(rng), d(rng), d(rng)});
    auto r = kmeans(blob, 7, 3);
    for (std::size_t i = 1; i < r.objective.size(); ++i) CHECK(r.objective[i] <= r.objective[i - 1] + 1e-9);
    CHECK(kmeans(blob, 7, 3).centroids == r.centroids);
  }
  CHECK_THROWS_AS(kmeans(pts, 81, 1), InvalidArgument);
}

TEST_CASE("kmeans_gestures lays centroids out as G[s][d][k]") {
  std::mt19937_64 rng(31);
  const FeatureMatrix x = random_matrix(12, 60, rng);
  auto windows = extract_windows(x, 10, 5);
  CHECK(windows.size() == 11);
  auto g = kmeans_gestures(windows, 10, 12, 1, 0);
  for (int s = 0; s < 10; ++s)
    for (int d = 0; d < 12; ++d) {
      double mean = 0;
      for (auto& w : windows) mean += w[s * 12 + d];
      CHECK(g.at(s, d, 0) == doctest::Approx(mean / windows.size()));
    }
  CHECK_THROWS_AS(kmeans_gestures(windows, 10, 12, 12, 0), InvalidArgument);
}

TEST_CASE("PIT reconstruction") {
  std::mt19937_64 rng(40);
  SUBCASE("all-zero H") {
    GesturalScores h(2, 6);
    GestureDictionary g{3, 12, 2, std::vector<double>(72, 1.0)};
    const FeatureMatrix x = random_matrix(12, 6, rng);
    for (double v : pit_reconstruct(h, g)) CHECK(v == 0.0);
    double norm = 0;
    for (float v : x.data()) norm += double(v) * v;
    CHECK(pit_loss(h, g, x) == doctest::Approx(norm));
  }
  SUBCASE("identity kernel replicates H on every channel") {
    GesturalScores h(1, 5);
    h.set_row(0, {{1, 2, {0.5, -1.5}}, {4, 4, {2.0}}});
    GestureDictionary g{1, 12, 1, std::vector<double>(12, 1.0)};
    auto rec = pit_reconstruct(h, g);
    for (int d = 0; d < 12; ++d)
      for (int f = 0; f < 5; ++f) CHECK(rec[d * 5 + f] == h.at(0, f));
  }
  SUBCASE("random case matches dense convolution") {
    for (int trial = 0; trial < 20; ++trial) {
      const int K = 2, W = 3, T = 8, C = 12;
      std::vector<double> dense(K * T, 0.0);
      std::normal_distribution<double> d(0, 1);
      for (double& v : dense)
        if (rng() % 2) v = d(rng);
      auto h = GesturalScores::from_dense(K, T, dense);
      GestureDictionary g{W, C, K, std::vector<double>(W * C * K)};
      for (double& v : g.g) v = d(rng);
      // Oracle: sum over source frames of a scattered kernel, dense H.
      std::vector<double> oracle(C * T, 0.0);
      for (int t = 0; t < T; ++t)
        for (int dd = 0; dd < C; ++dd)
          for (int k = 0; k < K; ++k)
            for (int tp = 0; tp <= t; ++tp)
              if (t - tp < W) oracle[dd * T + t] += g.g[((t - tp) * C + dd) * K + k] * dense[k * T + tp];
      auto rec = pit_reconstruct(h, g);
      for (int i = 0; i < C * T; ++i) REQUIRE(std::abs(rec[i] - oracle[i]) < 1e-10);
    }
  }
}

TEST_CASE("PIT loss on the tape agrees and passes the gradient check") {
  std::mt19937_64 rng(41);
  EncoderConfig ec{3, 12};
  ec.straight_through = false;
  GesturalEncoder enc(ec);
  enc.init(rng);
  const FeatureMatrix x = random_matrix(12, 9, rng);
  GestureDictionary g{3, 12, 3, std::vector<double>(3 * 12 * 3)};
  std::normal_distribution<double> d(0, 0.3);
  for (double& v : g.g) v = d(rng);
  grad::Session s;
  EncodedScores e = enc.encode(s, x, 3);
  CHECK(s.tape.value(pit_loss(s, e.dense, g, x)) == doctest::Approx(pit_loss(e.scores, g, x)).epsilon(1e-12));
  grad::LossFn loss = [&](grad::Session& ss) { return pit_loss(ss, enc.encode(ss, x, 3).dense, g, x); };
  CHECK(grad::gradient_check(loss, enc.parameters()).max_relative_error < 1e-4);
}

TEST_CASE("joint KL + flow objective decreases within 50 Adam steps") {
  std::mt19937_64 rng(50);
  FlowConfig cfg{0.01, 4, 8};
  GesturalEncoder enc({4, 3});
  enc.init(rng);
  DenseVectorField field(4, 3, cfg);
  field.init(rng);
  const FeatureMatrix x = random_matrix(3, 12, rng);
  const FeatureMatrix xhat = random_matrix(3, 12, rng);
  std::vector<double> x0(36);
  std::normal_distribution<double> d(0, 1);
  for (double& v : x0) v = d(rng);
  std::vector<grad::Parameter*> params = enc.parameters();
  for (auto* p : field.parameters()) params.push_back(p);
  grad::LossFn loss = [&](grad::Session& s) {
    EncodedScores e = enc.encode(s, x, 9);
    return s.tape.add(kl_loss(s.tape, e), flow_loss(s, e.dense, xhat, x0, 0.5, cfg, field));
  };
  grad::Adam adam({1e-3, 0.9, 10});
  const double first = grad::evaluate(loss, params);
  double last = first;
  for (int step = 0; step < 50; ++step) {
    grad::evaluate(loss, params);
    adam.step(params);
    last = grad::evaluate(loss, params);
  }
  CHECK(last < first);
}
