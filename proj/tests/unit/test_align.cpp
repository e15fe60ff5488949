#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "dysalign/align/csa.hpp"
#include "dysalign/align/ctc.hpp"
#include "dysalign/align/emission.hpp"
#include "dysalign/align/fcsa.hpp"
#include "dysalign/align/lcs.hpp"
#include "dysalign/align/losses.hpp"
#include "dysalign/align/monotonic.hpp"
#include "dysalign/core/error.hpp"
#include "dysalign/grad/check.hpp"

using namespace dysalign;
using namespace dysalign::align;
using grad::Var;

namespace {

Grid random_rows(int T, int L, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Grid g(T, L);
  for (int i = 0; i < T; ++i) {
    double z = 0;
    for (int j = 0; j < L; ++j) z += g(i, j) = u(rng);
    for (int j = 0; j < L; ++j) g(i, j) /= z;
  }
  return g;
}

// Sum over every stay-or-advance path from (0,0) ending at (i, j).
Grid brute_monotonic(const Grid& y) {
  Grid out(y.frames, y.tokens, 0.0);
  std::function<void(int, int, double)> walk = [&](int i, int j, double p) {
    out(i, j) += p;
    if (i + 1 == y.frames) return;
    walk(i + 1, j, p * y(i + 1, j));
    if (j + 1 < y.tokens) walk(i + 1, j + 1, p * y(i + 1, j + 1));
  };
  walk(0, 0, y(0, 0));
  return out;
}

// Enumerates all V^T frame labelings and keeps those collapsing to target.
double brute_ctc(const Grid& probs, const std::vector<int>& target, int blank) {
  const int T = probs.frames, V = probs.tokens;
  std::vector<int> path(T, 0);
  double total = 0;
  while (true) {
    std::vector<int> collapsed;
    int prev = -1;
    for (int c : path) {
      if (c != prev && c != blank) collapsed.push_back(c);
      prev = c;
    }
    if (collapsed == target) {
      double p = 1;
      for (int i = 0; i < T; ++i) p *= probs(i, path[i]);
      total += p;
    }
    int pos = 0;
    while (pos < T && ++path[pos] == V) path[pos++] = 0;
    if (pos == T) break;
  }
  return total;
}

FeatureMatrix random_features(int D, int T, std::mt19937_64& rng) {
  std::normal_distribution<float> d(0, 1);
  std::vector<float> v(std::size_t(D) * T);
  for (float& x : v) x = d(rng);
  return FeatureMatrix(D, T, v);
}

}  // namespace

TEST_CASE("emission grid") {
  std::mt19937_64 rng(1);
  TokenEmbeddings emb(5, 4);
  emb.init(rng);
  const FeatureMatrix tau = random_features(4, 6, rng);
  const std::vector<double> noise = emb.draw_noise(rng);

  grad::Session s;
  auto cs = emb.sample(s, noise);
  const std::vector<int> one = {2};
  for (Var v : emission_grid(s.tape, tau, cs, one).cells) CHECK(s.tape.value(v) == 1.0);

  const std::vector<int> ref = {0, 3, 1};
  const Grid y = values(s.tape, emission_grid(s.tape, tau, cs, ref));
  for (int i = 0; i < y.frames; ++i) {
    double sum = 0;
    for (int j = 0; j < y.tokens; ++j) {
      CHECK(y(i, j) > 0.0);
      CHECK(y(i, j) < 1.0);
      sum += y(i, j);
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
  grad::Session s2;
  CHECK(values(s2.tape, emission_grid(s2.tape, tau, emb.sample(s2, noise), ref)).cells == y.cells);

  SUBCASE("saturation") {
    grad::Tape t;
    std::vector<std::vector<Var>> c = {{t.constant(1), t.constant(0)}, {t.constant(0), t.constant(1)}};
    const FeatureMatrix big(2, 1, {0.0f, 50.0f});
    const std::vector<int> r2 = {0, 1};
    const Grid g = values(t, emission_grid(t, big, c, r2));
    CHECK(g(0, 1) > 1 - 1e-15);
  }
  CHECK_THROWS_AS(emission_grid(s.tape, random_features(3, 2, rng), cs, ref), ShapeError);
}

TEST_CASE("monotonic forward: hand cases") {
  Grid y1(1, 1, 0.7);
  CHECK(monotonic_forward(y1)(0, 0) == doctest::Approx(0.7));
  Grid y2(2, 1);
  y2(0, 0) = 0.3;
  y2(1, 0) = 0.6;
  CHECK(monotonic_forward(y2)(1, 0) == doctest::Approx(0.18));
}

TEST_CASE("monotonic forward equals path enumeration for T<=6, L<=4") {
  std::mt19937_64 rng(2);
  for (int T = 1; T <= 6; ++T)
    for (int L = 1; L <= 4; ++L)
      for (int trial = 0; trial < 10; ++trial) {
        const Grid y = random_rows(T, L, rng);
        const Grid a = monotonic_forward(y);
        const Grid b = brute_monotonic(y);
        for (std::size_t n = 0; n < a.cells.size(); ++n) REQUIRE(std::abs(a.cells[n] - b.cells[n]) < 1e-10);
      }
}

TEST_CASE("CTC loss equals blank-path enumeration for T<=5, |target|<=3") {
  std::mt19937_64 rng(3);
  const int V = 4, blank = 3;
  CHECK(ctc_min_frames(std::vector<int>{0, 0, 1}) == 4);
  for (int T = 1; T <= 5; ++T)
    for (int len = 1; len <= 3; ++len)
      for (int trial = 0; trial < 8; ++trial) {
        std::vector<int> target(len);
        for (int& c : target) c = static_cast<int>(rng() % 3);
        const Grid probs = random_rows(T, V, rng);
        grad::Tape t;
        Grid logp = probs;
        for (double& v : logp.cells) v = std::log(v);
        if (T < ctc_min_frames(target)) {
          CHECK_THROWS_AS(ctc_loss(t, constants(t, logp), target, blank), InvalidArgument);
          continue;
        }
        const double loss = t.value(ctc_loss(t, constants(t, logp), target, blank));
        REQUIRE(std::abs(loss + std::log(brute_ctc(probs, target, blank))) < 1e-10);
      }
  Grid one(1, 4, 0.25);
  one(0, 1) = 0.4;
  grad::Tape t;
  Grid lp = one;
  for (double& v : lp.cells) v = std::log(v);
  CHECK(t.value(ctc_loss(t, constants(t, lp), std::vector<int>{1}, blank)) == doctest::Approx(-std::log(0.4)));
}

TEST_CASE("CTC gradient matches central differences") {
  std::mt19937_64 rng(4);
  grad::Parameter logits("logits", 5, 4);
  for (double& v : logits.values) v = std::normal_distribution<double>(0, 1)(rng);
  const std::vector<int> target = {0, 2, 2};
  grad::LossFn loss = [&](grad::Session& s) {
    const grad::Binding& b = s.bind(logits);
    VarGrid lp(5, 4);
    for (int i = 0; i < 5; ++i) {
      auto row = grad::log_softmax(s.tape, b.row(i));
      for (int c = 0; c < 4; ++c) lp(i, c) = row[c];
    }
    return ctc_loss(s.tape, lp, target, 3);
  };
  CHECK(grad::gradient_check(loss, {&logits}).max_relative_error < 1e-5);
}

TEST_CASE("CSA recursion") {
  std::mt19937_64 rng(5);
  auto ones = [](int, int) { return 1.0; };

  SUBCASE("2x2 hand unrolled") {
    Grid y(2, 2);
    y(0, 0) = 0.6, y(0, 1) = 0.4, y(1, 0) = 0.3, y(1, 1) = 0.7;
    auto tr = [](int m, int n) { return m == 0 && n == 1 ? 0.8 : 0.0; };
    CsaOptions o{0.5};
    const Grid a = csa_forward(y, tr, o);
    CHECK(a(0, 0) == 1.0);
    CHECK(a(0, 1) == 0.0);
    CHECK(a(1, 0) == 1.0);
    CHECK(std::abs(a(1, 1) - (0.0 + 0.5 * 1.0 * 0.8 * 0.7)) < 1e-12);
    auto trb = [](int m, int n) { return m == 0 && n == 1 ? 0.9 : 0.0; };
    const Grid b = csa_backward(y, trb, o);
    CHECK(b(1, 1) == 1.0);
    CHECK(b(1, 0) == 0.0);
    CHECK(b(0, 1) == 1.0);
    CHECK(std::abs(b(0, 0) - (0.0 + 0.5 * 1.0 * 0.9 * 0.6)) < 1e-12);
  }

  SUBCASE("vanishing decay leaves only the copy term") {
    const Grid y = random_rows(5, 4, rng);
    const Grid a = csa_forward(y, ones, {1e-12});
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 4; ++j) CHECK(std::abs(a(i, j) - (j == 0 ? 1.0 : 0.0)) < 1e-11);
  }

  SUBCASE("k=1 with unit transition shares the advance term of the monotonic DP") {
    const Grid y = random_rows(5, 4, rng);
    const Grid a = csa_forward(y, ones, {0.999999, 1});
    const Grid m = monotonic_forward(y);
    for (int i = 1; i < 5; ++i)
      for (int j = 1; j < 4; ++j) {
        CHECK(std::abs((a(i, j) - a(i - 1, j)) - 0.999999 * a(i - 1, j - 1) * y(i, j)) < 1e-12);
        CHECK(std::abs((m(i, j) - m(i - 1, j) * y(i, j)) - m(i - 1, j - 1) * y(i, j)) < 1e-12);
      }
  }

  SUBCASE("full sum adds the decayed skips") {
    const Grid y = random_rows(3, 4, rng);
    const Grid a = csa_forward(y, ones, {0.5});
    const double expect = a(1, 3) + (0.5 * a(1, 2) + 0.25 * a(1, 1) + 0.125 * a(1, 0)) * y(2, 3);
    CHECK(std::abs(a(2, 3) - expect) < 1e-12);
  }
  CHECK_THROWS_AS(csa_forward(Grid(2, 2, 0.5), ones, {1.5}), InvalidArgument);
}

namespace {

struct FcsaFixture {
  std::mt19937_64 rng{6};
  FcsaNetworks nets{4};
  Grid y;
  Grid phi;

  FcsaFixture(int T, int L) {
    nets.init(rng);
    y = random_rows(T, L, rng);
    phi = Grid(L, L);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (double& v : phi.cells) v = u(rng);
  }
};

}  // namespace

TEST_CASE("FCSA structural properties") {
  for (int T = 1; T <= 6; ++T)
    for (int L = 1; L <= 5; ++L) {
      FcsaFixture fx(T, L);
      std::mt19937_64 krng(T * 10 + L);
      const KSamples k = KSamples::draw(T, L, krng);
      grad::Session s;
      VarGrid y = constants(s.tape, fx.y);
      PositionTransition phi = [&](int m, int n) { return s.tape.constant(fx.phi(m, n)); };
      const FcsaGrid a = fcsa_forward(s, fx.nets, y, phi, k);
      const FcsaGrid b = fcsa_backward(s, fx.nets, y, phi, k);
      CHECK(s.tape.value(a.scores(0, 0)) == 1.0);
      CHECK(s.tape.value(b.scores(T - 1, L - 1)) == 1.0);
      for (const FcsaGrid* g : {&a, &b})
        for (int i = 0; i < T; ++i)
          for (int j = 0; j < L; ++j) {
            const auto& st = g->stacks(i, j);
            REQUIRE(s.tape.value(st[4]) == 1.0);
            REQUIRE(s.tape.value(st[5]) == 1e-5);
            for (Var v : st) {
              REQUIRE(s.tape.value(v) > 0.0);
              REQUIRE(s.tape.value(v) <= 1.0);
            }
            REQUIRE(s.tape.value(g->scores(i, j)) > 0.0);
            REQUIRE(s.tape.value(g->scores(i, j)) <= 1.0);
          }
    }
}

TEST_CASE("FCSA is deterministic under a frozen seed") {
  auto run = [] {
    FcsaFixture fx(5, 4);
    std::mt19937_64 krng(99);
    const KSamples k = KSamples::draw(5, 4, krng);
    grad::Session s;
    VarGrid y = constants(s.tape, fx.y);
    PositionTransition phi = [&](int m, int n) { return s.tape.constant(fx.phi(m, n)); };
    return values(s.tape, fcsa_forward(s, fx.nets, y, phi, k).scores).cells;
  };
  CHECK(run() == run());
}

TEST_CASE("FCSA backward equals the forward pass on mirrored inputs") {
  for (int T = 1; T <= 6; ++T)
    for (int L = 1; L <= 5; ++L) {
      FcsaFixture fx(T, L);
      std::mt19937_64 krng(T * 31 + L);
      const KSamples k = KSamples::draw(T, L, krng);
      KSamples mk{T, L, std::vector<std::pair<int, int>>(T * L), std::vector<std::pair<int, int>>(T * L, {0, 0})};
      Grid my(T, L);
      for (int i = 0; i < T; ++i)
        for (int j = 0; j < L; ++j) {
          my(T - 1 - i, L - 1 - j) = fx.y(i, j);
          mk.forward[(T - 1 - i) * L + (L - 1 - j)] = k.backward[i * L + j];
        }
      grad::Session s;
      PositionTransition phi = [&](int m, int n) { return s.tape.constant(fx.phi(m, n)); };
      PositionTransition mphi = [&](int m, int n) { return s.tape.constant(fx.phi(L - 1 - m, L - 1 - n)); };
      const Grid beta = values(s.tape, fcsa_backward(s, fx.nets, constants(s.tape, fx.y), phi, k).scores);
      const Grid mirrored = values(s.tape, fcsa_forward(s, fx.nets, constants(s.tape, my), mphi, mk).scores);
      for (int i = 0; i < T; ++i)
        for (int j = 0; j < L; ++j) REQUIRE(std::abs(beta(i, j) - mirrored(T - 1 - i, L - 1 - j)) < 1e-10);
    }
}

TEST_CASE("k samples respect their bounds") {
  std::mt19937_64 rng(7);
  const KSamples k = KSamples::draw(9, 7, rng);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 7; ++j) {
      auto [a, b] = k.forward[i * 7 + j];
      if (KSamples::forward_bound(i, j) < 1) {
        CHECK(a == 0);
      } else {
        CHECK(1 <= a);
        CHECK(a <= b);
        CHECK(b <= std::min(i + 1, j + 1) - 1);
      }
      auto [c, d] = k.backward[i * 7 + j];
      if (c) {
        CHECK(c <= d);
        CHECK(d <= std::min(9 - (i + 1), 7 - (j + 1)) - 1);
      }
    }
  KSamples bad = k;
  bad.forward[8 * 7 + 6] = {7, 7};
  grad::Session s;
  FcsaNetworks nets;
  VarGrid y = constants(s.tape, Grid(9, 7, 0.1));
  PositionTransition phi = [&](int, int) { return s.tape.constant(0.5); };
  CHECK_THROWS_AS(fcsa_forward(s, nets, y, phi, bad), InvalidArgument);
}

TEST_CASE("pre-alignment loss") {
  grad::Tape t;
  VarGrid ones = constants(t, Grid(3, 2, 1.0));
  CHECK(t.value(pre_alignment_loss(t, ones, ones, ones)) == -1.0);
  std::mt19937_64 rng(8);
  Grid a = random_rows(4, 3, rng), b = random_rows(4, 3, rng), y = random_rows(4, 3, rng);
  Grid b2 = b;
  for (double& v : b2.cells) v *= 2;
  const double l1 = t.value(pre_alignment_loss(t, constants(t, a), constants(t, b), constants(t, y)));
  const double l2 = t.value(pre_alignment_loss(t, constants(t, a), constants(t, b2), constants(t, y)));
  CHECK(l2 == doctest::Approx(2 * l1).epsilon(1e-14));
  double oracle = 0;
  for (std::size_t n = 0; n < y.cells.size(); ++n) oracle -= a.cells[n] * b.cells[n] / y.cells[n];
  CHECK(l1 == doctest::Approx(oracle / 12).epsilon(1e-14));
  std::vector<bool> mask(12, false);
  mask[5] = true;
  CHECK(t.value(pre_alignment_loss(t, constants(t, a), constants(t, b), constants(t, y), &mask)) ==
        doctest::Approx(-a.cells[5] * b.cells[5] / y.cells[5]));
}

TEST_CASE("pre-alignment loss gradient through f1, f2, transition and emissions on a 4x3 grid") {
  std::mt19937_64 rng(9);
  const int D = 5;
  TokenEmbeddings emb(6, D);
  emb.init(rng);
  for (double& v : emb.sigma_raw.values) v = grad::inverse_softplus(0.3);
  TransitionModel trans(D);
  trans.init(rng);
  for (double& v : trans.w.values) v *= 5;
  FcsaNetworks nets(3);
  nets.init(rng);
  const FeatureMatrix tau = random_features(D, 4, rng);
  const std::vector<double> noise = emb.draw_noise(rng);
  const std::vector<int> ref = {1, 4, 2};
  const KSamples k = KSamples::draw(4, 3, rng);
  std::vector<grad::Parameter*> params = emb.parameters();
  for (auto* p : trans.parameters()) params.push_back(p);
  for (auto* p : nets.parameters()) params.push_back(p);
  grad::LossFn loss = [&](grad::Session& s) {
    auto cs = emb.sample(s, noise);
    VarGrid y = emission_grid(s.tape, tau, cs, ref);
    TransitionModel::Cache cache;
    PositionTransition phi = [&](int m, int n) { return trans.phi(s, cache, cs, ref[m], ref[n]); };
    auto a = fcsa_forward(s, nets, y, phi, k);
    auto b = fcsa_backward(s, nets, y, phi, k);
    return pre_alignment_loss(s.tape, a.scores, b.scores, y);
  };
  CHECK(grad::gradient_check(loss, params).max_relative_error < 1e-4);
}

TEST_CASE("LCS sampler reproduces the worked alignment") {
  // text P L IY Z; speech P P L EY SIL EY Z; oracle emissions.
  const int T = 7, L = 4;
  Grid y(T, L, 0.01);
  auto set = [&](int i, int j) { y(i, j) = 0.97; };
  set(0, 0);
  set(1, 0);
  set(2, 1);
  set(3, 2);
  for (int j = 0; j < L; ++j) y(4, j) = 0.25;
  set(5, 2);
  set(6, 3);
  const LcsAlignment r = sample_alignment(y, std::vector<double>(L, 1.0), 0.5);
  CHECK(r.spans.valid());
  REQUIRE(r.spans.spans.size() == 4);
  CHECK(r.spans.spans[0] == FrameSpan{0, 1});
  CHECK(r.spans.spans[1] == FrameSpan{2, 2});
  CHECK(r.spans.spans[2] == FrameSpan{3, 5});
  CHECK(r.spans.spans[3] == FrameSpan{6, 6});
  CHECK_FALSE(r.frame_token[0].has_value());
  CHECK(r.frame_token[1] == 0);
  CHECK_FALSE(r.frame_token[3].has_value());
  CHECK(r.frame_token[5] == 2);
}

TEST_CASE("LCS sampler edge cases and invariants") {
  Grid one(1, 1, 1.0);
  const auto r = sample_alignment(one, {1.0}, 0.5);
  CHECK(r.frame_token[0] == 0);
  CHECK(r.spans.spans[0] == FrameSpan{0, 0});

  std::mt19937_64 rng(10);
  const Grid y = random_rows(6, 3, rng);
  const auto none = sample_alignment(y, {1.0, 1.0, 1.0}, 1.0);
  for (auto& f : none.frame_token) CHECK_FALSE(f.has_value());
  for (auto& sp : none.spans.spans) CHECK_FALSE(sp.has_value());

  for (int trial = 0; trial < 500; ++trial) {
    const int T = 1 + static_cast<int>(rng() % 12), L = 1 + static_cast<int>(rng() % 6);
    const Grid g = random_rows(T, L, rng);
    std::vector<double> tr(L);
    for (double& v : tr) v = std::uniform_real_distribution<double>(0.3, 1.0)(rng);
    const auto a = sample_alignment(g, tr, std::uniform_real_distribution<double>(0.05, 0.6)(rng));
    REQUIRE(a.spans.valid());
  }
}

TEST_CASE("consistency loss") {
  grad::Tape t;
  SUBCASE("equal similarities give 1/N per unit in literal mode") {
    const FeatureMatrix tau(2, 5, std::vector<float>(10, 1.0f));
    std::vector<std::vector<Var>> emb = {{t.constant(0.3), t.constant(0.2)}, {t.constant(0.3), t.constant(0.2)}};
    Alignment a{5, {FrameSpan{0, 1}, FrameSpan{2, 2}}};
    const auto r = consistency_loss(t, a, tau, emb, ConsistencyMode::Literal);
    CHECK(t.value(r.loss) == doctest::Approx(1.0 / 3 + 1.0 / 4));
  }
  SUBCASE("contrastive loss vanishes as aligned similarity grows") {
    const FeatureMatrix tau(1, 3, {50.0f, 0.0f, 0.0f});
    std::vector<std::vector<Var>> emb = {{t.constant(20.0)}};
    Alignment a{3, {FrameSpan{0, 0}}};
    CHECK(t.value(consistency_loss(t, a, tau, emb, ConsistencyMode::Contrastive).loss) < 1e-300);
  }
  SUBCASE("2 words, 4 frames, hand summed") {
    const FeatureMatrix tau(2, 4, {1.0f, 0.5f, -1.0f, 2.0f, 0.0f, 1.0f, 1.0f, -0.5f});
    const double c0[2] = {0.4, -0.2}, c1[2] = {-0.3, 0.6};
    std::vector<std::vector<Var>> emb = {{t.constant(c0[0]), t.constant(c0[1])},
                                         {t.constant(c1[0]), t.constant(c1[1])}};
    Alignment a{4, {FrameSpan{0, 1}, FrameSpan{2, 3}}};
    auto sim = [&](int f, const double* c) { return tau(0, f) * c[0] + tau(1, f) * c[1]; };
    const double lit = 0.5 * (std::exp(sim(0, c0)) + std::exp(sim(1, c0))) / (std::exp(sim(2, c0)) + std::exp(sim(3, c0))) +
                       0.5 * (std::exp(sim(2, c1)) + std::exp(sim(3, c1))) / (std::exp(sim(0, c1)) + std::exp(sim(1, c1)));
    auto ce = [&](int f, const double* c, int o1, int o2) {
      const double e = std::exp(sim(f, c));
      return -std::log(e / (e + std::exp(sim(o1, c)) + std::exp(sim(o2, c))));
    };
    const double con = 0.5 * (ce(0, c0, 2, 3) + ce(1, c0, 2, 3)) + 0.5 * (ce(2, c1, 0, 1) + ce(3, c1, 0, 1));
    CHECK(std::abs(t.value(consistency_loss(t, a, tau, emb, ConsistencyMode::Literal).loss) - lit) < 1e-12);
    CHECK(std::abs(t.value(consistency_loss(t, a, tau, emb, ConsistencyMode::Contrastive).loss) - con) < 1e-12);
  }
  SUBCASE("unit owning every frame is skipped") {
    const FeatureMatrix tau(1, 2, {1.0f, 2.0f});
    std::vector<std::vector<Var>> emb = {{t.constant(1.0)}};
    const auto r = consistency_loss(t, Alignment{2, {FrameSpan{0, 1}}}, tau, emb, ConsistencyMode::Contrastive);
    CHECK(r.skipped == 1);
    CHECK(t.value(r.loss) == 0.0);
  }
}

TEST_CASE("consistency loss gradient") {
  std::mt19937_64 rng(11);
  grad::Parameter c("c", 3, 4);
  for (double& v : c.values) v = std::normal_distribution<double>(0, 0.5)(rng);
  const FeatureMatrix tau = random_features(4, 7, rng);
  Alignment a{7, {FrameSpan{0, 1}, std::nullopt, FrameSpan{3, 6}}};
  for (ConsistencyMode mode : {ConsistencyMode::Literal, ConsistencyMode::Contrastive}) {
    grad::LossFn loss = [&](grad::Session& s) {
      const grad::Binding& b = s.bind(c);
      std::vector<std::vector<Var>> emb = {b.row(0), b.row(1), b.row(2)};
      return consistency_loss(s.tape, a, tau, emb, mode).loss;
    };
    CHECK(grad::gradient_check(loss, {&c}).max_relative_error < 1e-4);
  }
}

TEST_CASE("final loss weighting") {
  const std::array<double, 6> comps = {1.5, -2.0, 0.25, 3.0, 0.5, 7.0};
  CHECK(final_loss(comps, {0, 0, 0, 0, 0, 0}) == 0.0);
  for (int u = 0; u < 6; ++u) {
    Lambdas l{};
    l[u] = 1;
    CHECK(final_loss(comps, l) == comps[u]);
  }
  CHECK(final_loss(comps, kDefaultLambdas) == doctest::Approx(10.25));
  grad::Tape t;
  std::array<std::optional<Var>, 6> vars;
  for (int u = 0; u < 6; ++u) vars[u] = t.constant(comps[u]);
  CHECK(t.value(final_loss(t, vars, kDefaultLambdas)) == doctest::Approx(10.25));
  vars[2].reset();
  CHECK_THROWS_AS(final_loss(t, vars, kDefaultLambdas), InvalidArgument);
  Lambdas no_pre = kDefaultLambdas;
  no_pre[2] = 0;
  CHECK(t.value(final_loss(t, vars, no_pre)) == doctest::Approx(10.0));
  std::array<double, 6> bad = comps;
  bad[0] = NAN;
  CHECK_THROWS_AS(final_loss(bad, kDefaultLambdas), NumericError);
}

TEST_CASE("CSV export") {
  Grid g(1, 2);
  g(0, 0) = 0.5;
  g(0, 1) = 0.25;
  CHECK(grid_to_csv(g) == "frame,token,value\n0,0,0.5\n0,1,0.25\n");
  CHECK(alignment_to_csv(Alignment{3, {FrameSpan{1, 2}}}) == "frame,token\n0,\n1,0\n2,0\n");
}
