#include "dysalign/align/fcsa.hpp"

#include <cmath>

#include "dysalign/core/error.hpp"
#include "dysalign/grad/layers.hpp"

namespace dysalign::align {

using grad::Var;

KSamples KSamples::draw(int frames, int tokens, std::mt19937_64& rng) {
  KSamples k{frames, tokens, {}, {}};
  auto pick = [&](int bound) -> std::pair<int, int> {
    if (bound < 1) return {0, 0};
    std::uniform_int_distribution<int> d(1, bound);
    int a = d(rng), b = d(rng);
    if (a > b) std::swap(a, b);
    return {a, b};
  };
  for (int i = 0; i < frames; ++i)
    for (int j = 0; j < tokens; ++j) k.forward.push_back(pick(forward_bound(i, j)));
  for (int i = 0; i < frames; ++i)
    for (int j = 0; j < tokens; ++j) k.backward.push_back(pick(backward_bound(frames, tokens, i, j)));
  return k;
}

FcsaNetworks::FcsaNetworks(int hidden)
    : f1_w1("align.fcsa.f1.w1", hidden, 3),
      f1_b1("align.fcsa.f1.b1", hidden, 1),
      f1_w2("align.fcsa.f1.w2", 1, hidden),
      f1_b2("align.fcsa.f1.b2", 1, 1),
      f2_w1("align.fcsa.f2.w1", hidden, 1),
      f2_b1("align.fcsa.f2.b1", hidden, 1),
      f2_w2("align.fcsa.f2.w2", 1, hidden),
      f2_b2("align.fcsa.f2.b2", 1, 1) {
  if (hidden < 1) throw InvalidArgument("FCSA networks need a hidden width >= 1");
}

void FcsaNetworks::init(std::mt19937_64& rng) {
  grad::init_normal(f1_w1, rng, 1.0 / std::sqrt(3.0));
  grad::init_normal(f1_w2, rng, 1.0 / std::sqrt(static_cast<double>(f1_w2.cols)));
  grad::init_normal(f2_w1, rng, 1.0);
  grad::init_normal(f2_w2, rng, 1.0 / std::sqrt(static_cast<double>(f2_w2.cols)));
  for (grad::Parameter* p : {&f1_b1, &f1_b2, &f2_b1, &f2_b2}) std::fill(p->values.begin(), p->values.end(), 0.0);
}

Var FcsaNetworks::f1(grad::Session& s, Var score, Var transition, Var emission) {
  grad::Tape& t = s.tape;
  const grad::Binding& w1 = s.bind(f1_w1);
  const grad::Binding& b1 = s.bind(f1_b1);
  const grad::Binding& w2 = s.bind(f1_w2);
  const grad::Binding& b2 = s.bind(f1_b2);
  const Var in[3] = {score, transition, emission};
  auto& h = hidden_;
  auto& w2row = weights_;
  h.resize(f1_w1.rows);
  w2row.resize(f1_w1.rows);
  for (std::size_t r = 0; r < f1_w1.rows; ++r) {
    const Var row[3] = {w1.at(r, 0), w1.at(r, 1), w1.at(r, 2)};
    h[r] = t.tanh(t.add(t.dot(row, in), b1.at(r)));
    w2row[r] = w2.at(r);
  }
  return t.add(t.dot(w2row, h), b2.at(0));
}

Var FcsaNetworks::f2(grad::Session& s, Var x) {
  grad::Tape& t = s.tape;
  const grad::Binding& w1 = s.bind(f2_w1);
  const grad::Binding& b1 = s.bind(f2_b1);
  const grad::Binding& w2 = s.bind(f2_w2);
  const grad::Binding& b2 = s.bind(f2_b2);
  auto& h = hidden_;
  auto& w2row = weights_;
  h.resize(f2_w1.rows);
  w2row.resize(f2_w1.rows);
  for (std::size_t r = 0; r < f2_w1.rows; ++r) {
    h[r] = t.tanh(t.add(t.mul(w1.at(r), x), b1.at(r)));
    w2row[r] = w2.at(r);
  }
  return t.add(t.dot(w2row, h), b2.at(0));
}

namespace {

// dir = +1 walks forward and reads (i - a, j - b); dir = -1 walks backward
// and reads (i + a, j + b).
FcsaGrid run(grad::Session& s, FcsaNetworks& nets, const VarGrid& y, const PositionTransition& phi,
             const std::vector<std::pair<int, int>>& samples, int dir) {
  const int T = y.frames, L = y.tokens;
  if (T < 1 || L < 1) throw InvalidArgument("FCSA needs a non-empty grid");
  if (static_cast<int>(samples.size()) != T * L) throw ShapeError("k samples do not cover the grid");
  grad::Tape& t = s.tape;
  FcsaGrid g{VarGrid(T, L), BasicGrid<std::array<Var, 6>>(T, L)};
  const Var pass_i = t.constant(kPassInserted);
  const Var pass_r = t.constant(kPassRemoved);

  // One f1 term, or nothing when the reference falls outside the grid.
  auto term = [&](int i, int j, int a, int b, std::vector<Var>& out) {
    const int ri = i - dir * a, rj = j - dir * b;
    if (!g.scores.contains(ri, rj)) return;
    out.push_back(nets.f1(s, g.scores(ri, rj), phi(j, rj), y(i, j)));
  };
  auto stack = [&](std::vector<Var>& terms) {
    return t.sigmoid(terms.empty() ? t.zero() : terms.size() == 1 ? terms[0] : t.add(terms[0], terms[1]));
  };

  std::vector<Var> terms;
  for (int step = 0; step < T; ++step) {
    const int i = dir > 0 ? step : T - 1 - step;
    for (int j = 0; j < L; ++j) {
      const auto [k, kh] = samples[std::size_t(i) * L + j];
      std::array<Var, 6>& st = g.stacks(i, j);
      terms.clear();
      term(i, j, 1, 0, terms);
      term(i, j, 1, 1, terms);
      st[0] = stack(terms);
      const int offsets[3][4] = {{k, 1, kh, 1}, {k, k, kh, kh}, {1, -k, 1, -kh}};
      for (int u = 0; u < 3; ++u) {
        terms.clear();
        if (k >= 1) {
          term(i, j, offsets[u][0], offsets[u][1], terms);
          term(i, j, offsets[u][2], offsets[u][3], terms);
        }
        st[u + 1] = stack(terms);
      }
      st[4] = pass_i;
      st[5] = pass_r;
      const Var total = t.sum(std::span<const Var>(st.data(), st.size()));
      const bool start = dir > 0 ? (i == 0 && j == 0) : (i == T - 1 && j == L - 1);
      g.scores(i, j) = start ? t.one() : t.sigmoid(nets.f2(s, total));
    }
  }
  return g;
}

}  // namespace

FcsaGrid fcsa_forward(grad::Session& s, FcsaNetworks& nets, const VarGrid& y, const PositionTransition& phi,
                      const KSamples& k) {
  if (k.frames != y.frames || k.tokens != y.tokens) throw ShapeError("k samples drawn for a different grid");
  for (int i = 0; i < k.frames; ++i)
    for (int j = 0; j < k.tokens; ++j) {
      const auto [a, b] = k.forward[std::size_t(i) * k.tokens + j];
      if (a != 0 && (a < 1 || a > b || b > KSamples::forward_bound(i, j)))
        throw InvalidArgument("forward k sample outside 1 <= k <= k_hat <= min(i, j) - 1");
    }
  return run(s, nets, y, phi, k.forward, +1);
}

FcsaGrid fcsa_backward(grad::Session& s, FcsaNetworks& nets, const VarGrid& y, const PositionTransition& phi,
                       const KSamples& k) {
  if (k.frames != y.frames || k.tokens != y.tokens) throw ShapeError("k samples drawn for a different grid");
  for (int i = 0; i < k.frames; ++i)
    for (int j = 0; j < k.tokens; ++j) {
      const auto [a, b] = k.backward[std::size_t(i) * k.tokens + j];
      if (a != 0 && (a < 1 || a > b || b > KSamples::backward_bound(k.frames, k.tokens, i, j)))
        throw InvalidArgument("backward k sample outside the legal range");
    }
  return run(s, nets, y, phi, k.backward, -1);
}

}  // namespace dysalign::align
