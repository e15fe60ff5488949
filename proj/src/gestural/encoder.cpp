#include "dysalign/gestural/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dysalign/core/error.hpp"
#include "dysalign/gestural/gumbel.hpp"

namespace dysalign::gestural {

using grad::Var;

int count_classes(int frames) { return std::max(1, (frames + 3) / 4); }

GesturalEncoder::GesturalEncoder(EncoderConfig config)
    : projection("gestural.projection", config.gestures, config.channels),
      count_w("gestural.count_w", 3, 3),
      index_w("gestural.index_w", 2, 3),
      value_w("gestural.value_w", 2, config.channels + 2),
      config_(config) {
  if (config.gestures < 1 || config.channels < 1) throw InvalidArgument("encoder needs K >= 1 and channels >= 1");
  if (!(config.temperature > 0.0)) throw InvalidArgument("encoder temperature must be positive");
}

void GesturalEncoder::init(std::mt19937_64& rng) {
  grad::init_normal(projection, rng, 1.0 / std::sqrt(static_cast<double>(config_.channels)));
  std::fill(count_w.values.begin(), count_w.values.end(), 0.0);
  // Lean towards few spans per row: logit_c = -6 q_c at start.
  count_w(1, 2) = -6.0;
  index_w.values = {0.5, 20.0, 0.0, 0.5, 20.0, 0.0};
  grad::init_normal(value_w, rng, 0.1);
  value_w(1, config_.channels + 1) = grad::inverse_softplus(0.5);
}

std::vector<grad::Parameter*> GesturalEncoder::parameters() { return {&projection, &count_w, &index_w, &value_w}; }

std::vector<Var> GesturalEncoder::count_logits(grad::Session& s, const std::vector<Var>& r) {
  grad::Tape& t = s.tape;
  if (r.empty()) throw InvalidArgument("count encoder on an empty row");
  const int frames = static_cast<int>(r.size());
  const int classes = count_classes(frames);
  std::vector<Var> squares(r.size());
  for (std::size_t f = 0; f < r.size(); ++f) squares[f] = t.square(r[f]);
  const std::vector<Var> stats = {t.scale(t.sum(r), 1.0 / frames), t.scale(t.sum(squares), 1.0 / frames), t.one()};
  const grad::Binding& w = s.bind(count_w);
  std::vector<Var> ws(3);
  for (int m = 0; m < 3; ++m) ws[m] = t.dot(w.row(m), stats);
  std::vector<Var> logits(classes);
  for (int c = 0; c < classes; ++c) {
    const double q = static_cast<double>(c) / classes;
    const double basis[3] = {1.0, q, q * q};
    logits[c] = t.dot(std::span<const double>(basis, 3), ws);
  }
  return logits;
}

namespace {

struct Draw {
  int start, end;
  Var expected_start, expected_end;
};

double uniform_open(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double v = u(rng);
  while (v <= 0.0) v = u(rng);
  return v;
}

}  // namespace

EncodedScores GesturalEncoder::encode(grad::Session& s, const FeatureMatrix& x, std::uint64_t noise_seed) {
  if (static_cast<int>(x.rows()) != config_.channels)
    throw ShapeError("encoder expects " + std::to_string(config_.channels) + " channels, got " +
                     std::to_string(x.rows()));
  const int T = static_cast<int>(x.cols());
  if (T < 1) throw InvalidArgument("cannot encode an empty trajectory");
  const int K = config_.gestures;
  grad::Tape& t = s.tape;
  std::mt19937_64 rng(noise_seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<std::vector<double>> cols(T);
  for (int f = 0; f < T; ++f) cols[f] = x.column(f);

  const grad::Binding& proj = s.bind(projection);
  const grad::Binding& iw = s.bind(index_w);
  const grad::Binding& vw = s.bind(value_w);
  const std::size_t ch = config_.channels;
  std::vector<Var> mu_w, sigma_w;
  for (std::size_t d = 0; d < ch; ++d) {
    mu_w.push_back(vw.at(0, d));
    sigma_w.push_back(vw.at(1, d));
  }

  EncodedScores out;
  out.scores = GesturalScores(K, T);
  out.dense.assign(K, std::vector<Var>(T, t.zero()));
  const int classes = count_classes(T);
  std::vector<double> frame_index(T);
  for (int f = 0; f < T; ++f) frame_index[f] = f;

  for (int i = 0; i < K; ++i) {
    const std::vector<Var> prow = proj.row(i);
    std::vector<Var> r(T);
    for (int f = 0; f < T; ++f) r[f] = t.dot(std::span<const double>(cols[f]), prow);

    std::vector<double> u(classes);
    for (double& v : u) v = uniform_open(rng);
    GumbelSample count = gumbel_categorical_sample(t, count_logits(s, r), config_.temperature, u);
    out.count_log_probs.push_back(count.log_probs);
    const int n = count.hard + 1;
    out.raw_counts.push_back(n);

    // Shared part of both index heads: a r + c r^2.
    std::vector<Var> shared[2];
    for (int h = 0; h < 2; ++h) {
      shared[h].resize(T);
      for (int f = 0; f < T; ++f)
        shared[h][f] = t.add(t.mul(iw.at(h, 0), r[f]), t.mul(iw.at(h, 2), t.square(r[f])));
    }
    std::vector<Draw> draws;
    for (int tau = 0; tau < n; ++tau) {
      Draw d{};
      for (int h = 0; h < 2; ++h) {
        const double center = (tau + (h == 0 ? 0.25 : 0.75)) / n;
        std::vector<Var> logits(T);
        for (int f = 0; f < T; ++f) {
          const double pos = (f + 0.5) / T - center;
          logits[f] = t.add(shared[h][f], t.scale(iw.at(h, 1), -pos * pos));
        }
        std::vector<double> un(T);
        for (double& v : un) v = uniform_open(rng);
        GumbelSample g = gumbel_categorical_sample(t, logits, config_.temperature, un);
        out.index_log_probs.push_back(g.log_probs);
        const Var expected = t.dot(std::span<const double>(frame_index), g.soft);
        if (h == 0) {
          d.start = g.hard;
          d.expected_start = expected;
        } else {
          d.end = g.hard;
          d.expected_end = expected;
        }
      }
      if (d.start > d.end) {
        std::swap(d.start, d.end);
        std::swap(d.expected_start, d.expected_end);
      }
      draws.push_back(d);
    }
    std::sort(draws.begin(), draws.end(), [](const Draw& a, const Draw& b) {
      return a.start != b.start ? a.start < b.start : a.end < b.end;
    });
    std::vector<Draw> merged;
    for (const Draw& d : draws) {
      if (!merged.empty() && d.start <= merged.back().end + 1) {
        if (d.end > merged.back().end) {
          merged.back().end = d.end;
          merged.back().expected_end = d.expected_end;
        }
      } else {
        merged.push_back(d);
      }
    }

    std::vector<ScoreSpan> spans;
    for (const Draw& d : merged) {
      ScoreSpan sp{d.start, d.end, {}};
      for (int f = d.start; f <= d.end; ++f) {
        const Var mu = t.add(t.add(t.dot(std::span<const double>(cols[f]), mu_w), t.mul(vw.at(0, ch), r[f])),
                             vw.at(0, ch + 1));
        const Var sigma = grad::positive(
            t, t.add(t.add(t.dot(std::span<const double>(cols[f]), sigma_w), t.mul(vw.at(1, ch), r[f])),
                     vw.at(1, ch + 1)));
        out.value_mu.push_back(mu);
        out.value_sigma.push_back(sigma);
        const Var value = grad::gaussian_sample(t, mu, sigma, config_.value_noise * normal(rng));
        const double kappa = config_.box_sharpness;
        const Var rise = t.sigmoid(t.scale(t.shift(t.neg(d.expected_start), f + 0.5), 1.0 / kappa));
        const Var fall = t.sigmoid(t.scale(t.shift(d.expected_end, 0.5 - f), 1.0 / kappa));
        const Var box = t.mul(rise, fall);
        const Var mask = config_.straight_through ? t.pass_through(1.0, box) : box;
        out.dense[i][f] = t.mul(mask, value);
        sp.values.push_back(t.value(out.dense[i][f]));
      }
      spans.push_back(std::move(sp));
    }
    out.scores.set_row(i, std::move(spans));
  }
  return out;
}

}  // namespace dysalign::gestural
