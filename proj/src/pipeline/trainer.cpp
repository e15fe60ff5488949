#include "dysalign/pipeline/trainer.hpp"

#include <algorithm>
#include <numeric>

#include "dysalign/align/ctc.hpp"
#include "dysalign/align/lcs.hpp"
#include "dysalign/core/error.hpp"
#include "dysalign/gestural/kl.hpp"
#include "dysalign/gestural/pit.hpp"

namespace dysalign::pipeline {

using grad::Var;

namespace {

std::mt19937_64 seeded(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32), static_cast<std::uint32_t>(b),
                    static_cast<std::uint32_t>(b >> 32), static_cast<std::uint32_t>(c),
                    static_cast<std::uint32_t>(c >> 32)};
  return std::mt19937_64(seq);
}

FeatureMatrix crop(const FeatureMatrix& m, std::uint32_t first, std::uint32_t count) {
  FeatureMatrix out(m.rows(), count);
  for (std::uint32_t r = 0; r < m.rows(); ++r)
    for (std::uint32_t c = 0; c < count; ++c) out(r, c) = m(r, first + c);
  return out;
}

}  // namespace

void fit_dictionary(Model& model, const std::vector<Utterance>& data, std::uint64_t seed) {
  const int window = model.dictionary.window;
  std::vector<std::vector<double>> windows;
  for (const auto& u : data) {
    auto w = gestural::extract_windows(u.articulatory, window, std::max(1, window / 2));
    windows.insert(windows.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
  }
  if (static_cast<int>(windows.size()) < model.dictionary.gestures)
    throw InvalidArgument("too few articulatory windows to fit the gesture dictionary");
  model.dictionary =
      gestural::kmeans_gestures(windows, window, model.dictionary.channels, model.dictionary.gestures, seed);
}

UtteranceLoss utterance_loss(grad::Session& s, Model& model, const RunConfig& config, const Utterance& u,
                             std::mt19937_64& rng, std::optional<double> weight) {
  s.reset();
  auto& tape = s.tape;
  const auto& abc = model.alphabet();
  const auto& tau = u.features;
  const int frames = static_cast<int>(tau.cols());
  const auto& ref = u.reference;
  const auto lambdas = config.lambdas;
  auto on = [&](int i) { return lambdas[static_cast<std::size_t>(i)] != 0.0; };

  auto noise = model.embeddings.draw_noise(rng);
  for (auto& n : noise) n *= config.train.embedding_noise;
  const auto cs = model.embeddings.sample(s, noise);
  std::array<std::optional<Var>, 6> parts;

  const auto y = align::emission_grid(tape, tau, cs, ref);
  align::TransitionModel::Cache cache;
  const std::size_t n_ref = ref.size();
  std::vector<Var> phi_memo(n_ref * n_ref);
  auto phi = [&](int m, int n) {
    Var& v = phi_memo[std::size_t(m) * n_ref + std::size_t(n)];
    if (!v.valid()) v = model.transition.phi(s, cache, cs, ref[m], ref[n]);
    return v;
  };
  const auto k = align::KSamples::draw(frames, static_cast<int>(ref.size()), rng);
  std::optional<align::LcsAlignment> lcs;
  if (on(4) || (on(2) && config.train.pre_matched_cells_only)) {
    std::vector<double> transition(ref.size(), 1.0);
    for (std::size_t j = 1; j < ref.size(); ++j)
      transition[j] = tape.value(phi(static_cast<int>(j), static_cast<int>(j) - 1));
    lcs = align::sample_alignment(align::values(tape, y), transition, config.alignment_threshold);
  }

  if (on(2)) {
    const auto y_pre = config.train.pre_updates_emissions ? y : align::constants(tape, align::values(tape, y));
    const auto fa = align::fcsa_forward(s, model.fcsa, y_pre, phi, k);
    const auto fb = align::fcsa_backward(s, model.fcsa, y_pre, phi, k);
    std::vector<bool> mask;
    if (config.train.pre_matched_cells_only) {
      mask.assign(y.cells.size(), false);
      for (int i = 0; i < frames; ++i)
        if (const auto j = lcs->frame_token[static_cast<std::size_t>(i)]) mask[std::size_t(i) * ref.size() + *j] = true;
    }
    // An alignment without matches leaves nothing to score.
    if (mask.empty() || std::find(mask.begin(), mask.end(), true) != mask.end())
      parts[2] = align::pre_alignment_loss(tape, fa.scores, fb.scores, y_pre, mask.empty() ? nullptr : &mask);
  }

  const auto target = u.timed.symbols();
  if (on(3) && align::ctc_min_frames(target) <= frames) {
    const auto lp = align::alphabet_log_posteriors(tape, tau, cs);
    parts[3] = align::ctc_loss(tape, lp, target, abc.blank());
  }

  if (on(4)) {
    std::vector<std::vector<Var>> units;
    units.reserve(ref.size());
    for (int r : ref) units.push_back(cs[static_cast<std::size_t>(r)]);
    parts[4] = align::consistency_loss(tape, lcs->spans, tau, units, config.train.consistency).loss;
  }

  if (on(0) || on(1) || on(5)) {
    const int span = std::min(frames, config.train.gestural_frames);
    const int first = std::uniform_int_distribution<int>(0, frames - span)(rng);
    const auto x = crop(u.articulatory, static_cast<std::uint32_t>(first), static_cast<std::uint32_t>(span));
    const auto enc = model.encoder.encode(s, x, rng());
    if (on(0)) parts[0] = gestural::kl_loss(tape, enc);
    if (on(1)) {
      const auto xhat = crop(tau, static_cast<std::uint32_t>(first), static_cast<std::uint32_t>(span));
      std::normal_distribution<double> n01;
      std::vector<double> x0(std::size_t(xhat.rows()) * xhat.cols());
      for (auto& v : x0) v = n01(rng);
      const double t = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      parts[1] = gestural::flow_loss(s, enc.dense, xhat, x0, t, model.flow_config, model.field);
    }
    if (on(5)) parts[5] = gestural::pit_loss(s, enc.dense, model.dictionary, x);
  }

  const Var total = align::final_loss(tape, parts, lambdas);
  UtteranceLoss out;
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (parts[i]) out.components[i] = tape.value(*parts[i]);
  out.total = tape.value(total);
  if (weight) s.backward(tape.scale(total, *weight));
  return out;
}

double alignment_objective(Model& model, const RunConfig& config, const std::vector<Utterance>& data,
                           std::uint64_t seed) {
  if (data.empty()) throw InvalidArgument("alignment objective needs at least one utterance");
  RunConfig c = config;
  c.lambdas = {0, 0, config.lambdas[2], config.lambdas[3], 0, 0};
  double sum = 0.0;
  grad::Session s;
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto rng = seeded(seed, 0x0b1ec7, i);
    sum += utterance_loss(s, model, c, data[i], rng, std::nullopt).total;
  }
  return sum / static_cast<double>(data.size());
}

Trainer::Trainer(Model& model, const RunConfig& config)
    : model_(model), config_(config), adam_(config.learning_rate), params_(model.parameters()) {}

StepReport Trainer::step(const std::vector<Utterance>& data) {
  if (data.empty()) throw InvalidArgument("training needs at least one utterance");
  for (auto* p : params_) p->zero_grad();
  auto rng = seeded(config_.seed, 0x7a1, static_cast<std::uint64_t>(step_));
  const int b = std::min<int>(config_.train.batch_size, static_cast<int>(data.size()));
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  StepReport rep;
  rep.step = step_;
  rep.learning_rate = config_.learning_rate.at(step_);
  for (int i = 0; i < b; ++i)
    rep.loss += utterance_loss(workspace_, model_, config_, data[order[static_cast<std::size_t>(i)]], rng, 1.0 / b).total / b;
  adam_.step(params_);
  ++step_;
  return rep;
}

std::vector<StepReport> train(Model& model, const RunConfig& config, const std::vector<Utterance>& data,
                              const std::function<void(const StepReport&)>& progress) {
  check_dataset(data, config);
  fit_dictionary(model, data, config.seed);
  Trainer trainer(model, config);
  std::vector<StepReport> out;
  out.reserve(static_cast<std::size_t>(config.train.steps));
  for (int i = 0; i < config.train.steps; ++i) {
    out.push_back(trainer.step(data));
    if (progress) progress(out.back());
  }
  return out;
}

}  // namespace dysalign::pipeline
