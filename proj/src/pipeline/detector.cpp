#include "dysalign/pipeline/detector.hpp"

#include <algorithm>
#include <limits>

#include <json.hpp>

#include "dysalign/core/error.hpp"
#include "dysalign/metrics/edit.hpp"

namespace dysalign::pipeline {

namespace {

struct Run {
  int symbol;
  std::int64_t start, end;
};

std::vector<Run> runs_of(const std::vector<int>& labels) {
  std::vector<Run> out;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (!out.empty() && out.back().symbol == labels[t])
      out.back().end = static_cast<std::int64_t>(t) + 1;
    else
      out.push_back({labels[t], static_cast<std::int64_t>(t), static_cast<std::int64_t>(t) + 1});
  }
  return out;
}

void fuse(std::vector<Run>& runs) {
  std::vector<Run> out;
  for (const auto& r : runs) {
    if (!out.empty() && out.back().symbol == r.symbol)
      out.back().end = r.end;
    else
      out.push_back(r);
  }
  runs = std::move(out);
}

}  // namespace

TimedTokenSequence merge_runs(const std::vector<int>& labels, int min_frames) {
  auto runs = runs_of(labels);
  for (;;) {
    std::size_t shortest = runs.size();
    for (std::size_t i = 0; i < runs.size(); ++i)
      if (runs[i].end - runs[i].start < min_frames &&
          (shortest == runs.size() || runs[i].end - runs[i].start < runs[shortest].end - runs[shortest].start))
        shortest = i;
    if (shortest == runs.size() || runs.size() < 2) break;
    const std::size_t i = shortest;
    const bool has_prev = i > 0, has_next = i + 1 < runs.size();
    const auto len = [&](std::size_t k) { return runs[k].end - runs[k].start; };
    if (has_prev && (!has_next || len(i - 1) >= len(i + 1)))
      runs[i - 1].end = runs[i].end;
    else
      runs[i + 1].start = runs[i].start;
    runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(i));
    fuse(runs);
  }
  std::vector<TimedToken> tokens;
  for (const auto& r : runs) tokens.push_back({r.symbol, r.start, r.end});
  return TimedTokenSequence(std::move(tokens));
}

std::string phonemes_to_json(const std::string& id, const TimedTokenSequence& seq, const PhonemeAlphabet& alphabet) {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["tokens"] = nlohmann::ordered_json::array();
  for (const auto& t : seq.tokens())
    j["tokens"].push_back({{"phoneme", alphabet.label(t.symbol)}, {"start", t.start}, {"end", t.end}});
  return j.dump(2) + "\n";
}

TimedTokenSequence phonemes_from_json(const std::string& text, const PhonemeAlphabet& alphabet) {
  try {
    const auto j = nlohmann::json::parse(text);
    std::vector<TimedToken> tokens;
    for (const auto& t : j.at("tokens")) {
      const auto label = t.at("phoneme").get<std::string>();
      const auto id = alphabet.find(label);
      if (!id) throw FormatError("unknown phoneme '" + label + "'");
      tokens.push_back({*id, t.at("start").get<std::int64_t>(), t.at("end").get<std::int64_t>()});
    }
    return TimedTokenSequence(std::move(tokens));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed phoneme JSON: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("malformed phoneme timeline: ") + e.what());
  }
}

Detector::Detector(Model& model, const RunConfig& config) : model_(model), config_(config) {
  // Binding sizes grads lazily; doing it here keeps concurrent detection read-only.
  for (auto* p : model_.parameters()) p->zero_grad();
}

std::int64_t Detector::typical_frames(int symbol) const {
  const auto& d = config_.simulate.durations;
  if (symbol == model_.alphabet().silence()) return d.silence_frames;
  return model_.alphabet().is_vowel(symbol) ? d.vowel_frames : d.consonant_frames;
}

TimedTokenSequence Detector::decode(const FeatureMatrix& features) const {
  const auto& mu = model_.embeddings.mu;
  if (features.rows() != mu.cols) throw ShapeError("feature rows do not match the token embedding size");
  const int usable = model_.alphabet().blank();
  std::vector<int> labels(features.cols());
  for (std::uint32_t t = 0; t < features.cols(); ++t) {
    double best = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < usable; ++c) {
      double s = 0.0;
      for (std::uint32_t d = 0; d < features.rows(); ++d) s += features(d, t) * mu(static_cast<std::size_t>(c), d);
      if (s > best) {
        best = s;
        labels[t] = c;
      }
    }
  }
  return merge_runs(labels, config_.detect.min_segment_frames);
}

align::Grid Detector::emissions(const FeatureMatrix& features, const std::vector<int>& reference) const {
  grad::Session s;
  std::vector<double> noise(model_.embeddings.mu.size(), 0.0);
  const auto cs = model_.embeddings.sample(s, noise);
  return align::values(s.tape, align::emission_grid(s.tape, features, cs, reference));
}

align::LcsAlignment Detector::align(const FeatureMatrix& features, const std::vector<int>& reference) const {
  grad::Session s;
  std::vector<double> noise(model_.embeddings.mu.size(), 0.0);
  const auto cs = model_.embeddings.sample(s, noise);
  const auto y = align::values(s.tape, align::emission_grid(s.tape, features, cs, reference));
  align::TransitionModel::Cache cache;
  std::vector<double> transition(reference.size(), 1.0);
  for (std::size_t j = 1; j < reference.size(); ++j)
    transition[j] = s.tape.value(model_.transition.phi(s, cache, cs, reference[j], reference[j - 1]));
  return align::sample_alignment(y, transition, config_.alignment_threshold);
}

Detection Detector::detect(const DetectorInput& in) const {
  if (in.features == nullptr) throw InvalidArgument("detector input has no features");
  if (in.reference.size() != in.reference_words.size())
    throw InvalidArgument("reference and reference_words differ in length");
  for (int w : in.reference_words)
    if (w >= static_cast<int>(in.words.size())) throw InvalidArgument("reference word index out of range");

  Detection out;
  out.decoded = decode(*in.features);
  const auto& seg = out.decoded.tokens();
  std::vector<int> hyp;
  for (const auto& t : seg) hyp.push_back(t.symbol);
  const auto ops = metrics::edit_alignment(in.reference, hyp);
  const int sil = model_.alphabet().silence();
  const auto& ref = in.reference;
  const int n_ref = static_cast<int>(ref.size());

  auto word_at = [&](int j) { return j >= 0 && j < n_ref ? in.reference_words[static_cast<std::size_t>(j)] : -1; };
  // Word owning an event just before reference position j.
  auto word_near = [&](int j) {
    for (int k = j; k < n_ref; ++k)
      if (word_at(k) >= 0) return word_at(k);
    for (int k = j - 1; k >= 0; --k)
      if (word_at(k) >= 0) return word_at(k);
    return -1;
  };
  auto emit = [&](int word, DysfluencyType type, std::int64_t start, std::int64_t end) {
    if (word < 0) return;
    DysfluencyAnnotation a;
    a.word = in.words[static_cast<std::size_t>(word)];
    a.type = type;
    a.start = start;
    a.end = end;
    out.annotations.push_back(a.canonical());
  };

  // Decoded segment adjacent to each op, for deletions.
  std::vector<int> prev_hyp(ops.size(), -1), next_hyp(ops.size(), -1);
  for (std::size_t i = 1; i < ops.size(); ++i)
    prev_hyp[i] = ops[i - 1].hyp >= 0 ? ops[i - 1].hyp : prev_hyp[i - 1];
  for (std::size_t i = ops.size(); i-- > 0;)
    next_hyp[i] = i + 1 < ops.size() ? (ops[i + 1].hyp >= 0 ? ops[i + 1].hyp : next_hyp[i + 1]) : -1;

  // A reference phoneme next to an identical one decodes as a single longer
  // segment; that segment absorbs the deletion instead of reporting it.
  std::vector<bool> absorbed(ops.size(), false);
  std::vector<std::int64_t> extra_frames(seg.size(), 0);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (ops[i].kind != metrics::EditKind::Delete) continue;
    const int sym = ref[static_cast<std::size_t>(ops[i].ref)];
    for (std::size_t k : {i - 1, i + 1}) {
      if (i == 0 && k == i - 1) continue;
      if (k >= ops.size() || ops[k].kind != metrics::EditKind::Match) continue;
      if (ref[static_cast<std::size_t>(ops[k].ref)] != sym) continue;
      absorbed[i] = true;
      extra_frames[static_cast<std::size_t>(ops[k].hyp)] += typical_frames(sym) + config_.simulate.durations.jitter;
      break;
    }
  }

  const auto& detect_cfg = config_.detect;
  const auto jitter = config_.simulate.durations.jitter;
  for (std::size_t i = 0; i < ops.size();) {
    const auto& op = ops[i];
    if (op.kind == metrics::EditKind::Insert ||
        (op.kind == metrics::EditKind::Substitute && (ref[static_cast<std::size_t>(op.ref)] == sil ||
                                                        hyp[static_cast<std::size_t>(op.hyp)] == sil))) {
      if (op.kind == metrics::EditKind::Substitute && ref[static_cast<std::size_t>(op.ref)] != sil) {
        // A phoneme heard as silence: the phoneme is missing.
        const int j = op.ref;
        const int p = prev_hyp[i] >= 0 ? prev_hyp[i] : op.hyp;
        const auto& a = seg[static_cast<std::size_t>(p)];
        emit(word_at(j), DysfluencyType::Missing, a.start, a.end);
        if (seg[static_cast<std::size_t>(op.hyp)].frames() >= detect_cfg.min_block_frames && j > 0)
          emit(word_at(j), DysfluencyType::Block, seg[static_cast<std::size_t>(op.hyp)].start,
               seg[static_cast<std::size_t>(op.hyp)].end);
        ++i;
        continue;
      }
      // Maximal run of extra segments before the next reference anchor.
      std::size_t e = i;
      std::vector<int> extra;
      while (e < ops.size() && (ops[e].kind == metrics::EditKind::Insert ||
                                (ops[e].kind == metrics::EditKind::Substitute &&
                                 ref[static_cast<std::size_t>(ops[e].ref)] == sil))) {
        extra.push_back(ops[e].hyp);
        ++e;
      }
      int next_ref = n_ref;
      for (std::size_t k = e; k < ops.size(); ++k)
        if (ops[k].ref >= 0) {
          next_ref = ops[k].ref;
          break;
        }
      const bool interior = i > 0 && next_ref < n_ref;
      const int word = word_near(next_ref);
      for (std::size_t a = 0; a < extra.size();) {
        const auto& first = seg[static_cast<std::size_t>(extra[a])];
        if (first.symbol == sil) {
          if (interior && first.frames() >= detect_cfg.min_block_frames)
            emit(word, DysfluencyType::Block, first.start, first.end);
          ++a;
          continue;
        }
        std::size_t b = a;
        std::vector<int> group;
        while (b < extra.size() && seg[static_cast<std::size_t>(extra[b])].symbol != sil)
          group.push_back(seg[static_cast<std::size_t>(extra[b++])].symbol);
        const bool touches_next = b == extra.size();
        bool repeated = false;
        for (int c = 1; c <= 2 && touches_next && !repeated; ++c) {
          if (group.size() % static_cast<std::size_t>(c) != 0 || next_ref + c > n_ref) continue;
          bool ok = word_at(next_ref) >= 0 && word_at(next_ref + c - 1) == word_at(next_ref);
          for (std::size_t g = 0; ok && g < group.size(); ++g)
            ok = group[g] == ref[static_cast<std::size_t>(next_ref) + g % static_cast<std::size_t>(c)];
          repeated = ok;
        }
        if (repeated) {
          emit(word_at(next_ref), DysfluencyType::Repetition, first.start,
               seg[static_cast<std::size_t>(extra[b - 1])].end);
        } else {
          for (std::size_t g = a; g < b; ++g) {
            const auto& t = seg[static_cast<std::size_t>(extra[g])];
            emit(word, DysfluencyType::Insertion, t.start, t.end);
          }
        }
        a = b;
      }
      i = e;
      continue;
    }
    if (op.kind == metrics::EditKind::Delete) {
      const int j = op.ref;
      if (!absorbed[i] && ref[static_cast<std::size_t>(j)] != sil && prev_hyp[i] >= 0) {
        const auto& a = seg[static_cast<std::size_t>(prev_hyp[i])];
        std::int64_t end = a.end;
        if (next_hyp[i] >= 0 && j + 1 < n_ref && word_at(j + 1) == word_at(j))
          end = seg[static_cast<std::size_t>(next_hyp[i])].end;
        emit(word_at(j), DysfluencyType::Missing, a.start, end);
      }
      ++i;
      continue;
    }
    const auto& t = seg[static_cast<std::size_t>(op.hyp)];
    if (op.kind == metrics::EditKind::Substitute) {
      emit(word_at(op.ref), DysfluencyType::Replacement, t.start, t.end);
    } else if (t.symbol != sil && t.frames() > typical_frames(t.symbol) + jitter + detect_cfg.prolong_slack +
                                                   extra_frames[static_cast<std::size_t>(op.hyp)]) {
      emit(word_at(op.ref), DysfluencyType::Prolongation, t.start, t.end);
    }
    ++i;
  }
  std::stable_sort(out.annotations.begin(), out.annotations.end(),
                   [](const auto& x, const auto& y) { return x.start < y.start; });
  return out;
}

}  // namespace dysalign::pipeline
