#include "dysalign/pipeline/evaluate.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "dysalign/core/error.hpp"
#include "dysalign/metrics/matching.hpp"
#include "dysalign/metrics/rates.hpp"
#include "dysalign/report/report.hpp"

namespace dysalign::pipeline {

namespace {

std::vector<DysfluencyAnnotation> canonical(const std::vector<DysfluencyAnnotation>& xs) {
  std::vector<DysfluencyAnnotation> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(x.canonical());
  return out;
}

nlohmann::ordered_json counts_json(const metrics::Counts& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"f1", c.f1()}};
}

// JSON has no infinity; an unbounded dPER is written as null.
nlohmann::ordered_json number(double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nullptr; }

}  // namespace

std::vector<int> event_frame_labels(const std::vector<DysfluencyAnnotation>& events, std::int64_t frames) {
  std::vector<int> labels(static_cast<std::size_t>(std::max<std::int64_t>(frames, 0)), 0);
  for (const auto& e : events) {
    const std::int64_t end = std::min(e.end.value_or(e.start + 1), frames);
    for (std::int64_t t = std::max<std::int64_t>(e.start, 0); t < end; ++t)
      labels[static_cast<std::size_t>(t)] = 1 + static_cast<int>(e.type);
  }
  return labels;
}

UtteranceMetrics evaluate_utterance(const std::string& id, const std::vector<DysfluencyAnnotation>& pred_in,
                                    const std::vector<DysfluencyAnnotation>& gt_in, std::int64_t frames,
                                    const TimedTokenSequence* pred_phonemes, const TimedTokenSequence* gt_phonemes) {
  const auto pred = canonical(pred_in);
  const auto gt = canonical(gt_in);
  UtteranceMetrics m;
  m.id = id;
  metrics::MatchResult match;
  m.matching_score = metrics::matching_score(pred, gt, &match);
  m.matched = match.counts();
  m.type = metrics::type_counts(pred, gt);
  m.strict = metrics::strict_counts(pred, gt);
  m.frames = metrics::framewise_counts(event_frame_labels(gt, frames), event_frame_labels(pred, frames), 0);
  if (pred_phonemes && gt_phonemes)
    m.dper = metrics::dper_accumulate(metrics::phones(*gt_phonemes), metrics::phones(*pred_phonemes));
  m.flag = report::extract_flag(pred);
  m.gt_flag = report::extract_flag(gt);
  return m;
}

CorpusMetrics aggregate(const std::vector<UtteranceMetrics>& items) {
  if (items.empty()) throw InvalidArgument("nothing to aggregate");
  CorpusMetrics c;
  c.utterances = items.size();
  metrics::Counts matched, type, strict, frames;
  metrics::DperAccumulators acc;
  bool have_dper = true;
  std::vector<int> flags;
  for (const auto& m : items) {
    matched += m.matched;
    type += m.type;
    strict += m.strict;
    frames += m.frames;
    c.mean_matching_score += m.matching_score;
    if (m.dper)
      acc += *m.dper;
    else
      have_dper = false;
    flags.push_back(m.flag);
  }
  c.matching_score = matched.f1();
  c.mean_matching_score /= static_cast<double>(items.size());
  c.type_f1 = type.f1();
  c.strict_f1 = strict.f1();
  c.framewise_f1 = frames.f1();
  if (have_dper) c.dper = acc.ratio();
  c.fp_rate = metrics::fp_rate(flags);
  return c;
}

EvaluationReport make_report(std::vector<std::vector<UtteranceMetrics>> splits) {
  EvaluationReport r;
  r.splits = std::move(splits);
  for (const auto& s : r.splits) r.corpus.push_back(aggregate(s));
  if (r.corpus.size() == 3) {
    const auto& c = r.corpus;
    r.scaling = std::array<double, 3>{
        metrics::scaling_factor(100 * c[0].matching_score, 100 * c[1].matching_score, 100 * c[2].matching_score),
        metrics::scaling_factor(100 * c[0].type_f1, 100 * c[1].type_f1, 100 * c[2].type_f1),
        metrics::scaling_factor(100 * c[0].strict_f1, 100 * c[1].strict_f1, 100 * c[2].strict_f1)};
  }
  return r;
}

std::string report_to_json(const EvaluationReport& report) {
  nlohmann::ordered_json root;
  root["splits"] = nlohmann::ordered_json::array();
  for (std::size_t s = 0; s < report.splits.size(); ++s) {
    const auto& c = report.corpus[s];
    nlohmann::ordered_json corpus{{"utterances", c.utterances},
                                  {"matching_score", c.matching_score},
                                  {"mean_matching_score", c.mean_matching_score},
                                  {"type_f1", c.type_f1},
                                  {"strict_f1", c.strict_f1},
                                  {"framewise_f1", c.framewise_f1},
                                  {"dper", c.dper ? number(*c.dper) : nullptr},
                                  {"fp_rate", c.fp_rate}};
    auto per = nlohmann::ordered_json::array();
    for (const auto& m : report.splits[s]) {
      per.push_back({{"id", m.id},
                     {"matching_score", m.matching_score},
                     {"type", counts_json(m.type)},
                     {"strict", counts_json(m.strict)},
                     {"framewise", counts_json(m.frames)},
                     {"dper", m.dper ? number(m.dper->ratio()) : nullptr},
                     {"has_dysfluency", m.flag}});
    }
    root["splits"].push_back({{"corpus", corpus}, {"utterances", per}});
  }
  if (report.scaling) {
    const auto& sf = *report.scaling;
    root["scaling_factor"] = {{"matching_score", sf[0]}, {"type_f1", sf[1]}, {"strict_f1", sf[2]}};
  }
  return root.dump(2) + "\n";
}

}  // namespace dysalign::pipeline
