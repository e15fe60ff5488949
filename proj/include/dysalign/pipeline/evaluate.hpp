#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dysalign/core/annotation.hpp"
#include "dysalign/core/time.hpp"
#include "dysalign/metrics/dper.hpp"
#include "dysalign/metrics/f1.hpp"

namespace dysalign::pipeline {

struct UtteranceMetrics {
  std::string id;
  double matching_score = 0.0;
  metrics::Counts matched;  // IoU > 0.5 pairs behind the matching score
  metrics::Counts type;
  metrics::Counts strict;
  metrics::Counts frames;
  std::optional<metrics::DperAccumulators> dper;  // only when phonemes were predicted
  int flag = 0;
  int gt_flag = 0;
};

struct CorpusMetrics {
  std::size_t utterances = 0;
  double matching_score = 0.0;  // micro over matched pairs
  double mean_matching_score = 0.0;
  double type_f1 = 0.0;
  double strict_f1 = 0.0;
  double framewise_f1 = 0.0;
  std::optional<double> dper;  // summed accumulators
  double fp_rate = 0.0;
};

// Frame labels: 0 for fluent, 1 + type index inside an event (later events
// win on overlap). Canonical point events cover one frame.
std::vector<int> event_frame_labels(const std::vector<DysfluencyAnnotation>& events, std::int64_t frames);

// Both annotation lists are compared in canonical form.
UtteranceMetrics evaluate_utterance(const std::string& id, const std::vector<DysfluencyAnnotation>& pred,
                                    const std::vector<DysfluencyAnnotation>& gt, std::int64_t frames,
                                    const TimedTokenSequence* pred_phonemes = nullptr,
                                    const TimedTokenSequence* gt_phonemes = nullptr);

CorpusMetrics aggregate(const std::vector<UtteranceMetrics>& items);

struct EvaluationReport {
  std::vector<std::vector<UtteranceMetrics>> splits;  // one entry per prediction set
  std::vector<CorpusMetrics> corpus;
  // Per metric, over exactly three splits (30%, 60%, 100% training data).
  std::optional<std::array<double, 3>> scaling;  // matching score, type F1, strict F1
};

EvaluationReport make_report(std::vector<std::vector<UtteranceMetrics>> splits);
std::string report_to_json(const EvaluationReport& report);

}  // namespace dysalign::pipeline
