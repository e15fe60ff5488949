#include "dysalign/pipeline/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "dysalign/core/error.hpp"

namespace dysalign::pipeline {

using nlohmann::json;

namespace {

// Reads fields of one JSON object, then complains about anything left over.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(fmt::format("{}: expected an object", name()));
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError("");
        if constexpr (std::is_unsigned_v<T>)
          if (v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError("");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("");
      }
      out = v.get<T>();
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("{}.{}: wrong type ({})", name(), key, v.dump()));
    }
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& at(const char* key) const { return j_.at(key); }
  std::string child(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string name() const { return path_.empty() ? "config" : path_; }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(fmt::format("{}: unknown field '{}'", name(), k));
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class T>
void get_pair(Section& s, const char* key, T& lo, T& hi) {
  if (!s.has(key)) return;
  const json& v = s.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError(fmt::format("{}: expected [min, max]", s.child(key)));
  lo = v[0].get<T>();
  hi = v[1].get<T>();
}

align::ConsistencyMode parse_consistency(const std::string& s) {
  if (s == "literal") return align::ConsistencyMode::Literal;
  if (s == "contrastive") return align::ConsistencyMode::Contrastive;
  throw ConfigError(fmt::format("train.consistency: expected literal or contrastive, got '{}'", s));
}

void read_simulate(Section& root, simulate::SimulationConfig& c) {
  if (!root.has("simulate")) return;
  Section s(root.at("simulate"), "simulate");
  std::string mode(simulate::to_string(c.mode));
  s.get("mode", mode);
  c.mode = simulate::parse_codys_mode(mode);
  s.get("single_fraction", c.single_fraction);
  s.get("three_instance_prob", c.three_instance_prob);
  if (s.has("type_weights")) {
    Section w(s.at("type_weights"), "simulate.type_weights");
    for (std::size_t k = 0; k < 6; ++k) w.get(std::string(to_string(kAllDysfluencyTypes[k])).c_str(), c.type_weights[k]);
    w.finish();
  }
  get_pair(s, "block_frames", c.limits.block_min_frames, c.limits.block_max_frames);
  get_pair(s, "prolong_factor", c.limits.prolong_min, c.limits.prolong_max);
  s.get("max_repeats", c.limits.max_repeats);
  if (s.has("durations")) {
    Section d(s.at("durations"), "simulate.durations");
    d.get("vowel", c.durations.vowel_frames);
    d.get("consonant", c.durations.consonant_frames);
    d.get("silence", c.durations.silence_frames);
    d.get("jitter", c.durations.jitter);
    d.finish();
  }
  s.get("edge_silence", c.edge_silence);
  s.get("table_seed", c.table_seed);
  s.get("feature_noise", c.feature_noise);
  s.get("articulatory_noise", c.articulatory_noise);
  s.finish();
}

}  // namespace

void RunConfig::validate() const {
  for (double l : lambdas)
    if (!(l >= 0)) throw ConfigError("lambdas: weights must be non-negative");
  if (!(temperature > 0)) throw ConfigError("temperature: must be positive");
  if (!(sigma_min > 0 && sigma_min < 1)) throw ConfigError("sigma_min: must lie in (0, 1)");
  if (gestures < 1) throw ConfigError("gestures: must be positive");
  if (token_dim < 1) throw ConfigError("token_dim: must be positive");
  if (articulatory_dim < 1) throw ConfigError("articulatory_dim: must be positive");
  if (!(learning_rate.initial > 0)) throw ConfigError("learning_rate.initial: must be positive");
  if (!(learning_rate.decay > 0 && learning_rate.decay <= 1)) throw ConfigError("learning_rate.decay: must lie in (0, 1]");
  if (learning_rate.every < 1) throw ConfigError("learning_rate.every: must be positive");
  if (!(alignment_threshold > 0 && alignment_threshold < 1)) throw ConfigError("alignment_threshold: must lie in (0, 1)");
  if (pit_window < 1) throw ConfigError("pit_window: must be positive");
  if (train.steps < 0) throw ConfigError("train.steps: must be non-negative");
  if (train.batch_size < 1) throw ConfigError("train.batch_size: must be positive");
  if (train.gestural_frames < 1) throw ConfigError("train.gestural_frames: must be positive");
  if (train.fcsa_hidden < 1 || train.flow_hidden < 1) throw ConfigError("train: hidden sizes must be positive");
  if (!(train.embedding_noise >= 0)) throw ConfigError("train.embedding_noise: must be non-negative");
  if (detect.min_block_frames < 1 || detect.min_segment_frames < 1 || detect.prolong_slack < 0)
    throw ConfigError("detect: frame thresholds must be positive");
  if (simulate.feature_dim != token_dim || simulate.articulatory_dim != articulatory_dim)
    throw ConfigError("simulate: feature dimensions must match token_dim and articulatory_dim");
  simulate.validate();
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
  }
  RunConfig c;
  Section root(j, "");
  root.get("seed", c.seed);
  if (root.has("lambdas")) {
    const json& l = root.at("lambdas");
    if (!l.is_array() || l.size() != 6) throw ConfigError("lambdas: expected an array of six numbers");
    for (std::size_t k = 0; k < 6; ++k) {
      if (!l[k].is_number()) throw ConfigError("lambdas: expected an array of six numbers");
      c.lambdas[k] = l[k].get<double>();
    }
  }
  root.get("temperature", c.temperature);
  root.get("sigma_min", c.sigma_min);
  root.get("gestures", c.gestures);
  root.get("token_dim", c.token_dim);
  root.get("articulatory_dim", c.articulatory_dim);
  if (root.has("learning_rate")) {
    Section s(root.at("learning_rate"), "learning_rate");
    s.get("initial", c.learning_rate.initial);
    s.get("decay", c.learning_rate.decay);
    s.get("every", c.learning_rate.every);
    s.finish();
  }
  root.get("alignment_threshold", c.alignment_threshold);
  root.get("pit_window", c.pit_window);
  root.get("lexicon", c.lexicon);
  if (root.has("train")) {
    Section s(root.at("train"), "train");
    s.get("steps", c.train.steps);
    s.get("batch_size", c.train.batch_size);
    s.get("gestural_frames", c.train.gestural_frames);
    s.get("fcsa_hidden", c.train.fcsa_hidden);
    s.get("flow_hidden", c.train.flow_hidden);
    std::string mode = c.train.consistency == align::ConsistencyMode::Literal ? "literal" : "contrastive";
    s.get("consistency", mode);
    c.train.consistency = parse_consistency(mode);
    s.get("pre_matched_cells_only", c.train.pre_matched_cells_only);
    s.get("pre_updates_emissions", c.train.pre_updates_emissions);
    s.get("embedding_noise", c.train.embedding_noise);
    s.finish();
  }
  if (root.has("detect")) {
    Section s(root.at("detect"), "detect");
    s.get("min_block_frames", c.detect.min_block_frames);
    s.get("prolong_slack", c.detect.prolong_slack);
    s.get("min_segment_frames", c.detect.min_segment_frames);
    s.finish();
  }
  read_simulate(root, c.simulate);
  root.finish();

  c.simulate.seed = c.seed;
  c.simulate.feature_dim = c.token_dim;
  c.simulate.articulatory_dim = c.articulatory_dim;
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string config_to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["lambdas"] = c.lambdas;
  j["temperature"] = c.temperature;
  j["sigma_min"] = c.sigma_min;
  j["gestures"] = c.gestures;
  j["token_dim"] = c.token_dim;
  j["articulatory_dim"] = c.articulatory_dim;
  j["learning_rate"] = {{"initial", c.learning_rate.initial},
                        {"decay", c.learning_rate.decay},
                        {"every", c.learning_rate.every}};
  j["alignment_threshold"] = c.alignment_threshold;
  j["pit_window"] = c.pit_window;
  j["lexicon"] = c.lexicon;
  j["train"] = {{"steps", c.train.steps},
                {"batch_size", c.train.batch_size},
                {"gestural_frames", c.train.gestural_frames},
                {"fcsa_hidden", c.train.fcsa_hidden},
                {"flow_hidden", c.train.flow_hidden},
                {"consistency", c.train.consistency == align::ConsistencyMode::Literal ? "literal" : "contrastive"},
                {"pre_matched_cells_only", c.train.pre_matched_cells_only},
                {"pre_updates_emissions", c.train.pre_updates_emissions},
                {"embedding_noise", c.train.embedding_noise}};
  j["detect"] = {{"min_block_frames", c.detect.min_block_frames},
                 {"prolong_slack", c.detect.prolong_slack},
                 {"min_segment_frames", c.detect.min_segment_frames}};
  const auto& s = c.simulate;
  json weights;
  for (std::size_t k = 0; k < 6; ++k) weights[std::string(to_string(kAllDysfluencyTypes[k]))] = s.type_weights[k];
  j["simulate"] = {{"mode", simulate::to_string(s.mode)},
                   {"single_fraction", s.single_fraction},
                   {"three_instance_prob", s.three_instance_prob},
                   {"type_weights", weights},
                   {"block_frames", {s.limits.block_min_frames, s.limits.block_max_frames}},
                   {"prolong_factor", {s.limits.prolong_min, s.limits.prolong_max}},
                   {"max_repeats", s.limits.max_repeats},
                   {"durations",
                    {{"vowel", s.durations.vowel_frames},
                     {"consonant", s.durations.consonant_frames},
                     {"silence", s.durations.silence_frames},
                     {"jitter", s.durations.jitter}}},
                   {"edge_silence", s.edge_silence},
                   {"table_seed", s.table_seed},
                   {"feature_noise", s.feature_noise},
                   {"articulatory_noise", s.articulatory_noise}};
  return j.dump(2) + "\n";
}

}  // namespace dysalign::pipeline
