#include "dysalign/simulate/corpus.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "dysalign/core/error.hpp"
#include "dysalign/core/file.hpp"

namespace dysalign::simulate {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(CoDysMode mode) {
  switch (mode) {
    case CoDysMode::Fluent: return "fluent";
    case CoDysMode::Single: return "single";
    case CoDysMode::Multi: return "multi";
    case CoDysMode::Mixed: return "mixed";
  }
  return "?";
}

CoDysMode parse_codys_mode(std::string_view name) {
  for (auto m : {CoDysMode::Fluent, CoDysMode::Single, CoDysMode::Multi, CoDysMode::Mixed})
    if (to_string(m) == name) return m;
  throw ConfigError(fmt::format("unknown simulation mode '{}'", name));
}

void SimulationConfig::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0 && p <= 1)) throw ConfigError(fmt::format("{} must lie in [0, 1]", name));
  };
  prob(single_fraction, "single_fraction");
  prob(three_instance_prob, "three_instance_prob");
  double total = 0;
  for (double w : type_weights) {
    if (!(w >= 0)) throw ConfigError("type weights must be non-negative");
    total += w;
  }
  if ((mode == CoDysMode::Single || mode == CoDysMode::Mixed) && !(total > 0))
    throw ConfigError("at least one type weight must be positive");
  if (limits.block_min_frames < 1 || limits.block_max_frames < limits.block_min_frames)
    throw ConfigError("block duration range is empty");
  if (!(limits.prolong_min > 1) || limits.prolong_max < limits.prolong_min)
    throw ConfigError("prolongation range must lie above 1");
  if (limits.max_repeats < 1) throw ConfigError("max_repeats must be at least 1");
  if (durations.vowel_frames < 1 || durations.consonant_frames < 1 || durations.silence_frames < 1 ||
      durations.jitter < 0)
    throw ConfigError("durations must be positive");
  if (std::max({durations.vowel_frames, durations.consonant_frames, durations.silence_frames}) - durations.jitter < 1)
    throw ConfigError("jitter exceeds a base duration");
  if (feature_dim < 1 || articulatory_dim < 1) throw ConfigError("feature dimensions must be positive");
  if (!(feature_noise >= 0) || !(articulatory_noise >= 0)) throw ConfigError("noise levels must be non-negative");
}

double SimulationConfig::expected_count() const {
  const double single = 2.0 + three_instance_prob;
  switch (mode) {
    case CoDysMode::Fluent: return 0;
    case CoDysMode::Single: return single;
    case CoDysMode::Multi: return 2;
    case CoDysMode::Mixed: return single_fraction * single + (1 - single_fraction) * 2;
  }
  return 0;
}

namespace {

void place(Utterance& utt, DysfluencyType type, std::set<int>& used_words, const SimulationConfig& cfg, Rng& rng) {
  auto cands = candidate_positions(utt, type);
  std::vector<std::size_t> fresh;
  for (auto p : cands)
    if (!used_words.count(utt.tokens[p].word)) fresh.push_back(p);
  const auto& pool = fresh.empty() ? cands : fresh;
  if (pool.empty())
    throw InvalidArgument(fmt::format("utterance too short: no position left for {}", to_string(type)));
  const auto p = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
  used_words.insert(utt.tokens[p].word);
  inject(utt, type, p, rng, {}, cfg.limits);
}

std::string hex(const unsigned char* d, unsigned n) {
  std::string s;
  for (unsigned i = 0; i < n; ++i) s += fmt::format("{:02x}", d[i]);
  return s;
}

struct Bundle {
  std::string tokens_json;
  std::string annotations_json;
  std::string features;
  std::string articulatory;
  std::int64_t frames = 0;
  std::size_t events = 0;
};

std::string tokens_json(const SimulatedUtterance& u, const PhonemeAlphabet& abc) {
  json j;
  j["id"] = u.id;
  j["text"] = u.text;
  j["words"] = u.words;
  json ref = json::array();
  for (int s : u.reference) ref.push_back(abc.label(s));
  j["reference"] = ref;
  j["reference_words"] = u.reference_words;
  json toks = json::array();
  for (std::size_t i = 0; i < u.timed.size(); ++i)
    toks.push_back({{"phoneme", abc.label(u.timed[i].symbol)},
                    {"word", u.token_words[i]},
                    {"start", u.timed[i].start},
                    {"end", u.timed[i].end}});
  j["tokens"] = toks;
  return j.dump(2) + "\n";
}

}  // namespace

CoDysResult co_dysfluency(Utterance& utt, const SimulationConfig& cfg, Rng& rng) {
  CoDysMode mode = cfg.mode;
  if (mode == CoDysMode::Mixed)
    mode = std::bernoulli_distribution(cfg.single_fraction)(rng) ? CoDysMode::Single : CoDysMode::Multi;
  std::set<int> used;
  if (mode == CoDysMode::Single) {
    std::discrete_distribution<int> pick(cfg.type_weights.begin(), cfg.type_weights.end());
    const auto type = kAllDysfluencyTypes[pick(rng)];
    const int count = std::bernoulli_distribution(cfg.three_instance_prob)(rng) ? 3 : 2;
    for (int i = 0; i < count; ++i) place(utt, type, used, cfg, rng);
  } else if (mode == CoDysMode::Multi) {
    const auto& combo = kCombos[std::uniform_int_distribution<std::size_t>(0, kCombos.size() - 1)(rng)];
    place(utt, combo.first, used, cfg, rng);
    place(utt, combo.second, used, cfg, rng);
  }
  CoDysResult r;
  r.timed = synth_timed(utt, cfg.durations, rng);
  r.annotations = annotate(utt, r.timed);
  return r;
}

FeatureTables FeatureTables::make(const SimulationConfig& cfg, const PhonemeAlphabet& abc) {
  Rng rng(cfg.table_seed);
  std::normal_distribution<double> n01;
  FeatureTables t;
  const auto v = static_cast<std::uint32_t>(abc.size());
  t.features = FeatureMatrix(static_cast<std::uint32_t>(cfg.feature_dim), v);
  for (std::uint32_t c = 0; c < v; ++c)
    for (std::uint32_t r = 0; r < t.features.rows(); ++r) t.features(r, c) = static_cast<float>(n01(rng));
  t.articulatory = FeatureMatrix(static_cast<std::uint32_t>(cfg.articulatory_dim), v);
  for (std::uint32_t c = 0; c < v; ++c)
    for (std::uint32_t r = 0; r < t.articulatory.rows(); ++r) t.articulatory(r, c) = static_cast<float>(n01(rng));
  return t;
}

FeatureMatrix render_features(const FeatureMatrix& table, const TimedTokenSequence& timed, int gap, double noise,
                              Rng& rng) {
  const auto labels = timed.frame_labels(gap);
  std::normal_distribution<double> n01;
  FeatureMatrix m(table.rows(), static_cast<std::uint32_t>(labels.size()));
  for (std::uint32_t t = 0; t < m.cols(); ++t) {
    const auto col = static_cast<std::uint32_t>(labels[t]);
    if (col >= table.cols()) throw ShapeError("feature table has no column for a label");
    for (std::uint32_t r = 0; r < m.rows(); ++r)
      m(r, t) = static_cast<float>(table(r, col) + noise * n01(rng));
  }
  return m;
}

std::string utterance_id(std::size_t index) { return fmt::format("utt_{:04d}", index); }

SimulatedUtterance simulate_utterance(const std::string& text, std::size_t index, const Lexicon& lexicon,
                                      const SimulationConfig& cfg, const FeatureTables& tables) {
  const auto& abc = lexicon.alphabet();
  const auto words = lexicon.phonemize(text);
  if (words.empty()) throw InvalidArgument("empty utterance text");
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  Rng rng(seq);

  Utterance utt = make_utterance(words, abc, cfg.edge_silence);
  SimulatedUtterance out;
  out.id = utterance_id(index);
  out.text = text;
  out.words = utt.words;
  for (const auto& t : utt.tokens) {
    out.reference.push_back(t.phoneme);
    out.reference_words.push_back(t.word);
  }
  auto result = co_dysfluency(utt, cfg, rng);
  out.timed = std::move(result.timed);
  out.annotations = std::move(result.annotations);
  for (const auto& t : utt.tokens) out.token_words.push_back(t.word);
  out.features = render_features(tables.features, out.timed, abc.silence(), cfg.feature_noise, rng);
  out.articulatory = render_features(tables.articulatory, out.timed, abc.silence(), cfg.articulatory_noise, rng);
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  return hex(digest, len);
}

std::vector<std::string> read_texts(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) out.push_back(line);
  }
  return out;
}

CorpusSummary generate_corpus(const std::vector<std::string>& texts, const Lexicon& lexicon,
                              const SimulationConfig& cfg, const fs::path& out, int jobs) {
  cfg.validate();
  if (texts.empty()) throw InvalidArgument("no utterance texts given");
  // Fail on unknown words before touching the output directory.
  for (const auto& t : texts) lexicon.phonemize(t);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw IoError("cannot create output directory " + out.string());

  const auto tables = FeatureTables::make(cfg, lexicon.alphabet());
  std::vector<Bundle> bundles(texts.size());
  std::vector<std::exception_ptr> errors(texts.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < texts.size();) {
      try {
        const auto u = simulate_utterance(texts[i], i, lexicon, cfg, tables);
        Bundle b;
        b.tokens_json = tokens_json(u, lexicon.alphabet());
        b.annotations_json = serialize_annotations(u.annotations) + "\n";
        b.features = encode_matrix(u.features);
        b.articulatory = encode_matrix(u.articulatory);
        b.frames = u.timed.total_frames();
        b.events = u.annotations.size();
        const auto base = out / u.id;
        write_file(base.string() + ".features.nafm", b.features);
        write_file(base.string() + ".articulatory.nafm", b.articulatory);
        write_file(base.string() + ".tokens.json", b.tokens_json);
        write_file(base.string() + ".annotations.json", b.annotations_json);
        bundles[i] = std::move(b);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(texts.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  CorpusSummary summary;
  summary.utterances = texts.size();
  std::string hashed;
  json items = json::array();
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto id = utterance_id(i);
    const auto& b = bundles[i];
    for (const auto& [suffix, bytes] : {std::pair<const char*, const std::string*>{".features.nafm", &b.features},
                                        {".articulatory.nafm", &b.articulatory},
                                        {".tokens.json", &b.tokens_json},
                                        {".annotations.json", &b.annotations_json}}) {
      hashed += id + suffix + "\n";
      hashed += *bytes;
    }
    summary.annotations += b.events;
    items.push_back({{"id", id}, {"text", texts[i]}, {"frames", b.frames}, {"dysfluencies", b.events}});
  }
  summary.digest = sha256_hex(hashed);
  json manifest;
  manifest["count"] = texts.size();
  manifest["mode"] = to_string(cfg.mode);
  manifest["seed"] = cfg.seed;
  manifest["table_seed"] = cfg.table_seed;
  manifest["frame_rate"] = kFramesPerSecond;
  manifest["utterances"] = items;
  manifest["digest"] = summary.digest;
  write_file(out / "manifest.json", manifest.dump(2) + "\n");
  return summary;
}

std::vector<SimulatedUtterance> load_corpus(const fs::path& dir) {
  const auto& abc = PhonemeAlphabet::cmu();
  json manifest;
  try {
    manifest = json::parse(read_file(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("{}: {}", (dir / "manifest.json").string(), e.what()));
  }
  std::vector<SimulatedUtterance> out;
  try {
    for (const auto& item : manifest.at("utterances")) {
      SimulatedUtterance u;
      u.id = item.at("id").get<std::string>();
      const auto base = (dir / u.id).string();
      const auto tj = json::parse(read_file(base + ".tokens.json"));
      u.text = tj.at("text").get<std::string>();
      u.words = tj.at("words").get<std::vector<std::string>>();
      for (const auto& s : tj.at("reference")) u.reference.push_back(abc.id(s.get<std::string>()));
      u.reference_words = tj.at("reference_words").get<std::vector<int>>();
      std::vector<TimedToken> toks;
      for (const auto& t : tj.at("tokens")) {
        toks.push_back({abc.id(t.at("phoneme").get<std::string>()), t.at("start").get<std::int64_t>(),
                        t.at("end").get<std::int64_t>()});
        u.token_words.push_back(t.at("word").get<int>());
      }
      u.timed = TimedTokenSequence(std::move(toks));
      u.annotations = read_annotations(base + ".annotations.json");
      u.features = read_matrix(base + ".features.nafm");
      u.articulatory = read_matrix(base + ".articulatory.nafm");
      if (u.features.cols() != u.timed.total_frames() || u.articulatory.cols() != u.features.cols())
        throw ShapeError(u.id + ": feature frames do not match the token timing");
      out.push_back(std::move(u));
    }
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("{}: {}", dir.string(), e.what()));
  } catch (const InvalidArgument& e) {
    throw FormatError(fmt::format("{}: {}", dir.string(), e.what()));
  }
  return out;
}

}  // namespace dysalign::simulate
