#include <doctest.h>

#include <filesystem>
#include <json.hpp>
#include <random>

#include "dysalign/core/error.hpp"
#include "dysalign/core/file.hpp"
#include "dysalign/pipeline/config.hpp"
#include "dysalign/pipeline/dataset.hpp"
#include "dysalign/pipeline/detector.hpp"
#include "dysalign/pipeline/evaluate.hpp"
#include "dysalign/pipeline/trainer.hpp"

using namespace dysalign;
using namespace dysalign::pipeline;
namespace fs = std::filesystem;

namespace {

// Token embeddings equal to the simulator's feature table: a perfect frame
// classifier, so detector rules are tested on their own.
void use_table_embeddings(Model& m, const RunConfig& c) {
  const auto t = simulate::FeatureTables::make(c.simulate, m.alphabet());
  for (std::size_t s = 0; s < m.embeddings.mu.rows; ++s)
    for (std::size_t d = 0; d < m.embeddings.mu.cols; ++d) m.embeddings.mu(s, d) = t.features(d, s);
}

struct Case {
  DysfluencyType type;
  std::size_t position;
  simulate::InjectOptions options;
};

// "please call my sister":
//   0 SIL 1 P 2 L 3 IY 4 Z 5 K 6 AO 7 L 8 M 9 AY 10 S 11 IH 12 S 13 T 14 ER 15 SIL
std::vector<Case> single_cases(const PhonemeAlphabet& abc) {
  return {
      {DysfluencyType::Repetition, 5, {.cluster = 2, .repeats = 1}},
      {DysfluencyType::Repetition, 10, {.cluster = 2, .repeats = 2}},
      {DysfluencyType::Block, 2, {.block_frames = 15}},
      {DysfluencyType::Block, 8, {.block_frames = 12}},
      {DysfluencyType::Missing, 3, {}},
      {DysfluencyType::Missing, 4, {}},
      {DysfluencyType::Replacement, 3, {.phoneme = abc.id("EY")}},
      {DysfluencyType::Prolongation, 6, {.factor = 3.0}},
      {DysfluencyType::Prolongation, 13, {.factor = 2.5}},
      {DysfluencyType::Insertion, 9, {.phoneme = abc.id("G")}},
  };
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("dysalign_pipeline_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config defaults mirror the published hyperparameters") {
  const RunConfig c;
  for (double l : c.lambdas) CHECK(l == 1.0);
  CHECK(c.temperature == 2.0);
  CHECK(c.sigma_min == 0.01);
  CHECK(c.gestures == 40);
  CHECK(c.token_dim == 64);
  CHECK(c.learning_rate.initial == 0.001);
  CHECK(c.learning_rate.decay == 0.9);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("config parsing rejects unknown and mistyped fields with their path") {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message(R"({"sed": 1})") == "config: unknown field 'sed'");
  CHECK(message(R"({"train": {"stepz": 3}})") == "train: unknown field 'stepz'");
  CHECK(message(R"({"simulate": {"durations": {"vowl": 3}}})") == "simulate.durations: unknown field 'vowl'");
  CHECK(message(R"({"train": {"steps": "many"}})").find("train.steps: wrong type") == 0);
  CHECK(message(R"({"temperature": -1})").find("temperature") == 0);
  CHECK(message("not json").find("config") != std::string::npos);
  CHECK_THROWS_AS(parse_config(R"({"lambdas": [1, 1]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"simulate": {"mode": "chaos"}})"), ConfigError);
}

TEST_CASE("config survives a JSON round trip and seeds the simulator") {
  auto c = parse_config(R"({"seed": 9, "lambdas": [1, 0.5, 1, 2, 1, 0], "learning_rate": {"initial": 0.01},
                            "train": {"steps": 7, "consistency": "literal"},
                            "simulate": {"mode": "multi", "block_frames": [11, 20]}})");
  CHECK(c.seed == 9);
  CHECK(c.simulate.seed == 9);
  CHECK(c.lambdas[3] == 2.0);
  CHECK(c.train.steps == 7);
  CHECK(c.train.consistency == align::ConsistencyMode::Literal);
  CHECK(c.simulate.mode == simulate::CoDysMode::Multi);
  CHECK(c.simulate.limits.block_min_frames == 11);
  const auto text = config_to_json(c);
  CHECK(config_to_json(parse_config(text)) == text);
  CHECK(config_to_json(parse_config("{}")) == config_to_json(RunConfig{}));
}

TEST_CASE("load_config reports missing files and names the path on bad content") {
  CHECK_THROWS_AS(load_config("/nonexistent/dysalign.json"), IoError);
  const auto p = scratch("bad_config.json");
  write_file(p, R"({"train": {"batch": 2}})");
  try {
    load_config(p);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(p.string()) != std::string::npos);
  }
  fs::remove(p);
}

TEST_CASE("short runs merge into their longer neighbour") {
  auto tokens = [](const TimedTokenSequence& s) {
    std::vector<std::array<std::int64_t, 3>> out;
    for (const auto& t : s.tokens()) out.push_back({t.symbol, t.start, t.end});
    return out;
  };
  using V = std::vector<std::array<std::int64_t, 3>>;
  CHECK(tokens(merge_runs({1, 1, 1, 2, 1, 1}, 2)) == V{{1, 0, 6}});
  CHECK(tokens(merge_runs({1, 1, 2, 3, 3, 3}, 2)) == V{{1, 0, 2}, {3, 2, 6}});
  CHECK(tokens(merge_runs({5, 1, 1, 1}, 2)) == V{{1, 0, 4}});
  CHECK(tokens(merge_runs({1, 2, 3}, 1)) == V{{1, 0, 1}, {2, 1, 2}, {3, 2, 3}});
  CHECK(tokens(merge_runs({4}, 3)) == V{{4, 0, 1}});
  CHECK(merge_runs({}, 2).empty());
}

TEST_CASE("detector recovers each injected dysfluency type exactly") {
  RunConfig c;
  Model m(c);
  m.init(1);
  use_table_embeddings(m, c);
  Detector det(m, c);
  const auto lex = simulate::Lexicon::builtin();
  const auto& abc = lex.alphabet();
  const auto tables = simulate::FeatureTables::make(c.simulate, abc);
  std::uint64_t seed = 0;
  for (const auto& k : single_cases(abc)) {
    CAPTURE(to_string(k.type));
    CAPTURE(k.position);
    simulate::Rng rng(++seed);
    auto utt = simulate::make_utterance(lex.phonemize("please call my sister"), abc);
    std::vector<int> reference, reference_words;
    for (const auto& t : utt.tokens) {
      reference.push_back(t.phoneme);
      reference_words.push_back(t.word);
    }
    simulate::inject(utt, k.type, k.position, rng, k.options);
    const auto timed = simulate::synth_timed(utt, c.simulate.durations, rng);
    const auto gt = simulate::annotate(utt, timed);
    const auto x = simulate::render_features(tables.features, timed, abc.silence(), 0.3, rng);
    const auto d = det.detect({utt.words, reference, reference_words, &x});
    CHECK(d.decoded == timed);
    std::vector<DysfluencyAnnotation> expected;
    for (const auto& a : gt) expected.push_back(a.canonical());
    CHECK(serialize_annotations(d.annotations) == serialize_annotations(expected));
  }
}

TEST_CASE("detector reports nothing on fluent speech, including doubled phonemes across words") {
  RunConfig c;
  Model m(c);
  m.init(2);
  use_table_embeddings(m, c);
  Detector det(m, c);
  auto sim = c.simulate;
  sim.mode = simulate::CoDysMode::Fluent;
  // "with the" puts DH next to DH; "bus" is absent but "is sister" gives Z S.
  const auto data = simulate_dataset({"my friend will speak with the teacher", "she is near the sea today"},
                                     simulate::Lexicon::builtin(), sim);
  for (const auto& u : data) {
    const auto d = det.detect({u.words, u.reference, u.reference_words, &u.features});
    CHECK(d.annotations.empty());
  }
}

TEST_CASE("oracle detector on a simulated mixed corpus") {
  RunConfig c;
  Model m(c);
  m.init(3);
  use_table_embeddings(m, c);
  Detector det(m, c);
  auto sim = c.simulate;
  sim.seed = 11;
  const auto texts = simulate::read_texts(DYSALIGN_DEMO_DIR "/train.txt");
  const auto data = simulate_dataset(texts, simulate::Lexicon::builtin(), sim);
  std::vector<UtteranceMetrics> ms;
  for (const auto& u : data) {
    const auto d = det.detect({u.words, u.reference, u.reference_words, &u.features});
    ms.push_back(evaluate_utterance(u.id, d.annotations, u.annotations, u.timed.total_frames(), &d.decoded, &u.timed));
  }
  const auto agg = aggregate(ms);
  CHECK(agg.matching_score >= 0.9);
  CHECK(agg.strict_f1 >= 0.9);
}

TEST_CASE("detector input is validated") {
  RunConfig c;
  Model m(c);
  Detector det(m, c);
  FeatureMatrix x(64, 5);
  CHECK_THROWS_AS(det.detect({{"a"}, {1, 2}, {0}, &x}), InvalidArgument);
  CHECK_THROWS_AS(det.detect({{"a"}, {1}, {3}, &x}), InvalidArgument);
  CHECK_THROWS_AS(det.detect({{"a"}, {1}, {0}, nullptr}), InvalidArgument);
  FeatureMatrix wrong(10, 5);
  CHECK_THROWS_AS(det.decode(wrong), ShapeError);
}

TEST_CASE("evaluation of perfect and empty predictions") {
  const std::vector<DysfluencyAnnotation> gt = {{"please", DysfluencyType::Block, 10, 25},
                                                 {"call", DysfluencyType::Replacement, 40, 44}};
  const TimedTokenSequence phones({{1, 0, 10}, {2, 10, 25}, {3, 25, 50}});
  const auto same = evaluate_utterance("u", gt, gt, 50, &phones, &phones);
  CHECK(same.matching_score == 1.0);
  CHECK(same.strict.f1() == 1.0);
  CHECK(same.type.f1() == 1.0);
  CHECK(same.frames.f1() == 1.0);
  REQUIRE(same.dper);
  CHECK(same.dper->ratio() == 0.0);
  CHECK(same.flag == 1);

  const auto none = evaluate_utterance("u", {}, gt, 50);
  CHECK(none.matching_score == 0.0);
  CHECK(none.strict.f1() == 0.0);
  CHECK(none.flag == 0);
  CHECK_FALSE(none.dper);

  const auto agg = aggregate({same, none});
  CHECK(agg.matching_score == doctest::Approx(2.0 * 2 / (2 * 2 + 2)));
  CHECK(agg.mean_matching_score == doctest::Approx(0.5));
  CHECK(agg.fp_rate == 0.5);
  CHECK_FALSE(agg.dper);
  CHECK_THROWS_AS(aggregate({}), InvalidArgument);
}

TEST_CASE("short events are compared in their serialized form") {
  // 4 frames: the wire form keeps only the start, so both sides become points.
  const std::vector<DysfluencyAnnotation> gt = {{"call", DysfluencyType::Replacement, 40, 44}};
  const std::vector<DysfluencyAnnotation> pred = {{"call", DysfluencyType::Replacement, 40, std::nullopt}};
  CHECK(evaluate_utterance("u", pred, gt, 60).matching_score == 1.0);
}

TEST_CASE("frame labels mark event types") {
  const std::vector<DysfluencyAnnotation> ev = {{"a", DysfluencyType::Missing, 1, 3},
                                                 {"b", DysfluencyType::Insertion, 4, std::nullopt}};
  CHECK(event_frame_labels(ev, 6) == std::vector<int>{0, 2, 2, 0, 6, 0});
  CHECK(event_frame_labels(ev, 2) == std::vector<int>{0, 2});
}

TEST_CASE("evaluation report JSON carries splits and scaling factors") {
  const std::vector<DysfluencyAnnotation> gt = {{"a", DysfluencyType::Block, 0, 10}};
  const auto hit = evaluate_utterance("u", gt, gt, 20);
  const auto miss = evaluate_utterance("u", {}, gt, 20);
  const auto one = nlohmann::json::parse(report_to_json(make_report({{hit}})));
  CHECK(one["splits"].size() == 1);
  CHECK(one["splits"][0]["corpus"]["matching_score"] == 1.0);
  CHECK_FALSE(one.contains("scaling_factor"));
  const auto three = make_report({{miss}, {miss}, {hit}});
  REQUIRE(three.scaling);
  // (100 - 0) * 0.3 + (0 - 0) * 0.4
  CHECK((*three.scaling)[0] == doctest::Approx(30.0));
  CHECK(nlohmann::json::parse(report_to_json(three)).contains("scaling_factor"));
}

TEST_CASE("phoneme timelines round-trip through JSON") {
  const auto& abc = PhonemeAlphabet::cmu();
  const TimedTokenSequence seq({{abc.id("P"), 0, 4}, {abc.silence(), 4, 20}, {abc.id("IY"), 20, 26}});
  const auto text = phonemes_to_json("utt_0001", seq, abc);
  CHECK(phonemes_from_json(text, abc) == seq);
  CHECK_THROWS_AS(phonemes_from_json("{", abc), FormatError);
  CHECK_THROWS_AS(phonemes_from_json(R"({"tokens": [{"phoneme": "QQ", "start": 0, "end": 1}]})", abc), FormatError);
  CHECK_THROWS_AS(phonemes_from_json(R"({"tokens": [{"phoneme": "P", "start": 3, "end": 1}]})", abc), FormatError);
}

TEST_CASE("parallel_for runs every index and rethrows the lowest failure") {
  std::vector<int> hits(50, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::count(hits.begin(), hits.end(), 1) == 50);
  try {
    parallel_for(10, 3, [](std::size_t i) {
      if (i == 7 || i == 3) throw InvalidArgument("fail " + std::to_string(i));
    });
    FAIL("expected an error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()) == "fail 3");
  }
}

TEST_CASE("dataset checks dimensions against the config") {
  RunConfig c;
  auto data = simulate_dataset({"please call my sister"}, simulate::Lexicon::builtin(), c.simulate);
  CHECK_NOTHROW(check_dataset(data, c));
  RunConfig wrong = c;
  wrong.token_dim = 32;
  CHECK_THROWS_AS(check_dataset(data, wrong), ShapeError);
  wrong = c;
  wrong.articulatory_dim = 5;
  CHECK_THROWS_AS(check_dataset(data, wrong), ShapeError);
}

TEST_CASE("training is deterministic, lowers the loss and checkpoints losslessly") {
  RunConfig c;
  c.learning_rate.initial = 0.01;
  c.train.steps = 6;
  c.train.batch_size = 2;
  c.train.gestural_frames = 20;
  const auto data =
      simulate_dataset({"please call my sister", "we can see the sea", "the dog is near the door"},
                       simulate::Lexicon::builtin(), c.simulate);
  auto run = [&] {
    Model m(c);
    m.init(c.seed);
    train(m, c, data);
    return m;
  };
  Model a = run();
  Model b = run();
  const auto pa = a.parameters(), pb = b.parameters();
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i]->values == pb[i]->values);
  CHECK(a.dictionary.g == b.dictionary.g);

  Model fresh(c);
  fresh.init(c.seed);
  fit_dictionary(fresh, data, c.seed);
  CHECK(alignment_objective(a, c, data, 5) < alignment_objective(fresh, c, data, 5));

  const auto dir = scratch("ckpt");
  a.save(dir);
  Model loaded(c);
  loaded.load(dir);
  const auto pl = loaded.parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CAPTURE(pa[i]->name);
    REQUIRE(pl[i]->values.size() == pa[i]->values.size());
    for (std::size_t k = 0; k < pa[i]->values.size(); ++k)
      CHECK(pl[i]->values[k] == static_cast<double>(static_cast<float>(pa[i]->values[k])));
  }
  RunConfig other = c;
  other.token_dim = 32;
  Model mismatched(other);
  CHECK_THROWS_AS(mismatched.load(dir), ShapeError);
  fs::remove_all(dir);
}

TEST_CASE("utterance loss exposes every component and skips disabled ones") {
  RunConfig c;
  c.train.gestural_frames = 20;
  const auto data =
      simulate_dataset({"please call my sister", "we can see the sea", "the dog is near the door"},
                       simulate::Lexicon::builtin(), c.simulate);
  Model m(c);
  m.init(4);
  fit_dictionary(m, data, 4);
  grad::Session s;
  std::mt19937_64 rng(1);
  const auto all = utterance_loss(s, m, c, data[0], rng, std::nullopt);
  for (std::size_t i = 0; i < 6; ++i) CHECK(all.components[i].has_value());
  double sum = 0;
  for (const auto& v : all.components) sum += *v;
  CHECK(all.total == doctest::Approx(sum));

  c.lambdas = {0, 0, 1, 1, 0, 0};
  std::mt19937_64 rng2(1);
  const auto two = utterance_loss(s, m, c, data[0], rng2, 1.0);
  CHECK_FALSE(two.components[0]);
  CHECK_FALSE(two.components[1]);
  CHECK(two.components[2]);
  CHECK(two.components[3]);
  CHECK_FALSE(two.components[4]);
  CHECK_FALSE(two.components[5]);
  // Emissions enter the pre-alignment loss as constants by default, so only
  // the post-alignment loss reaches the embeddings; the aligner nets still learn.
  bool fcsa_grad = false;
  for (double g : m.fcsa.f2_w2.grads) fcsa_grad |= g != 0.0;
  CHECK(fcsa_grad);
}
