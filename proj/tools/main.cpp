#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <mutex>
#include <optional>

#include <fmt/format.h>

#include "dysalign/align/grid.hpp"
#include "dysalign/core/error.hpp"
#include "dysalign/core/file.hpp"
#include "dysalign/pipeline/dataset.hpp"
#include "dysalign/pipeline/detector.hpp"
#include "dysalign/pipeline/evaluate.hpp"
#include "dysalign/pipeline/trainer.hpp"
#include "dysalign/report/report.hpp"

namespace fs = std::filesystem;
using namespace dysalign;

namespace {

enum Exit { kOk = 0, kOther = 1, kUsage = 2, kMissingInput = 3, kData = 4, kWrite = 5 };

struct MissingInput : Error {
  using Error::Error;
};

void require(const fs::path& p, const char* what) {
  if (!fs::exists(p)) throw MissingInput(fmt::format("{} not found: {}", what, p.string()));
}

void make_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", p.string(), ec.message()));
}

struct Options {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string in;
  std::vector<std::string> inputs;
  std::string out;
  std::string model;
  std::string gt;
  std::string mode;
  int jobs = 1;
};

// --config, then $DYSALIGN_CONFIG, then `fallback`, then defaults; --seed last.
pipeline::RunConfig resolve_config(const Options& o, const fs::path& fallback = {}) {
  pipeline::RunConfig c;
  fs::path path = o.config;
  if (path.empty())
    if (const char* env = std::getenv("DYSALIGN_CONFIG"); env && *env) path = env;
  if (path.empty() && !fallback.empty() && fs::exists(fallback)) path = fallback;
  if (!path.empty()) {
    require(path, "config");
    c = pipeline::load_config(path);
  }
  if (o.seed_set) {
    c.seed = o.seed;
    c.simulate.seed = o.seed;
  }
  c.validate();
  return c;
}

pipeline::Model load_model(const pipeline::RunConfig& c, const fs::path& dir) {
  require(dir, "model directory");
  pipeline::Model m(c);
  m.load(dir);
  return m;
}

int cmd_simulate(const Options& o) {
  require(o.in, "text file");
  auto c = resolve_config(o);
  if (!o.mode.empty()) c.simulate.mode = simulate::parse_codys_mode(o.mode);
  c.simulate.validate();
  const auto lex = pipeline::make_lexicon(c);
  const auto summary = simulate::generate_corpus(simulate::read_texts(o.in), lex, c.simulate, o.out, o.jobs);
  fmt::print("{} utterances, {} dysfluencies, digest {}\n", summary.utterances, summary.annotations, summary.digest);
  return kOk;
}

int cmd_train(const Options& o) {
  require(o.in, "corpus directory");
  const auto c = resolve_config(o);
  const auto data = pipeline::load_dataset(o.in, c);
  pipeline::Model model(c);
  model.init(c.seed);
  const double before = pipeline::alignment_objective(model, c, data, c.seed);
  const auto steps = pipeline::train(model, c, data, [&](const pipeline::StepReport& r) {
    if (r.step % 20 == 0 || r.step + 1 == c.train.steps)
      fmt::print(stderr, "step {:4d}  loss {:.4f}  lr {:.6f}\n", r.step, r.loss, r.learning_rate);
  });
  const double after = pipeline::alignment_objective(model, c, data, c.seed);
  make_dir(o.out);
  model.save(o.out);
  write_file(fs::path(o.out) / "config.json", pipeline::config_to_json(c));
  nlohmann::ordered_json train_log;
  train_log["alignment_objective"] = {{"initial", before}, {"final", after}};
  train_log["steps"] = nlohmann::ordered_json::array();
  for (const auto& s : steps) train_log["steps"].push_back({{"step", s.step}, {"loss", s.loss}, {"learning_rate", s.learning_rate}});
  write_file(fs::path(o.out) / "train_log.json", train_log.dump(2) + "\n");
  fmt::print("alignment objective {:.6f} -> {:.6f}\n", before, after);
  return kOk;
}

int cmd_align(const Options& o) {
  require(o.in, "corpus directory");
  const auto c = resolve_config(o, fs::path(o.model) / "config.json");
  auto model = load_model(c, o.model);
  const auto data = pipeline::load_dataset(o.in, c);
  pipeline::Detector det(model, c);
  make_dir(o.out);
  pipeline::parallel_for(data.size(), o.jobs, [&](std::size_t i) {
    const auto& u = data[i];
    const auto base = fs::path(o.out) / u.id;
    write_file(base.string() + ".emission.csv", align::grid_to_csv(det.emissions(u.features, u.reference)));
    write_file(base.string() + ".alignment.csv", align::alignment_to_csv(det.align(u.features, u.reference).spans));
  });
  fmt::print("aligned {} utterances\n", data.size());
  return kOk;
}

int cmd_detect(const Options& o) {
  require(o.in, "corpus directory");
  const auto c = resolve_config(o, fs::path(o.model) / "config.json");
  auto model = load_model(c, o.model);
  const auto data = pipeline::load_dataset(o.in, c);
  pipeline::Detector det(model, c);
  make_dir(o.out);
  pipeline::parallel_for(data.size(), o.jobs, [&](std::size_t i) {
    const auto& u = data[i];
    const auto d = det.detect({u.words, u.reference, u.reference_words, &u.features});
    const auto base = fs::path(o.out) / u.id;
    write_file(base.string() + ".annotations.json", serialize_annotations(d.annotations) + "\n");
    write_file(base.string() + ".phonemes.json", pipeline::phonemes_to_json(u.id, d.decoded, model.alphabet()));
  });
  fmt::print("detected {} utterances\n", data.size());
  return kOk;
}

std::vector<pipeline::UtteranceMetrics> score_split(const fs::path& pred, const std::vector<pipeline::Utterance>& gt) {
  require(pred, "prediction directory");
  std::vector<pipeline::UtteranceMetrics> out;
  for (const auto& u : gt) {
    const auto ann = pred / (u.id + ".annotations.json");
    require(ann, "prediction");
    const auto annotations = parse_annotations(read_file(ann));
    const auto ph = pred / (u.id + ".phonemes.json");
    std::optional<TimedTokenSequence> decoded;
    if (fs::exists(ph)) decoded = pipeline::phonemes_from_json(read_file(ph), PhonemeAlphabet::cmu());
    out.push_back(pipeline::evaluate_utterance(u.id, annotations, u.annotations, u.timed.total_frames(),
                                               decoded ? &*decoded : nullptr, &u.timed));
  }
  return out;
}

int cmd_evaluate(const Options& o) {
  require(o.gt, "ground-truth corpus");
  if (o.inputs.size() != 1 && o.inputs.size() != 3)
    throw ConfigError("evaluate takes one prediction directory, or three for the scaling factor");
  const auto gt = simulate::load_corpus(o.gt);
  std::vector<std::vector<pipeline::UtteranceMetrics>> splits;
  for (const auto& in : o.inputs) splits.push_back(score_split(in, gt));
  const auto text = pipeline::report_to_json(pipeline::make_report(std::move(splits)));
  if (o.out.empty())
    std::cout << text;
  else
    write_file(o.out, text);
  return kOk;
}

int cmd_report(const Options& o) {
  require(o.in, "prediction directory");
  require(o.gt, "corpus directory");
  const auto gt = simulate::load_corpus(o.gt);
  make_dir(o.out);
  for (const auto& u : gt) {
    const auto ann = fs::path(o.in) / (u.id + ".annotations.json");
    require(ann, "prediction");
    const auto annotations = parse_annotations(read_file(ann));
    const auto base = fs::path(o.out) / u.id;
    write_file(base.string() + ".report.txt", report::render_report(u.words, annotations));
    write_file(base.string() + ".flag.json", report::flag_json(report::extract_flag(annotations)) + "\n");
    write_file(base.string() + ".prompt.txt",
               report::mispronounced_prompt(u.words, u.timed, u.token_words, u.annotations) + "\n");
  }
  fmt::print("reported {} utterances\n", gt.size());
  return kOk;
}

int run_guarded(const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const MissingInput& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kMissingInput;
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kUsage;
  } catch (const IoError& e) {
    fmt::print(stderr, "I/O error: {}\n", e.what());
    return kWrite;
  } catch (const FormatError& e) {
    fmt::print(stderr, "data error: {}\n", e.what());
    return kData;
  } catch (const ShapeError& e) {
    fmt::print(stderr, "shape error: {}\n", e.what());
    return kData;
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kData;
  } catch (const std::exception& e) {
    fmt::print(stderr, "unexpected error: {}\n", e.what());
    return kOther;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dysfluency alignment toolkit: simulate, train, align, detect, evaluate, report"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool needs_in, bool needs_out) {
    sub->add_option("--config", o.config, "JSON run configuration (default: $DYSALIGN_CONFIG)");
    sub->add_option("--seed", o.seed, "Overrides the configured seed")->each([&](const std::string&) {
      o.seed_set = true;
    });
    auto* in = sub->add_option("--in", o.in, "Input path");
    auto* out = sub->add_option("--out", o.out, "Output path");
    if (needs_in) in->required();
    if (needs_out) out->required();
    sub->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  };

  auto* sim = app.add_subcommand("simulate", "Text lines -> simulated co-dysfluent corpus");
  common(sim, true, true);
  sim->add_option("--mode", o.mode, "fluent, single, multi or mixed");

  auto* train = app.add_subcommand("train", "Train the aligner on a simulated corpus");
  common(train, true, true);

  auto* align_cmd = app.add_subcommand("align", "Emission grids and LCS alignments as CSV");
  common(align_cmd, true, true);
  align_cmd->add_option("--model", o.model, "Trained model directory")->required();

  auto* detect = app.add_subcommand("detect", "Dysfluency annotations from a trained model");
  common(detect, true, true);
  detect->add_option("--model", o.model, "Trained model directory")->required();

  auto* eval = app.add_subcommand("evaluate", "Score predictions against a corpus");
  eval->add_option("--config", o.config, "JSON run configuration (default: $DYSALIGN_CONFIG)");
  eval->add_option("--in", o.inputs, "Prediction directory (give three for the scaling factor)")->required();
  eval->add_option("--gt", o.gt, "Ground-truth corpus directory")->required();
  eval->add_option("--out", o.out, "Metrics JSON (default: stdout)");

  auto* rep = app.add_subcommand("report", "Pronunciation reports, flags and prompts");
  common(rep, true, true);
  rep->add_option("--gt", o.gt, "Corpus the predictions belong to")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  return run_guarded([&] {
    if (*sim) return cmd_simulate(o);
    if (*train) return cmd_train(o);
    if (*align_cmd) return cmd_align(o);
    if (*detect) return cmd_detect(o);
    if (*eval) {
      // Config is only validated here; evaluation has no tunables.
      resolve_config(o);
      return cmd_evaluate(o);
    }
    resolve_config(o);
    return cmd_report(o);
  });
}
