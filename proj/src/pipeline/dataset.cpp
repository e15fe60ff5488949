#include "dysalign/pipeline/dataset.hpp"

#include <atomic>
#include <exception>
#include <thread>

#include <fmt/format.h>

#include "dysalign/core/error.hpp"

namespace dysalign::pipeline {

void check_dataset(const std::vector<Utterance>& data, const RunConfig& config) {
  for (const auto& u : data) {
    const auto frames = static_cast<std::uint32_t>(u.timed.total_frames());
    if (u.features.rows() != static_cast<std::uint32_t>(config.token_dim))
      throw ShapeError(fmt::format("{}: features have {} rows, token_dim is {}", u.id, u.features.rows(),
                                   config.token_dim));
    if (u.articulatory.rows() != static_cast<std::uint32_t>(config.articulatory_dim))
      throw ShapeError(fmt::format("{}: articulatory features have {} rows, articulatory_dim is {}", u.id,
                                   u.articulatory.rows(), config.articulatory_dim));
    if (u.features.cols() != frames || u.articulatory.cols() != frames)
      throw ShapeError(fmt::format("{}: feature frames do not match the token timeline ({})", u.id, frames));
    if (u.reference.empty()) throw ShapeError(fmt::format("{}: empty reference", u.id));
  }
}

std::vector<Utterance> load_dataset(const std::filesystem::path& dir, const RunConfig& config) {
  auto data = simulate::load_corpus(dir);
  check_dataset(data, config);
  return data;
}

std::vector<Utterance> simulate_dataset(const std::vector<std::string>& texts, const simulate::Lexicon& lexicon,
                                        const simulate::SimulationConfig& config) {
  config.validate();
  const auto tables = simulate::FeatureTables::make(config, lexicon.alphabet());
  std::vector<Utterance> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i)
    out.push_back(simulate::simulate_utterance(texts[i], i, lexicon, config, tables));
  return out;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, jobs));
  if (threads == 1 || n < 2) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

simulate::Lexicon make_lexicon(const RunConfig& config) {
  auto lex = simulate::Lexicon::builtin();
  if (!config.lexicon.empty()) lex.load(config.lexicon);
  return lex;
}

}  // namespace dysalign::pipeline
