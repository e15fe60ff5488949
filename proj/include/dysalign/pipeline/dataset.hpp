#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "dysalign/pipeline/config.hpp"
#include "dysalign/simulate/corpus.hpp"
#include "dysalign/simulate/lexicon.hpp"

namespace dysalign::pipeline {

using Utterance = simulate::SimulatedUtterance;

// Reads a simulated corpus directory and checks its matrices against the
// configured dimensions (ShapeError naming the utterance otherwise).
std::vector<Utterance> load_dataset(const std::filesystem::path& dir, const RunConfig& config);

// Same utterances generate_corpus would write, kept in memory.
std::vector<Utterance> simulate_dataset(const std::vector<std::string>& texts, const simulate::Lexicon& lexicon,
                                        const simulate::SimulationConfig& config);

void check_dataset(const std::vector<Utterance>& data, const RunConfig& config);

// Runs fn(0..n-1) on up to `jobs` threads. Every index runs; the error of
// the lowest failing index is rethrown.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

// Builtin lexicon, extended by the configured table when one is set.
simulate::Lexicon make_lexicon(const RunConfig& config);

}  // namespace dysalign::pipeline
