#include "dysalign/core/alphabet.hpp"

#include <algorithm>

#include "dysalign/core/error.hpp"

namespace dysalign {

namespace {

constexpr const char* kCmu[] = {"AA", "AE", "AH", "AO", "AW", "AY", "B",  "CH", "D",  "DH",
                                 "EH", "ER", "EY", "F",  "G",  "HH", "IH", "IY", "JH", "K",
                                 "L",  "M",  "N",  "NG", "OW", "OY", "P",  "R",  "S",  "SH",
                                 "T",  "TH", "UH", "UW", "V",  "W",  "Y",  "Z",  "ZH"};

constexpr const char* kVowels[] = {"AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER",
                                   "EY", "IH", "IY", "OW", "OY", "UH", "UW"};

}  // namespace

PhonemeAlphabet::PhonemeAlphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  symbols_.emplace_back(kSilence);
  symbols_.emplace_back(kBlank);
  for (int i = 0; i < size(); ++i) {
    auto [it, inserted] = index_.emplace(symbols_[i], i);
    if (!inserted) throw InvalidArgument("duplicate phoneme symbol '" + symbols_[i] + "'");
  }
}

std::vector<std::string> PhonemeAlphabet::cmu_symbols() { return {std::begin(kCmu), std::end(kCmu)}; }

const PhonemeAlphabet& PhonemeAlphabet::cmu() {
  static const PhonemeAlphabet alphabet(cmu_symbols());
  return alphabet;
}

const std::string& PhonemeAlphabet::label(int id) const {
  if (id < 0 || id >= size()) throw InvalidArgument("phoneme id out of range: " + std::to_string(id));
  return symbols_[id];
}

std::optional<int> PhonemeAlphabet::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int PhonemeAlphabet::id(std::string_view label) const {
  if (auto found = find(label)) return *found;
  throw InvalidArgument("unknown phoneme '" + std::string(label) + "'");
}

bool PhonemeAlphabet::is_vowel(int id) const {
  const std::string& l = label(id);
  return std::any_of(std::begin(kVowels), std::end(kVowels), [&](const char* v) { return l == v; });
}

}  // namespace dysalign
