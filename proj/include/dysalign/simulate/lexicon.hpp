#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dysalign/core/alphabet.hpp"

namespace dysalign::simulate {

struct LexWord {
  std::string text;         // as written in the input
  std::vector<int> phonemes;
};

// Word -> phoneme ids. Lookups are case-insensitive.
class Lexicon {
 public:
  explicit Lexicon(const PhonemeAlphabet& alphabet = PhonemeAlphabet::cmu());

  // Small built-in CMU-derived table.
  static Lexicon builtin();
  // Adds "word<TAB>PH PH ..." lines; '#' starts a comment.
  void load(const std::filesystem::path& path);
  // Throws InvalidArgument when a phoneme is not in the alphabet.
  void add(std::string_view word, std::string_view phonemes);

  bool contains(std::string_view word) const;
  const std::vector<int>& lookup(std::string_view word) const;  // InvalidArgument if unknown

  // Splits on whitespace, strips punctuation at word edges.
  std::vector<LexWord> phonemize(std::string_view text) const;

  const PhonemeAlphabet& alphabet() const { return *alphabet_; }
  std::size_t size() const { return entries_.size(); }
  std::vector<std::string> words() const;  // sorted

 private:
  const PhonemeAlphabet* alphabet_;
  std::map<std::string, std::vector<int>> entries_;
};

// Symmetric confusable pairs (IY-EY, P-B, ...) used for replacements.
std::vector<int> confusable(const PhonemeAlphabet& alphabet, int phoneme);

}  // namespace dysalign::simulate
