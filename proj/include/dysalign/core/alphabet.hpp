#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dysalign {

// Ordered phoneme inventory with dense integer ids. The default inventory is
// the 39 CMU (ARPAbet, stressless) phonemes followed by SIL and a CTC blank.
class PhonemeAlphabet {
 public:
  static constexpr std::string_view kSilence = "SIL";
  static constexpr std::string_view kBlank = "<b>";

  // `symbols` must be unique and must not contain SIL or the blank; both are
  // appended (SIL, then blank).
  explicit PhonemeAlphabet(std::vector<std::string> symbols);

  static const PhonemeAlphabet& cmu();
  static std::vector<std::string> cmu_symbols();

  int size() const { return static_cast<int>(symbols_.size()); }
  // Number of real phonemes, i.e. everything except SIL and blank.
  int phoneme_count() const { return size() - 2; }
  int silence() const { return size() - 2; }
  int blank() const { return size() - 1; }

  const std::string& label(int id) const;
  std::optional<int> find(std::string_view label) const;
  // Throws InvalidArgument for unknown labels.
  int id(std::string_view label) const;

  const std::vector<std::string>& symbols() const { return symbols_; }

  bool is_vowel(int id) const;

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace dysalign
