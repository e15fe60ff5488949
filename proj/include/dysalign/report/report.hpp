#pragma once

#include <string>
#include <vector>

#include "dysalign/core/alphabet.hpp"
#include "dysalign/core/annotation.hpp"
#include "dysalign/core/time.hpp"

namespace dysalign::report {

struct WordProblems {
  std::size_t word = 0;  // index into PronunciationReport::words
  std::vector<DysfluencyAnnotation> problems;
};

struct PronunciationReport {
  std::vector<std::string> words;
  std::vector<WordProblems> entries;  // in word order, problems by start time
};

// Attaches each annotation to the first ground-truth word with the same text
// (case-insensitive). Throws InvalidArgument for a word not in the text.
PronunciationReport build_report(const std::vector<std::string>& words,
                                 const std::vector<DysfluencyAnnotation>& annotations);

// "0.50s" for events shorter than 0.1 s or without an end, else "0.50s-0.70s".
std::string format_time(const DysfluencyAnnotation& a);

// Fills the interface template: a header naming the ground-truth text, then
// one line per word that has problems. The final line of two or more reads
// "For the last word".
std::string render_report(const PronunciationReport& report);
std::string render_report(const std::vector<std::string>& words,
                          const std::vector<DysfluencyAnnotation>& annotations);

// 1 iff there is at least one entry.
int extract_flag(const std::vector<DysfluencyAnnotation>& annotations);
// {"has_dysfluency": <0|1>} with two-space indent.
std::string flag_json(int flag);
// Throws FormatError unless the text is exactly that object.
int parse_flag_json(const std::string& text);

// <Non-fluent Pronunciation>,<word><PH>...<Block>..., <word>...
// followed by <Ground Truth Text><w1><w2>... on the next line. Only words with
// at least one annotation are spelled out. SIL inside a word renders as
// <Block>; a prolonged phoneme is followed by <Prolongation>.
std::string mispronounced_prompt(const std::vector<std::string>& words, const TimedTokenSequence& spoken,
                                 const std::vector<int>& token_words,
                                 const std::vector<DysfluencyAnnotation>& annotations,
                                 const PhonemeAlphabet& alphabet = PhonemeAlphabet::cmu());

}  // namespace dysalign::report
