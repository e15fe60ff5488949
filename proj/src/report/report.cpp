#include "dysalign/report/report.hpp"

#include <algorithm>
#include <cctype>
#include <json.hpp>

#include <fmt/format.h>

#include "dysalign/core/error.hpp"

namespace dysalign::report {

namespace {

bool same_word(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

PronunciationReport build_report(const std::vector<std::string>& words,
                                 const std::vector<DysfluencyAnnotation>& annotations) {
  PronunciationReport r;
  r.words = words;
  std::vector<std::vector<DysfluencyAnnotation>> per(words.size());
  for (const auto& a : annotations) {
    a.validate();
    auto it = std::find_if(words.begin(), words.end(), [&](const std::string& w) { return same_word(w, a.word); });
    if (it == words.end()) throw InvalidArgument(fmt::format("annotated word '{}' is not in the ground truth", a.word));
    per[static_cast<std::size_t>(it - words.begin())].push_back(a);
  }
  for (std::size_t w = 0; w < words.size(); ++w) {
    if (per[w].empty()) continue;
    std::stable_sort(per[w].begin(), per[w].end(), [](const auto& x, const auto& y) { return x.start < y.start; });
    r.entries.push_back({w, std::move(per[w])});
  }
  return r;
}

std::string format_time(const DysfluencyAnnotation& a) {
  const auto c = a.canonical();
  if (!c.end) return fmt::format("{:.2f}s", c.start_seconds());
  return fmt::format("{:.2f}s-{:.2f}s", c.start_seconds(), *c.end_seconds());
}

std::string render_report(const PronunciationReport& r) {
  std::string out = fmt::format(
      "The speaker is attempting to speak the ground truth text \"{}\". "
      "We are going to analyze the pronunciation problem for each word:\n",
      join(r.words, " "));
  for (std::size_t i = 0; i < r.entries.size(); ++i) {
    const auto& e = r.entries[i];
    std::vector<std::string> clauses;
    for (const auto& a : e.problems) clauses.push_back(fmt::format("{} at time {}", to_string(a.type), format_time(a)));
    const bool last = r.entries.size() > 1 && i + 1 == r.entries.size();
    out += fmt::format("- For {} \"{}\", the pronunciation problems are {}.\n", last ? "the last word" : "word",
                       r.words[e.word], join(clauses, ", "));
  }
  return out;
}

std::string render_report(const std::vector<std::string>& words,
                          const std::vector<DysfluencyAnnotation>& annotations) {
  return render_report(build_report(words, annotations));
}

int extract_flag(const std::vector<DysfluencyAnnotation>& annotations) { return annotations.empty() ? 0 : 1; }

std::string flag_json(int flag) {
  if (flag != 0 && flag != 1) throw InvalidArgument("has_dysfluency must be 0 or 1");
  return fmt::format("{{\n  \"has_dysfluency\": {}\n}}", flag);
}

int parse_flag_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(fmt::format("flag JSON: {}", e.what()));
  }
  if (!j.is_object() || j.size() != 1 || !j.contains("has_dysfluency") || !j["has_dysfluency"].is_number_integer())
    throw FormatError("flag JSON must be {\"has_dysfluency\": 0|1}");
  const int v = j["has_dysfluency"].get<int>();
  if (v != 0 && v != 1) throw FormatError("has_dysfluency must be 0 or 1");
  return v;
}

std::string mispronounced_prompt(const std::vector<std::string>& words, const TimedTokenSequence& spoken,
                                 const std::vector<int>& token_words,
                                 const std::vector<DysfluencyAnnotation>& annotations,
                                 const PhonemeAlphabet& alphabet) {
  if (token_words.size() != spoken.size()) throw ShapeError("one word index per spoken token is required");
  // Word owning each annotation: the token under its start frame.
  std::vector<bool> flagged(words.size());
  std::vector<std::int64_t> prolonged;
  for (const auto& a : annotations) {
    int w = -1;
    for (std::size_t i = 0; i < spoken.size(); ++i)
      if (spoken[i].start <= a.start && a.start < spoken[i].end) w = token_words[i];
    if (w < 0) {
      auto it = std::find_if(words.begin(), words.end(), [&](const std::string& s) { return same_word(s, a.word); });
      if (it != words.end()) w = static_cast<int>(it - words.begin());
    }
    if (w >= 0 && static_cast<std::size_t>(w) < words.size()) flagged[static_cast<std::size_t>(w)] = true;
    if (a.type == DysfluencyType::Prolongation) prolonged.push_back(a.start);
  }
  std::vector<std::string> parts;
  for (std::size_t w = 0; w < words.size(); ++w) {
    if (!flagged[w]) continue;
    std::string s = "<" + words[w] + ">";
    for (std::size_t i = 0; i < spoken.size(); ++i) {
      if (token_words[i] != static_cast<int>(w)) continue;
      if (spoken[i].symbol == alphabet.silence()) {
        s += "<Block>";
        continue;
      }
      s += "<" + alphabet.label(spoken[i].symbol) + ">";
      if (std::find(prolonged.begin(), prolonged.end(), spoken[i].start) != prolonged.end()) s += "<Prolongation>";
    }
    parts.push_back(s);
  }
  std::string out = "<Non-fluent Pronunciation>";
  for (const auto& p : parts) out += "," + p;
  out += "\n<Ground Truth Text>";
  for (const auto& w : words) out += "<" + w + ">";
  return out;
}

}  // namespace dysalign::report
