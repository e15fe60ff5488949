#include "dysalign/simulate/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "dysalign/core/error.hpp"

namespace dysalign::simulate {

namespace {

constexpr std::pair<const char*, const char*> kBuiltin[] = {
    {"a", "AH"},
    {"about", "AH B AW T"},
    {"after", "AE F T ER"},
    {"again", "AH G EH N"},
    {"all", "AO L"},
    {"always", "AO L W EY Z"},
    {"and", "AH N D"},
    {"animal", "AE N AH M AH L"},
    {"are", "AA R"},
    {"around", "ER AW N D"},
    {"at", "AE T"},
    {"away", "AH W EY"},
    {"back", "B AE K"},
    {"bag", "B AE G"},
    {"ball", "B AO L"},
    {"because", "B IH K AH Z"},
    {"bed", "B EH D"},
    {"before", "B IH F AO R"},
    {"big", "B IH G"},
    {"bird", "B ER D"},
    {"black", "B L AE K"},
    {"blue", "B L UW"},
    {"boat", "B OW T"},
    {"book", "B UH K"},
    {"bread", "B R EH D"},
    {"bring", "B R IH NG"},
    {"brown", "B R AW N"},
    {"but", "B AH T"},
    {"call", "K AO L"},
    {"can", "K AE N"},
    {"car", "K AA R"},
    {"cat", "K AE T"},
    {"chair", "CH EH R"},
    {"child", "CH AY L D"},
    {"city", "S IH T IY"},
    {"clean", "K L IY N"},
    {"close", "K L OW Z"},
    {"cold", "K OW L D"},
    {"come", "K AH M"},
    {"could", "K UH D"},
    {"day", "D EY"},
    {"dog", "D AO G"},
    {"door", "D AO R"},
    {"down", "D AW N"},
    {"drink", "D R IH NG K"},
    {"each", "IY CH"},
    {"early", "ER L IY"},
    {"eat", "IY T"},
    {"every", "EH V R IY"},
    {"family", "F AE M AH L IY"},
    {"fast", "F AE S T"},
    {"father", "F AA DH ER"},
    {"find", "F AY N D"},
    {"fish", "F IH SH"},
    {"five", "F AY V"},
    {"floor", "F L AO R"},
    {"food", "F UW D"},
    {"for", "F AO R"},
    {"friend", "F R EH N D"},
    {"from", "F R AH M"},
    {"garden", "G AA R D AH N"},
    {"girl", "G ER L"},
    {"give", "G IH V"},
    {"go", "G OW"},
    {"good", "G UH D"},
    {"great", "G R EY T"},
    {"green", "G R IY N"},
    {"hand", "HH AE N D"},
    {"happy", "HH AE P IY"},
    {"have", "HH AE V"},
    {"he", "HH IY"},
    {"hello", "HH AH L OW"},
    {"help", "HH EH L P"},
    {"her", "HH ER"},
    {"here", "HH IY R"},
    {"home", "HH OW M"},
    {"house", "HH AW S"},
    {"i", "AY"},
    {"in", "IH N"},
    {"is", "IH Z"},
    {"it", "IH T"},
    {"jump", "JH AH M P"},
    {"keep", "K IY P"},
    {"kitchen", "K IH CH AH N"},
    {"know", "N OW"},
    {"late", "L EY T"},
    {"light", "L AY T"},
    {"like", "L AY K"},
    {"little", "L IH T AH L"},
    {"long", "L AO NG"},
    {"look", "L UH K"},
    {"make", "M EY K"},
    {"many", "M EH N IY"},
    {"milk", "M IH L K"},
    {"morning", "M AO R N IH NG"},
    {"mother", "M AH DH ER"},
    {"my", "M AY"},
    {"near", "N IH R"},
    {"need", "N IY D"},
    {"never", "N EH V ER"},
    {"new", "N UW"},
    {"night", "N AY T"},
    {"now", "N AW"},
    {"of", "AH V"},
    {"old", "OW L D"},
    {"on", "AA N"},
    {"open", "OW P AH N"},
    {"orange", "AO R AH N JH"},
    {"our", "AW ER"},
    {"outside", "AW T S AY D"},
    {"paper", "P EY P ER"},
    {"park", "P AA R K"},
    {"pen", "P EH N"},
    {"people", "P IY P AH L"},
    {"picture", "P IH K CH ER"},
    {"play", "P L EY"},
    {"please", "P L IY Z"},
    {"put", "P UH T"},
    {"rain", "R EY N"},
    {"read", "R IY D"},
    {"red", "R EH D"},
    {"river", "R IH V ER"},
    {"road", "R OW D"},
    {"room", "R UW M"},
    {"run", "R AH N"},
    {"school", "S K UW L"},
    {"sea", "S IY"},
    {"see", "S IY"},
    {"she", "SH IY"},
    {"shoes", "SH UW Z"},
    {"sing", "S IH NG"},
    {"sister", "S IH S T ER"},
    {"sleep", "S L IY P"},
    {"slowly", "S L OW L IY"},
    {"small", "S M AO L"},
    {"some", "S AH M"},
    {"speak", "S P IY K"},
    {"spoon", "S P UW N"},
    {"stop", "S T AA P"},
    {"street", "S T R IY T"},
    {"sun", "S AH N"},
    {"table", "T EY B AH L"},
    {"take", "T EY K"},
    {"talk", "T AO K"},
    {"teacher", "T IY CH ER"},
    {"the", "DH AH"},
    {"there", "DH EH R"},
    {"they", "DH EY"},
    {"thing", "TH IH NG"},
    {"think", "TH IH NG K"},
    {"this", "DH IH S"},
    {"three", "TH R IY"},
    {"time", "T AY M"},
    {"to", "T UW"},
    {"today", "T AH D EY"},
    {"tomorrow", "T AH M AA R OW"},
    {"tree", "T R IY"},
    {"two", "T UW"},
    {"under", "AH N D ER"},
    {"very", "V EH R IY"},
    {"visit", "V IH Z AH T"},
    {"voice", "V OY S"},
    {"wait", "W EY T"},
    {"walk", "W AO K"},
    {"want", "W AA N T"},
    {"warm", "W AO R M"},
    {"was", "W AA Z"},
    {"water", "W AO T ER"},
    {"we", "W IY"},
    {"went", "W EH N T"},
    {"what", "W AH T"},
    {"when", "W EH N"},
    {"where", "W EH R"},
    {"white", "W AY T"},
    {"will", "W IH L"},
    {"window", "W IH N D OW"},
    {"with", "W IH DH"},
    {"world", "W ER L D"},
    {"write", "R AY T"},
    {"yellow", "Y EH L OW"},
    {"yes", "Y EH S"},
    {"you", "Y UW"},
    {"young", "Y AH NG"},
    {"zoo", "Z UW"},
};

constexpr std::pair<const char*, const char*> kConfusable[] = {
    {"IY", "EY"}, {"IY", "IH"}, {"EH", "AE"}, {"AA", "AO"}, {"UW", "UH"}, {"AH", "AA"}, {"OW", "AO"},
    {"P", "B"},   {"T", "D"},   {"K", "G"},   {"S", "Z"},   {"F", "V"},   {"TH", "DH"}, {"SH", "ZH"},
    {"CH", "JH"}, {"M", "N"},   {"N", "NG"},  {"L", "R"},   {"W", "V"},   {"S", "SH"},  {"TH", "F"},
    {"Y", "JH"},  {"HH", "F"},  {"ER", "AH"}, {"AY", "EY"}, {"AW", "OW"}, {"OY", "AY"},
};

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

Lexicon::Lexicon(const PhonemeAlphabet& alphabet) : alphabet_(&alphabet) {}

Lexicon Lexicon::builtin() {
  Lexicon lex;
  for (const auto& [w, p] : kBuiltin) lex.add(w, p);
  return lex;
}

void Lexicon::add(std::string_view word, std::string_view phonemes) {
  std::istringstream in{std::string(phonemes)};
  std::vector<int> ids;
  std::string ph;
  while (in >> ph) {
    // Tolerate CMUdict stress digits.
    while (!ph.empty() && std::isdigit(static_cast<unsigned char>(ph.back()))) ph.pop_back();
    const auto id = alphabet_->find(ph);
    if (!id || *id >= alphabet_->phoneme_count())
      throw InvalidArgument("lexicon entry '" + std::string(word) + "' uses unknown phoneme '" + ph + "'");
    ids.push_back(*id);
  }
  if (ids.empty()) throw InvalidArgument("lexicon entry '" + std::string(word) + "' has no phonemes");
  entries_[lower(word)] = std::move(ids);
}

void Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read pronunciation table " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected word<TAB>phonemes");
    add(line.substr(0, tab), line.substr(tab + 1));
  }
}

bool Lexicon::contains(std::string_view word) const { return entries_.count(lower(word)) > 0; }

const std::vector<int>& Lexicon::lookup(std::string_view word) const {
  auto it = entries_.find(lower(word));
  if (it == entries_.end()) throw InvalidArgument("word '" + std::string(word) + "' is not in the lexicon");
  return it->second;
}

std::vector<std::string> Lexicon::words() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& kv : entries_) out.push_back(kv.first);
  return out;
}

std::vector<LexWord> Lexicon::phonemize(std::string_view text) const {
  std::vector<LexWord> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (in >> raw) {
    auto keep = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '\''; };
    std::size_t a = 0, b = raw.size();
    while (a < b && !keep(raw[a])) ++a;
    while (b > a && !keep(raw[b - 1])) --b;
    if (a == b) continue;
    const std::string word = raw.substr(a, b - a);
    out.push_back({word, lookup(word)});
  }
  return out;
}

std::vector<int> confusable(const PhonemeAlphabet& alphabet, int phoneme) {
  std::vector<int> out;
  const std::string& label = alphabet.label(phoneme);
  for (const auto& [a, b] : kConfusable) {
    if (label == a) out.push_back(alphabet.id(b));
    if (label == b) out.push_back(alphabet.id(a));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace dysalign::simulate
