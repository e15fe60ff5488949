#include "dysalign/simulate/inject.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "dysalign/core/error.hpp"

namespace dysalign::simulate {

namespace {

void shift_insert(std::vector<InjectedEvent>& events, std::size_t at, std::size_t count) {
  for (auto& e : events) {
    if (e.position >= at)
      e.position += count;
    else if (at < e.position + e.length)
      e.length += count;
  }
}

void shift_erase(std::vector<InjectedEvent>& events, std::size_t at) {
  for (auto& e : events) {
    if (at < e.position)
      --e.position;
    else if (at < e.position + e.length)
      --e.length;
  }
}

bool is_real(const Utterance& u, std::size_t i) {
  return u.tokens[i].word >= 0 && u.tokens[i].phoneme < u.alphabet->phoneme_count();
}

bool word_initial(const Utterance& u, std::size_t i) {
  for (std::size_t j = i; j-- > 0;) {
    if (u.tokens[j].word != u.tokens[i].word) return true;
    if (is_real(u, j)) return false;
  }
  return true;
}

std::size_t word_length(const Utterance& u, int word) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < u.tokens.size(); ++i)
    if (u.tokens[i].word == word && is_real(u, i)) ++n;
  return n;
}

std::vector<int> replacement_options(const Utterance& u, std::size_t p) {
  auto options = confusable(*u.alphabet, u.tokens[p].phoneme);
  auto drop = [&](int ph) { options.erase(std::remove(options.begin(), options.end(), ph), options.end()); };
  if (p > 0) drop(u.tokens[p - 1].phoneme);
  if (p + 1 < u.tokens.size()) drop(u.tokens[p + 1].phoneme);
  return options;
}

[[noreturn]] void reject(DysfluencyType type, std::size_t position, const char* why) {
  throw InvalidArgument(fmt::format("cannot inject {} at token {}: {}", to_string(type), position, why));
}

}  // namespace

std::vector<int> Utterance::phonemes() const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.phoneme);
  return out;
}

std::pair<std::size_t, std::size_t> Utterance::region(const InjectedEvent& e) const {
  return {e.position, e.position + e.length};
}

bool Utterance::tagged(std::size_t token) const {
  for (const auto& e : events) {
    auto [a, b] = region(e);
    if (token >= a && token < b) return true;
  }
  return false;
}

Utterance make_utterance(const std::vector<LexWord>& words, const PhonemeAlphabet& alphabet, bool edge_silence) {
  Utterance u;
  u.alphabet = &alphabet;
  if (edge_silence) u.tokens.push_back({alphabet.silence(), -1});
  for (std::size_t w = 0; w < words.size(); ++w) {
    u.words.push_back(words[w].text);
    for (int ph : words[w].phonemes) u.tokens.push_back({ph, static_cast<int>(w)});
  }
  if (edge_silence) u.tokens.push_back({alphabet.silence(), -1});
  return u;
}

const InjectedEvent& inject(Utterance& u, DysfluencyType type, std::size_t p, Rng& rng, const InjectOptions& opt,
                            const InjectLimits& limits) {
  if (p >= u.tokens.size()) reject(type, p, "position out of range");
  if (u.tokens[p].word < 0) reject(type, p, "position is outside every word");
  const PhonemeAlphabet& abc = *u.alphabet;
  InjectedEvent e;
  e.type = type;
  e.word = u.tokens[p].word;
  e.position = p;

  switch (type) {
    case DysfluencyType::Repetition: {
      std::size_t avail = 0;
      while (p + avail < u.tokens.size() && u.tokens[p + avail].word == e.word && is_real(u, p + avail)) ++avail;
      if (avail == 0) reject(type, p, "not a phoneme");
      const int cluster = opt.cluster.value_or(avail >= 2 ? 2 : 1);
      if (cluster < 1 || cluster > 2 || static_cast<std::size_t>(cluster) > avail)
        reject(type, p, "cluster must be 1-2 phonemes inside the word");
      const int repeats =
          opt.repeats.value_or(std::uniform_int_distribution<int>(1, limits.max_repeats)(rng));
      if (repeats < 1 || repeats > limits.max_repeats) reject(type, p, "repeat count out of range");
      std::vector<SimToken> copy;
      for (int r = 0; r < repeats; ++r)
        for (int c = 0; c < cluster; ++c) {
          SimToken t = u.tokens[p + c];
          t.duration_scale = 1.0;
          t.fixed_frames = 0;
          copy.push_back(t);
        }
      shift_insert(u.events, p, copy.size());
      u.tokens.insert(u.tokens.begin() + static_cast<std::ptrdiff_t>(p), copy.begin(), copy.end());
      e.length = copy.size();
      break;
    }
    case DysfluencyType::Block: {
      if (p == 0) reject(type, p, "nothing precedes the position");
      const std::int64_t frames = opt.block_frames.value_or(
          std::uniform_int_distribution<std::int64_t>(limits.block_min_frames, limits.block_max_frames)(rng));
      if (frames < 1) reject(type, p, "block must last at least one frame");
      shift_insert(u.events, p, 1);
      u.tokens.insert(u.tokens.begin() + static_cast<std::ptrdiff_t>(p), SimToken{abc.silence(), e.word, 1.0, frames});
      e.length = 1;
      break;
    }
    case DysfluencyType::Missing: {
      if (!is_real(u, p) || word_initial(u, p)) reject(type, p, "only non-initial phonemes can go missing");
      if (word_length(u, e.word) < 2) reject(type, p, "word is too short");
      e.original = u.tokens[p].phoneme;
      u.tokens.erase(u.tokens.begin() + static_cast<std::ptrdiff_t>(p));
      shift_erase(u.events, p);
      e.position = p - 1;
      e.length = p < u.tokens.size() && u.tokens[p].word == e.word ? 2 : 1;
      break;
    }
    case DysfluencyType::Replacement: {
      if (!is_real(u, p)) reject(type, p, "not a phoneme");
      int ph;
      if (opt.phoneme) {
        ph = *opt.phoneme;
        if (ph < 0 || ph >= abc.phoneme_count() || ph == u.tokens[p].phoneme)
          reject(type, p, "replacement must be a different phoneme");
      } else {
        const auto options = replacement_options(u, p);
        if (options.empty()) reject(type, p, "no confusable phoneme available");
        ph = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
      }
      e.original = u.tokens[p].phoneme;
      u.tokens[p].phoneme = ph;
      e.length = 1;
      break;
    }
    case DysfluencyType::Prolongation: {
      if (!is_real(u, p)) reject(type, p, "not a phoneme");
      e.factor = opt.factor.value_or(std::uniform_real_distribution<double>(limits.prolong_min, limits.prolong_max)(rng));
      if (!(e.factor > 1.0)) reject(type, p, "factor must exceed 1");
      u.tokens[p].duration_scale *= e.factor;
      e.length = 1;
      break;
    }
    case DysfluencyType::Insertion: {
      if (p == 0) reject(type, p, "nothing precedes the position");
      int ph;
      if (opt.phoneme) {
        ph = *opt.phoneme;
        if (ph < 0 || ph >= abc.phoneme_count()) reject(type, p, "inserted symbol must be a phoneme");
      } else {
        std::vector<int> options;
        for (int s = 0; s < abc.phoneme_count(); ++s)
          if (s != u.tokens[p - 1].phoneme && s != u.tokens[p].phoneme) options.push_back(s);
        ph = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
      }
      shift_insert(u.events, p, 1);
      u.tokens.insert(u.tokens.begin() + static_cast<std::ptrdiff_t>(p), SimToken{ph, e.word});
      e.length = 1;
      break;
    }
  }
  u.events.push_back(e);
  return u.events.back();
}

void revert_last(Utterance& u) {
  if (u.events.empty()) throw InvalidArgument("no event to revert");
  const InjectedEvent e = u.events.back();
  u.events.pop_back();
  switch (e.type) {
    case DysfluencyType::Repetition:
    case DysfluencyType::Block:
    case DysfluencyType::Insertion:
      for (std::size_t k = e.length; k-- > 0;) {
        u.tokens.erase(u.tokens.begin() + static_cast<std::ptrdiff_t>(e.position + k));
        shift_erase(u.events, e.position + k);
      }
      break;
    case DysfluencyType::Missing:
      shift_insert(u.events, e.position + 1, 1);
      u.tokens.insert(u.tokens.begin() + static_cast<std::ptrdiff_t>(e.position + 1), SimToken{e.original, e.word});
      break;
    case DysfluencyType::Replacement:
      u.tokens[e.position].phoneme = e.original;
      break;
    case DysfluencyType::Prolongation:
      u.tokens[e.position].duration_scale /= e.factor;
      break;
  }
}

std::vector<std::size_t> candidate_positions(const Utterance& u, DysfluencyType type) {
  std::vector<std::size_t> out;
  const std::size_t n = u.tokens.size();
  const int sil = u.alphabet->silence();
  for (std::size_t p = 0; p < n; ++p) {
    if (u.tokens[p].word < 0 || u.tagged(p)) continue;
    const int w = u.tokens[p].word;
    bool ok = false;
    switch (type) {
      case DysfluencyType::Repetition:
        ok = is_real(u, p) && word_initial(u, p) && p + 1 < n && u.tokens[p + 1].word == w && is_real(u, p + 1) &&
             !u.tagged(p + 1);
        break;
      case DysfluencyType::Block:
      case DysfluencyType::Insertion:
        ok = p > 0 && is_real(u, p) && u.tokens[p - 1].phoneme != sil && !u.tagged(p - 1);
        break;
      case DysfluencyType::Missing: {
        if (!is_real(u, p) || word_initial(u, p) || u.tagged(p - 1) || !is_real(u, p - 1)) break;
        ok = true;
        if (p + 1 < n) {
          if (u.tokens[p + 1].phoneme == u.tokens[p - 1].phoneme) ok = false;
          if (u.tokens[p + 1].word == w && u.tagged(p + 1)) ok = false;
        }
        break;
      }
      case DysfluencyType::Replacement:
        ok = is_real(u, p) && !replacement_options(u, p).empty();
        break;
      case DysfluencyType::Prolongation:
        ok = is_real(u, p);
        break;
    }
    if (ok) out.push_back(p);
  }
  return out;
}

}  // namespace dysalign::simulate
