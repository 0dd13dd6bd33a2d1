#pragma once

#include <array>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "excmine/util.hpp"

namespace excmine {

// Tag inventory for the token-level labeling task. The numeric order is
// canonical and used for deterministic tie-breaking.
enum class BioTag : int { O = 0, B_INC = 1, INC = 2, B_EXC = 3, EXC = 4 };

constexpr int kNumTags = 5;

inline const char* tag_name(BioTag t) {
  static const char* names[kNumTags] = {"O", "B_INC", "INC", "B_EXC", "EXC"};
  return names[static_cast<int>(t)];
}

inline std::optional<BioTag> tag_from_name(const std::string& s) {
  for (int i = 0; i < kNumTags; ++i)
    if (s == tag_name(static_cast<BioTag>(i))) return static_cast<BioTag>(i);
  return std::nullopt;
}

// Coarse phrase polarity: does the phrase signal that a spot accommodates
// (INC) or repels/restricts (EXC) a class of visitors.
enum class Coarse : int { INC = 0, EXC = 1 };

inline const char* coarse_name(Coarse c) { return c == Coarse::INC ? "INC" : "EXC"; }

inline std::optional<Coarse> coarse_from_name(const std::string& s) {
  if (s == "INC") return Coarse::INC;
  if (s == "EXC") return Coarse::EXC;
  return std::nullopt;
}

// The eleven fine-grained phrase categories, in canonical order.
enum class Category : int {
  AgeHeight = 0,
  Claustrophobia = 1,
  CouplesFamily = 2,
  Crowd = 3,
  Food = 4,
  Handicap = 5,
  Hygiene = 6,
  Parking = 7,
  Price = 8,
  Queues = 9,
  Time = 10,
};

constexpr int kNumCategories = 11;

inline const char* category_name(Category c) {
  static const char* names[kNumCategories] = {
      "AgeHeight", "Claustrophobia", "CouplesFamily", "Crowd",  "Food", "Handicap",
      "Hygiene",   "Parking",        "Price",         "Queues", "Time"};
  return names[static_cast<int>(c)];
}

inline std::optional<Category> category_from_name(const std::string& s) {
  for (int i = 0; i < kNumCategories; ++i)
    if (s == category_name(static_cast<Category>(i))) return static_cast<Category>(i);
  return std::nullopt;
}

struct Token {
  std::string text;
  std::string lower;

  Token() = default;
  explicit Token(std::string t) : text(std::move(t)), lower(ascii_lower(text)) {
    if (text.empty()) throw Error("token text must be non-empty");
    if (contains_whitespace(text)) throw Error("token text must not contain whitespace: '" + text + "'");
  }

  bool operator==(const Token& o) const { return text == o.text; }
};

struct Sentence {
  std::string id;
  std::string spot_id;  // empty when unknown
  std::vector<Token> tokens;
  std::optional<std::vector<BioTag>> tags;

  std::size_t size() const { return tokens.size(); }

  bool operator==(const Sentence& o) const {
    return id == o.id && spot_id == o.spot_id && tokens == o.tokens && tags == o.tags;
  }
};

// Half-open token span [start, end) within one sentence.
struct Phrase {
  std::string sentence_id;
  std::size_t start = 0;
  std::size_t end = 0;
  Coarse coarse = Coarse::INC;
  std::optional<Category> category;

  std::size_t length() const { return end - start; }

  bool operator==(const Phrase& o) const {
    return sentence_id == o.sentence_id && start == o.start && end == o.end &&
           coarse == o.coarse && category == o.category;
  }
};

struct Dataset {
  std::vector<Sentence> sentences;
  std::vector<Phrase> phrases;

  bool operator==(const Dataset& o) const {
    return sentences == o.sentences && phrases == o.phrases;
  }

  const Sentence* find_sentence(const std::string& id) const {
    for (const Sentence& s : sentences)
      if (s.id == id) return &s;
    return nullptr;
  }

  // Checks referential integrity: every phrase resolves to a sentence and
  // its span lies inside that sentence.
  void validate() const {
    std::unordered_map<std::string, std::size_t> len_by_id;
    for (const Sentence& s : sentences) {
      if (s.tokens.empty()) throw Error("sentence '" + s.id + "' has no tokens");
      if (s.tags && s.tags->size() != s.tokens.size())
        throw LengthMismatch("sentence '" + s.id + "': tag/token count mismatch");
      len_by_id[s.id] = s.tokens.size();
    }
    for (const Phrase& p : phrases) {
      auto it = len_by_id.find(p.sentence_id);
      if (it == len_by_id.end())
        throw Error("phrase references unknown sentence '" + p.sentence_id + "'");
      if (p.start >= p.end || p.end > it->second)
        throw SpanOutOfRange("phrase span [" + std::to_string(p.start) + "," +
                             std::to_string(p.end) + ") invalid in sentence '" +
                             p.sentence_id + "'");
    }
  }
};

// Per-category keyword sets used for candidate-sentence filtering and for
// the keyword-hit block of the phrase feature vector.
struct KeywordIndex {
  std::array<std::unordered_set<std::string>, kNumCategories> keywords;

  void add(Category c, const std::string& kw) {
    if (kw.empty()) throw Error("keyword must be non-empty");
    if (contains_whitespace(kw)) throw Error("keyword must be a single token: '" + kw + "'");
    if (kw != ascii_lower(kw)) throw Error("keyword must be lowercase: '" + kw + "'");
    keywords[static_cast<int>(c)].insert(kw);
  }

  bool contains(Category c, const std::string& lower_word) const {
    return keywords[static_cast<int>(c)].count(lower_word) > 0;
  }

  // Categories whose keyword set contains the word, in canonical order.
  std::vector<Category> categories_of(const std::string& lower_word) const {
    std::vector<Category> out;
    for (int i = 0; i < kNumCategories; ++i)
      if (keywords[i].count(lower_word)) out.push_back(static_cast<Category>(i));
    return out;
  }

  bool any(const std::string& lower_word) const {
    for (const auto& set : keywords)
      if (set.count(lower_word)) return true;
    return false;
  }

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& set : keywords) n += set.size();
    return n;
  }
};

}  // namespace excmine
