#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "excmine/bio.hpp"
#include "excmine/types.hpp"
#include "excmine/util.hpp"

namespace excmine {

// Whitespace split, then leading/trailing punctuation characters are peeled
// off as single-character tokens. Interior punctuation (don't, 3.5) stays.
inline std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> tokens;
  for (const std::string& chunk : split_ws(text)) {
    std::size_t lo = 0, hi = chunk.size();
    while (lo < hi && ascii_punct(chunk[lo])) ++lo;
    while (hi > lo && ascii_punct(chunk[hi - 1])) --hi;
    for (std::size_t i = 0; i < lo; ++i) tokens.emplace_back(std::string(1, chunk[i]));
    if (hi > lo) tokens.emplace_back(chunk.substr(lo, hi - lo));
    for (std::size_t i = hi; i < chunk.size(); ++i)
      tokens.emplace_back(std::string(1, chunk[i]));
  }
  return tokens;
}

// Splits review text on sentence-final punctuation runs. The terminator
// stays with its sentence.
inline std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  std::size_t i = 0;
  auto is_final = [](char c) { return c == '.' || c == '!' || c == '?'; };
  while (i < text.size()) {
    if (is_final(text[i])) {
      while (i < text.size() && is_final(text[i])) ++i;
      if (i == text.size() || ascii_space(text[i])) {
        std::string piece = text.substr(start, i - start);
        if (!split_ws(piece).empty()) out.push_back(piece);
        start = i;
      }
    } else {
      ++i;
    }
  }
  std::string tail = text.substr(start);
  if (!split_ws(tail).empty()) out.push_back(tail);
  return out;
}

struct KeywordMatch {
  Sentence sentence;
  std::vector<Category> categories;  // canonical order
};

// Keeps sentences with at least one token whose lowercased form appears in
// some category's keyword set. Matching is exact on lowercased single
// tokens; input order is preserved.
inline std::vector<KeywordMatch> filter_candidate_sentences(
    std::span<const Sentence> sentences, const KeywordIndex& index) {
  std::vector<KeywordMatch> out;
  for (const Sentence& s : sentences) {
    std::array<bool, kNumCategories> hit{};
    bool any = false;
    for (const Token& tok : s.tokens) {
      for (Category c : index.categories_of(tok.lower)) {
        hit[static_cast<int>(c)] = true;
        any = true;
      }
    }
    if (!any) continue;
    KeywordMatch m;
    m.sentence = s;
    for (int i = 0; i < kNumCategories; ++i)
      if (hit[i]) m.categories.push_back(static_cast<Category>(i));
    out.push_back(std::move(m));
  }
  return out;
}

struct SplitResult {
  Dataset train, dev, test;
};

// Seeded shuffle followed by a contiguous partition. Part sizes are floors
// of ratio*n with the remainder going to train. Phrases follow their
// sentences.
inline SplitResult split_dataset(const Dataset& data, std::array<double, 3> ratios,
                                 std::uint64_t seed) {
  double sum = ratios[0] + ratios[1] + ratios[2];
  for (double r : ratios)
    if (r < 0.0) throw BadRatios("split ratios must be non-negative");
  if (std::abs(sum - 1.0) > 1e-9)
    throw BadRatios("split ratios must sum to 1, got " + format_double(sum));

  std::size_t n = data.sentences.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  deterministic_shuffle(order, rng);

  std::size_t n_train = static_cast<std::size_t>(std::floor(ratios[0] * static_cast<double>(n)));
  std::size_t n_dev = static_cast<std::size_t>(std::floor(ratios[1] * static_cast<double>(n)));
  std::size_t n_test = static_cast<std::size_t>(std::floor(ratios[2] * static_cast<double>(n)));
  n_train += n - (n_train + n_dev + n_test);

  SplitResult result;
  auto part_of = [&](std::size_t pos) -> Dataset& {
    if (pos < n_train) return result.train;
    if (pos < n_train + n_dev) return result.dev;
    return result.test;
  };
  std::map<std::string, Dataset*> dest_by_id;
  for (std::size_t pos = 0; pos < n; ++pos) {
    Dataset& part = part_of(pos);
    const Sentence& s = data.sentences[order[pos]];
    part.sentences.push_back(s);
    dest_by_id[s.id] = &part;
  }
  for (const Phrase& p : data.phrases) {
    auto it = dest_by_id.find(p.sentence_id);
    if (it == dest_by_id.end())
      throw Error("phrase references unknown sentence '" + p.sentence_id + "'");
    it->second->phrases.push_back(p);
  }
  return result;
}

// Chance-corrected agreement between two annotators over the same items.
template <typename T>
double cohen_kappa(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size())
    throw LengthMismatch("annotator label lists differ in length: " +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  if (a.empty()) throw EmptyInput("annotator label lists are empty");

  std::map<T, std::pair<std::size_t, std::size_t>> marginals;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) ++agree;
    marginals[a[i]].first++;
    marginals[b[i]].second++;
  }
  double n = static_cast<double>(a.size());
  double p_o = static_cast<double>(agree) / n;
  double p_e = 0.0;
  for (const auto& [label, counts] : marginals)
    p_e += (static_cast<double>(counts.first) / n) * (static_cast<double>(counts.second) / n);
  if (p_e >= 1.0) return 1.0;
  return (p_o - p_e) / (1.0 - p_e);
}

template <typename T>
double cohen_kappa(const std::vector<T>& a, const std::vector<T>& b) {
  return cohen_kappa(std::span<const T>(a), std::span<const T>(b));
}

struct LabelDistribution {
  std::array<std::size_t, kNumTags> tag_counts{};
  std::array<std::size_t, kNumCategories> category_counts{};
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  std::size_t tagged_tokens = 0;
  std::size_t phrases = 0;
  std::size_t categorized_phrases = 0;
};

inline LabelDistribution label_distribution(const Dataset& data) {
  LabelDistribution dist;
  dist.sentences = data.sentences.size();
  for (const Sentence& s : data.sentences) {
    dist.tokens += s.tokens.size();
    if (!s.tags) continue;
    dist.tagged_tokens += s.tags->size();
    for (BioTag t : *s.tags) dist.tag_counts[static_cast<int>(t)]++;
  }
  dist.phrases = data.phrases.size();
  for (const Phrase& p : data.phrases) {
    if (!p.category) continue;
    dist.categorized_phrases++;
    dist.category_counts[static_cast<int>(*p.category)]++;
  }
  return dist;
}

}  // namespace excmine
