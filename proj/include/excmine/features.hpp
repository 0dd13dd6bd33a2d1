#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "excmine/types.hpp"
#include "excmine/util.hpp"

namespace excmine {

// ---------------------------------------------------------------------------
// Pretrained word vectors loaded from `word v1 v2 ... vD` text files.
// ---------------------------------------------------------------------------

struct EmbeddingTable {
  std::size_t dim = 0;
  std::vector<std::string> words;                      // row -> word
  std::unordered_map<std::string, std::size_t> index;  // word -> row
  std::vector<double> matrix;                          // rows * dim

  std::size_t size() const { return words.size(); }

  const double* row(std::size_t r) const { return matrix.data() + r * dim; }

  // nullptr for out-of-vocabulary words; callers substitute zeros.
  const double* lookup(const std::string& word) const {
    auto it = index.find(word);
    return it == index.end() ? nullptr : row(it->second);
  }

  void upsert(const std::string& word, std::span<const double> values) {
    auto it = index.find(word);
    if (it != index.end()) {
      std::copy(values.begin(), values.end(), matrix.begin() + static_cast<std::ptrdiff_t>(it->second * dim));
      return;
    }
    index.emplace(word, words.size());
    words.push_back(word);
    matrix.insert(matrix.end(), values.begin(), values.end());
  }
};

// Optional first line `N D` (two integer tokens) is treated as a header.
// Later duplicate words overwrite earlier rows.
inline EmbeddingTable load_embeddings(std::istream& in) {
  EmbeddingTable table;
  std::string raw;
  std::size_t line_no = 0;
  bool first_content_line = true;
  std::vector<double> values;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = strip_cr(raw);
    std::vector<std::string> cols = split_ws(line);
    if (cols.empty()) continue;
    if (first_content_line) {
      first_content_line = false;
      if (cols.size() == 2 && is_integer_token(cols[0]) && is_integer_token(cols[1]))
        continue;  // header line
    }
    if (cols.size() < 2) throw DimMismatch(line_no, "expected `word v1 ... vD`");
    values.clear();
    values.reserve(cols.size() - 1);
    for (std::size_t i = 1; i < cols.size(); ++i) {
      bool ok = false;
      double v = parse_double(cols[i], &ok);
      if (!ok) throw NonNumeric(line_no, "bad number '" + cols[i] + "'");
      values.push_back(v);
    }
    if (table.dim == 0 && table.words.empty()) {
      table.dim = values.size();
    } else if (values.size() != table.dim) {
      throw DimMismatch(line_no, "expected " + std::to_string(table.dim) +
                                     " values, got " + std::to_string(values.size()));
    }
    table.upsert(cols[0], values);
  }
  return table;
}

inline EmbeddingTable load_embeddings(const std::string& text) {
  std::istringstream in(text);
  return load_embeddings(in);
}

// 17 significant digits keep the matrix bit-exact through a round trip.
inline void write_embeddings(const EmbeddingTable& table, std::ostream& out) {
  out << table.words.size() << ' ' << table.dim << "\n";
  for (std::size_t r = 0; r < table.words.size(); ++r) {
    out << table.words[r];
    const double* v = table.row(r);
    for (std::size_t j = 0; j < table.dim; ++j) out << ' ' << format_double(v[j]);
    out << "\n";
  }
}

// ---------------------------------------------------------------------------
// Token surface-form predicates and the collapsed word shape.
// ---------------------------------------------------------------------------

inline bool is_capitalized_word(const std::string& s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

inline bool is_all_caps_word(const std::string& s) {
  bool has_upper = false;
  for (char c : s) {
    unsigned char u = static_cast<unsigned char>(c);
    if (std::islower(u)) return false;
    if (std::isupper(u)) has_upper = true;
  }
  return has_upper;
}

inline bool is_digit_word(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

inline bool is_punct_word(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!ascii_punct(c)) return false;
  return true;
}

// X for uppercase, x for lowercase, 9 for digits, punctuation kept as-is;
// runs longer than 4 are truncated to 4.
inline std::string word_shape(const std::string& s) {
  std::string shape;
  char last = '\0';
  int run = 0;
  for (char c : s) {
    unsigned char u = static_cast<unsigned char>(c);
    char mapped;
    if (std::isupper(u)) mapped = 'X';
    else if (std::isdigit(u)) mapped = '9';
    else if (ascii_punct(c)) mapped = c;
    else mapped = 'x';
    if (mapped == last) {
      ++run;
    } else {
      last = mapped;
      run = 1;
    }
    if (run <= 4) shape += mapped;
  }
  return shape;
}

// ---------------------------------------------------------------------------
// Token-level feature template for the sequence labeler.
// ---------------------------------------------------------------------------

struct FeatureVector {
  std::vector<double> dense;
  std::vector<int> sparse;  // sorted unique ids; implicit value 1
};

// Dense block: embeddings of the tokens in a +-window around the target.
// Sparse block: word identity (frequent words only), word shape, and
// surface flags. The vocabulary is built on training text and then frozen;
// unseen sparse features map to nothing afterwards.
struct FeatureTemplate {
  std::size_t embedding_dim = 0;
  std::size_t window = 1;
  std::size_t min_word_count = 2;
  bool frozen = false;
  std::unordered_map<std::string, int> sparse_ids;
  std::vector<std::string> sparse_names;

  FeatureTemplate() { add_fixed_features(); }
  explicit FeatureTemplate(std::size_t dim, std::size_t window_radius = 1,
                           std::size_t min_count = 2)
      : embedding_dim(dim), window(window_radius), min_word_count(min_count) {
    add_fixed_features();
  }

  std::size_t dense_width() const { return (2 * window + 1) * embedding_dim; }
  std::size_t sparse_size() const { return sparse_names.size(); }
  std::size_t total_width() const { return dense_width() + sparse_size(); }

  int feature_id(const std::string& name) const {
    auto it = sparse_ids.find(name);
    return it == sparse_ids.end() ? -1 : it->second;
  }

  int intern(const std::string& name) {
    auto it = sparse_ids.find(name);
    if (it != sparse_ids.end()) return it->second;
    if (frozen) return -1;
    int id = static_cast<int>(sparse_names.size());
    sparse_ids.emplace(name, id);
    sparse_names.push_back(name);
    return id;
  }

  // Two passes over the training text: count word frequencies, then intern
  // identity features for words seen at least min_word_count times plus
  // every observed shape, in first-occurrence order.
  void fit(std::span<const Sentence> sentences) {
    if (frozen) throw Error("feature template is frozen");
    std::unordered_map<std::string, std::size_t> counts;
    for (const Sentence& s : sentences)
      for (const Token& t : s.tokens) counts[t.lower]++;
    for (const Sentence& s : sentences) {
      for (const Token& t : s.tokens) {
        if (counts[t.lower] >= min_word_count) intern("w=" + t.lower);
        intern("shape=" + word_shape(t.text));
      }
    }
  }

  void freeze() { frozen = true; }

 private:
  void add_fixed_features() {
    for (const char* name : {"cap", "allcaps", "digit", "punct", "oov"}) intern(name);
  }
};

inline FeatureVector token_features(const FeatureTemplate& tmpl, const EmbeddingTable& table,
                                    const Sentence& sentence, std::size_t t) {
  if (t >= sentence.tokens.size())
    throw IndexOutOfRange("token index " + std::to_string(t) + " out of range");
  if (tmpl.embedding_dim != table.dim)
    throw WidthMismatch("template dim " + std::to_string(tmpl.embedding_dim) +
                        " != embedding dim " + std::to_string(table.dim));

  FeatureVector fv;
  fv.dense.assign(tmpl.dense_width(), 0.0);
  std::ptrdiff_t radius = static_cast<std::ptrdiff_t>(tmpl.window);
  for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
    std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(t) + k;
    if (pos < 0 || pos >= static_cast<std::ptrdiff_t>(sentence.tokens.size())) continue;
    const double* vec = table.lookup(sentence.tokens[static_cast<std::size_t>(pos)].lower);
    if (!vec) continue;
    std::size_t offset = static_cast<std::size_t>(k + radius) * tmpl.embedding_dim;
    std::copy(vec, vec + tmpl.embedding_dim, fv.dense.begin() + static_cast<std::ptrdiff_t>(offset));
  }

  const Token& tok = sentence.tokens[t];
  auto push = [&](const std::string& name) {
    int id = tmpl.feature_id(name);
    if (id >= 0) fv.sparse.push_back(id);
  };
  push("w=" + tok.lower);
  push("shape=" + word_shape(tok.text));
  if (is_capitalized_word(tok.text)) push("cap");
  if (is_all_caps_word(tok.text)) push("allcaps");
  if (is_digit_word(tok.text)) push("digit");
  if (is_punct_word(tok.text)) push("punct");
  if (!table.lookup(tok.lower)) push("oov");
  std::sort(fv.sparse.begin(), fv.sparse.end());
  fv.sparse.erase(std::unique(fv.sparse.begin(), fv.sparse.end()), fv.sparse.end());
  return fv;
}

constexpr std::size_t kPhraseExtraFeatures = 1 + kNumCategories;

inline std::size_t phrase_feature_width(const EmbeddingTable& table) {
  return table.dim + kPhraseExtraFeatures;
}

// Mean span embedding (zeros for OOV tokens), normalized span length, and
// one keyword-hit indicator per category.
inline std::vector<double> phrase_features(const EmbeddingTable& table,
                                           const KeywordIndex& keywords,
                                           const Sentence& sentence, std::size_t start,
                                           std::size_t end) {
  if (start >= end) throw EmptySpan("phrase span [" + std::to_string(start) + "," +
                                    std::to_string(end) + ") is empty");
  if (end > sentence.tokens.size())
    throw SpanOutOfRange("phrase span end " + std::to_string(end) +
                         " exceeds sentence length " + std::to_string(sentence.tokens.size()));

  std::vector<double> out(phrase_feature_width(table), 0.0);
  double len = static_cast<double>(end - start);
  for (std::size_t t = start; t < end; ++t) {
    const Token& tok = sentence.tokens[t];
    if (const double* vec = table.lookup(tok.lower))
      for (std::size_t j = 0; j < table.dim; ++j) out[j] += vec[j];
    for (Category c : keywords.categories_of(tok.lower))
      out[table.dim + 1 + static_cast<std::size_t>(c)] = 1.0;
  }
  for (std::size_t j = 0; j < table.dim; ++j) out[j] /= len;
  out[table.dim] = std::min(len / 10.0, 1.0);
  return out;
}

inline std::vector<double> phrase_features(const EmbeddingTable& table,
                                           const KeywordIndex& keywords,
                                           const Sentence& sentence, const Phrase& phrase) {
  return phrase_features(table, keywords, sentence, phrase.start, phrase.end);
}

}  // namespace excmine
