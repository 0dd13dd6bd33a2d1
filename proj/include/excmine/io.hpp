#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "excmine/corpus.hpp"
#include "excmine/types.hpp"
#include "excmine/util.hpp"

namespace excmine {

// ---------------------------------------------------------------------------
// CoNLL-style tag files: `token<TAB>tag` lines, blank line between sentences,
// optional `# id = ...` / `# spot_id = ...` comments before a sentence.
// ---------------------------------------------------------------------------

inline Dataset parse_conll(std::istream& in) {
  Dataset data;
  Sentence current;
  std::vector<BioTag> tags;
  bool has_id = false;
  std::size_t line_no = 0;

  auto flush = [&]() {
    if (current.tokens.empty()) {
      current = Sentence{};
      tags.clear();
      has_id = false;
      return;
    }
    if (!has_id) current.id = std::to_string(data.sentences.size());
    current.tags = tags;
    data.sentences.push_back(std::move(current));
    current = Sentence{};
    tags.clear();
    has_id = false;
  };

  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = strip_cr(raw);
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') {
      if (!current.tokens.empty())
        throw ParseError(line_no, "comment inside a sentence block");
      if (line.rfind("# id = ", 0) == 0) {
        current.id = line.substr(7);
        has_id = true;
      } else if (line.rfind("# spot_id = ", 0) == 0) {
        current.spot_id = line.substr(12);
      }
      // other comments are ignored
      continue;
    }
    std::vector<std::string> cols = split_char(line, '\t');
    if (cols.size() != 2) throw ParseError(line_no, "expected `token<TAB>tag`");
    if (cols[0].empty()) throw ParseError(line_no, "empty token");
    if (contains_whitespace(cols[0])) throw ParseError(line_no, "token contains whitespace");
    auto tag = tag_from_name(cols[1]);
    if (!tag) throw ParseError(line_no, "unknown tag '" + cols[1] + "'");
    current.tokens.push_back(Token(cols[0]));
    tags.push_back(*tag);
  }
  flush();
  return data;
}

inline Dataset parse_conll(const std::string& text) {
  std::istringstream in(text);
  return parse_conll(in);
}

inline void write_conll(const Dataset& data, std::ostream& out) {
  for (std::size_t i = 0; i < data.sentences.size(); ++i) {
    const Sentence& s = data.sentences[i];
    if (!s.tags) throw MissingTags("sentence '" + s.id + "' has no tags");
    if (s.tags->size() != s.tokens.size())
      throw LengthMismatch("sentence '" + s.id + "': tag/token count mismatch");
    // The id comment is omitted when the id is just the positional default,
    // so parse -> write is the identity on plain files.
    if (s.id != std::to_string(i)) out << "# id = " << s.id << "\n";
    if (!s.spot_id.empty()) out << "# spot_id = " << s.spot_id << "\n";
    for (std::size_t t = 0; t < s.tokens.size(); ++t)
      out << s.tokens[t].text << '\t' << tag_name((*s.tags)[t]) << "\n";
    out << "\n";
  }
}

inline std::string write_conll(const Dataset& data) {
  std::ostringstream out;
  write_conll(data, out);
  return out.str();
}

// ---------------------------------------------------------------------------
// Review ingestion: JSON Lines with spot_id / review_id / text fields.
// ---------------------------------------------------------------------------

struct Review {
  std::string spot_id;
  std::string review_id;
  std::string text;
};

inline std::vector<Review> read_reviews_jsonl(std::istream& in) {
  std::vector<Review> reviews;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = strip_cr(raw);
    if (split_ws(line).empty()) continue;
    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object())
      throw ParseError(line_no, "invalid JSON object");
    for (const char* field : {"spot_id", "review_id", "text"})
      if (!obj.contains(field) || !obj[field].is_string())
        throw ParseError(line_no, std::string("missing string field '") + field + "'");
    reviews.push_back(Review{obj["spot_id"].get<std::string>(),
                             obj["review_id"].get<std::string>(),
                             obj["text"].get<std::string>()});
  }
  return reviews;
}

// Sentence ids are `<review_id>:<sentence_index>`; empty sentences dropped.
inline std::vector<Sentence> reviews_to_sentences(std::span<const Review> reviews) {
  std::vector<Sentence> out;
  for (const Review& r : reviews) {
    std::vector<std::string> pieces = split_sentences(r.text);
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      Sentence s;
      s.id = r.review_id + ":" + std::to_string(i);
      s.spot_id = r.spot_id;
      s.tokens = tokenize(pieces[i]);
      if (s.tokens.empty()) continue;
      out.push_back(std::move(s));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Keyword lists: JSON object, category name -> array of lowercase keywords.
// ---------------------------------------------------------------------------

inline KeywordIndex load_keywords(std::istream& in) {
  nlohmann::json obj = nlohmann::json::parse(in, nullptr, false);
  if (obj.is_discarded() || !obj.is_object())
    throw Error("keyword file is not a JSON object");
  KeywordIndex index;
  for (const auto& [name, value] : obj.items()) {
    auto cat = category_from_name(name);
    if (!cat) throw Error("unknown category '" + name + "' in keyword file");
    if (!value.is_array()) throw Error("keywords for '" + name + "' must be an array");
    for (const auto& kw : value) {
      if (!kw.is_string()) throw Error("keywords for '" + name + "' must be strings");
      index.add(*cat, kw.get<std::string>());
    }
  }
  return index;
}

inline KeywordIndex load_keywords(const std::string& text) {
  std::istringstream in(text);
  return load_keywords(in);
}

inline void write_keywords(const KeywordIndex& index, std::ostream& out) {
  nlohmann::json obj = nlohmann::json::object();
  for (int i = 0; i < kNumCategories; ++i) {
    std::vector<std::string> sorted(index.keywords[i].begin(), index.keywords[i].end());
    std::sort(sorted.begin(), sorted.end());
    obj[category_name(static_cast<Category>(i))] = sorted;
  }
  out << obj.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Phrase files: TSV with sentence_id, start, end, coarse, category, text.
// ---------------------------------------------------------------------------

inline const char* kPhraseTsvHeader = "sentence_id\tstart\tend\tcoarse\tcategory\ttext";

inline std::vector<Phrase> read_phrases_tsv(std::istream& in) {
  std::vector<Phrase> phrases;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = strip_cr(raw);
    if (line.empty()) continue;
    std::vector<std::string> cols = split_char(line, '\t');
    if (line_no == 1 && !cols.empty() && cols[0] == "sentence_id") continue;
    if (cols.size() != 6) throw ParseError(line_no, "expected 6 tab-separated columns");
    Phrase p;
    p.sentence_id = cols[0];
    if (!parse_size(cols[1], &p.start)) throw ParseError(line_no, "bad start '" + cols[1] + "'");
    if (!parse_size(cols[2], &p.end)) throw ParseError(line_no, "bad end '" + cols[2] + "'");
    if (p.start >= p.end) throw ParseError(line_no, "empty or inverted span");
    auto coarse = coarse_from_name(cols[3]);
    if (!coarse) throw ParseError(line_no, "unknown coarse class '" + cols[3] + "'");
    p.coarse = *coarse;
    if (!cols[4].empty()) {
      auto cat = category_from_name(cols[4]);
      if (!cat) throw ParseError(line_no, "unknown category '" + cols[4] + "'");
      p.category = *cat;
    }
    phrases.push_back(std::move(p));
  }
  return phrases;
}

inline std::vector<Phrase> read_phrases_tsv(const std::string& text) {
  std::istringstream in(text);
  return read_phrases_tsv(in);
}

// `resolve` may be null; the text column is then left empty.
inline void write_phrases_tsv(std::span<const Phrase> phrases, const Dataset* resolve,
                              std::ostream& out) {
  out << kPhraseTsvHeader << "\n";
  for (const Phrase& p : phrases) {
    std::string text;
    if (resolve) {
      if (const Sentence* s = resolve->find_sentence(p.sentence_id)) {
        if (p.end > s->tokens.size())
          throw SpanOutOfRange("phrase span exceeds sentence '" + p.sentence_id + "'");
        for (std::size_t t = p.start; t < p.end; ++t) {
          if (t > p.start) text += ' ';
          text += s->tokens[t].text;
        }
      }
    }
    out << p.sentence_id << '\t' << p.start << '\t' << p.end << '\t'
        << coarse_name(p.coarse) << '\t'
        << (p.category ? category_name(*p.category) : "") << '\t' << text << "\n";
  }
}

inline std::string write_phrases_tsv(std::span<const Phrase> phrases,
                                     const Dataset* resolve = nullptr) {
  std::ostringstream out;
  write_phrases_tsv(phrases, resolve, out);
  return out.str();
}

}  // namespace excmine
