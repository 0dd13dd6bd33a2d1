#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "excmine/types.hpp"
#include "excmine/util.hpp"

namespace excmine {

inline bool is_inside_tag(BioTag t) { return t == BioTag::INC || t == BioTag::EXC; }
inline bool is_begin_tag(BioTag t) { return t == BioTag::B_INC || t == BioTag::B_EXC; }

inline Coarse coarse_of_tag(BioTag t) {
  return (t == BioTag::B_INC || t == BioTag::INC) ? Coarse::INC : Coarse::EXC;
}

inline BioTag begin_tag(Coarse c) { return c == Coarse::INC ? BioTag::B_INC : BioTag::B_EXC; }
inline BioTag inside_tag(Coarse c) { return c == Coarse::INC ? BioTag::INC : BioTag::EXC; }

// An inside tag may only continue a begin/inside tag of the same class.
inline bool transition_allowed(BioTag prev, BioTag next) {
  if (next == BioTag::INC) return prev == BioTag::B_INC || prev == BioTag::INC;
  if (next == BioTag::EXC) return prev == BioTag::B_EXC || prev == BioTag::EXC;
  return true;
}

// Inside tags cannot open a sentence.
inline bool start_allowed(BioTag t) { return !is_inside_tag(t); }

// Indices where an inside tag is not preceded by a same-class begin/inside
// tag. An empty result means the sequence is well-formed.
inline std::vector<std::size_t> validate_bio(std::span<const BioTag> tags) {
  std::vector<std::size_t> violations;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (!is_inside_tag(tags[i])) continue;
    if (i == 0 || !transition_allowed(tags[i - 1], tags[i])) violations.push_back(i);
  }
  return violations;
}

// Rewrites each orphaned inside tag to the begin tag of its class. Valid
// input comes back unchanged; output always passes validate_bio.
inline std::vector<BioTag> repair_bio(std::span<const BioTag> tags) {
  std::vector<BioTag> out(tags.begin(), tags.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!is_inside_tag(out[i])) continue;
    if (i == 0 || !transition_allowed(out[i - 1], out[i]))
      out[i] = begin_tag(coarse_of_tag(out[i]));
  }
  return out;
}

// One phrase per maximal begin-tag run followed by same-class inside tags.
// Requires well-formed input; callers consuming external files repair first.
inline std::vector<Phrase> extract_phrases(const std::string& sentence_id,
                                           std::span<const BioTag> tags) {
  if (!validate_bio(tags).empty())
    throw InvalidBio("tag sequence for sentence '" + sentence_id +
                     "' has BIO violations; repair it first");
  std::vector<Phrase> out;
  std::size_t i = 0;
  while (i < tags.size()) {
    if (!is_begin_tag(tags[i])) {
      ++i;
      continue;
    }
    Coarse c = coarse_of_tag(tags[i]);
    std::size_t j = i + 1;
    while (j < tags.size() && tags[j] == inside_tag(c)) ++j;
    out.push_back(Phrase{sentence_id, i, j, c, std::nullopt});
    i = j;
  }
  return out;
}

// Inverse of extract_phrases: begin tag at each span start, inside tags
// within, O elsewhere.
inline std::vector<BioTag> tags_from_phrases(std::size_t length,
                                             std::span<const Phrase> phrases) {
  std::vector<BioTag> tags(length, BioTag::O);
  for (const Phrase& p : phrases) {
    if (p.start >= p.end || p.end > length)
      throw SpanOutOfRange("phrase span [" + std::to_string(p.start) + "," +
                           std::to_string(p.end) + ") out of range for length " +
                           std::to_string(length));
    tags[p.start] = begin_tag(p.coarse);
    for (std::size_t t = p.start + 1; t < p.end; ++t) tags[t] = inside_tag(p.coarse);
  }
  return tags;
}

}  // namespace excmine
