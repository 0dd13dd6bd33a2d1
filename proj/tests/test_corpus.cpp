#include <catch2/catch.hpp>

#include <random>
#include <set>

#include "excmine/corpus.hpp"

using namespace excmine;

namespace {

Sentence make_sentence(const std::string& id, const std::vector<std::string>& words) {
  Sentence s;
  s.id = id;
  for (const auto& w : words) s.tokens.push_back(Token(w));
  return s;
}

KeywordIndex handicap_keywords() {
  KeywordIndex index;
  index.add(Category::Handicap, "wheelchair");
  index.add(Category::Handicap, "ramp");
  index.add(Category::Price, "expensive");
  return index;
}

}  // namespace

TEST_CASE("tokenize splits whitespace and detaches edge punctuation") {
  auto toks = tokenize("The queue was (very) long!");
  std::vector<std::string> texts;
  for (const auto& t : toks) texts.push_back(t.text);
  CHECK(texts == std::vector<std::string>{"The", "queue", "was", "(", "very", ")", "long", "!"});
}

TEST_CASE("tokenize keeps interior punctuation") {
  auto toks = tokenize("don't pay $25.50...");
  std::vector<std::string> texts;
  for (const auto& t : toks) texts.push_back(t.text);
  CHECK(texts == std::vector<std::string>{"don't", "pay", "$", "25.50", ".", ".", "."});
}

TEST_CASE("tokens carry lowercase forms") {
  auto toks = tokenize("Wheelchair RAMP");
  REQUIRE(toks.size() == 2);
  CHECK(toks[0].lower == "wheelchair");
  CHECK(toks[1].lower == "ramp");
}

TEST_CASE("split_sentences breaks on final punctuation") {
  auto pieces = split_sentences("Great place. Would go again! Really");
  REQUIRE(pieces.size() == 3);
  CHECK(split_ws(pieces[0]) == std::vector<std::string>{"Great", "place."});
  CHECK(split_ws(pieces[2]) == std::vector<std::string>{"Really"});
}

TEST_CASE("filter_candidate_sentences keeps keyword hits") {
  KeywordIndex index = handicap_keywords();
  std::vector<Sentence> sentences{
      make_sentence("a", {"the", "wheelchair", "fits"}),
      make_sentence("b", {"nothing", "relevant", "here"}),
      make_sentence("c", {"Wheelchair", "access", "expensive"}),
  };
  auto kept = filter_candidate_sentences(sentences, index);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].sentence.id == "a");
  CHECK(kept[0].categories == std::vector<Category>{Category::Handicap});
  // capitalized surface form still matches via the lowercase form
  CHECK(kept[1].sentence.id == "c");
  CHECK(kept[1].categories == std::vector<Category>{Category::Handicap, Category::Price});
}

TEST_CASE("split_dataset produces floor-based sizes with remainder to train") {
  Dataset data;
  for (int i = 0; i < 10; ++i)
    data.sentences.push_back(make_sentence(std::to_string(i), {"w"}));
  auto split = split_dataset(data, {0.7, 0.1, 0.2}, 13);
  CHECK(split.train.sentences.size() == 7);
  CHECK(split.dev.sentences.size() == 1);
  CHECK(split.test.sentences.size() == 2);
}

TEST_CASE("split_dataset is deterministic and exhaustive") {
  Dataset data;
  for (int i = 0; i < 23; ++i)
    data.sentences.push_back(make_sentence(std::to_string(i), {"w"}));
  data.phrases.push_back(Phrase{"5", 0, 1, Coarse::INC, Category::Food});

  auto a = split_dataset(data, {0.5, 0.25, 0.25}, 99);
  auto b = split_dataset(data, {0.5, 0.25, 0.25}, 99);
  CHECK(a.train == b.train);
  CHECK(a.dev == b.dev);
  CHECK(a.test == b.test);

  std::set<std::string> seen;
  for (const Dataset* part : {&a.train, &a.dev, &a.test})
    for (const Sentence& s : part->sentences) {
      CHECK(seen.insert(s.id).second);  // disjoint
    }
  CHECK(seen.size() == 23);  // exhaustive

  // the phrase follows its sentence
  std::size_t phrase_total = a.train.phrases.size() + a.dev.phrases.size() + a.test.phrases.size();
  CHECK(phrase_total == 1);
}

TEST_CASE("split_dataset rejects bad ratios") {
  Dataset data;
  data.sentences.push_back(make_sentence("0", {"w"}));
  CHECK_THROWS_AS(split_dataset(data, {0.5, 0.5, 0.5}, 1), BadRatios);
  CHECK_THROWS_AS(split_dataset(data, {-0.1, 0.6, 0.5}, 1), BadRatios);
}

TEST_CASE("cohen_kappa on hand-checked cases") {
  using S = std::vector<std::string>;
  CHECK(cohen_kappa(S{"A", "B", "A"}, S{"A", "B", "A"}) == Approx(1.0));
  // p_o = 0.5, p_e = 0.5 -> kappa 0
  CHECK(cohen_kappa(S{"A", "A", "B", "B"}, S{"A", "B", "A", "B"}) == Approx(0.0).margin(1e-12));
  CHECK_THROWS_AS(cohen_kappa(S{"A"}, S{"A", "B"}), LengthMismatch);
  CHECK_THROWS_AS(cohen_kappa(S{}, S{}), EmptyInput);
}

TEST_CASE("cohen_kappa is symmetric and relabeling-invariant") {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 200; ++iter) {
    std::size_t n = 2 + rng() % 30;
    std::vector<int> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng() % 3);
      b[i] = static_cast<int>(rng() % 3);
    }
    double k1 = cohen_kappa(a, b);
    double k2 = cohen_kappa(b, a);
    CHECK(k1 == Approx(k2).margin(1e-12));

    // bijective relabeling 0->7, 1->5, 2->9 applied to both
    auto relabel = [](int v) { return v == 0 ? 7 : (v == 1 ? 5 : 9); };
    std::vector<int> ra(n), rb(n);
    for (std::size_t i = 0; i < n; ++i) {
      ra[i] = relabel(a[i]);
      rb[i] = relabel(b[i]);
    }
    CHECK(cohen_kappa(ra, rb) == Approx(k1).margin(1e-12));
  }
}

TEST_CASE("label_distribution counts tags and categories") {
  SECTION("empty dataset") {
    LabelDistribution dist = label_distribution(Dataset{});
    for (auto c : dist.tag_counts) CHECK(c == 0);
    for (auto c : dist.category_counts) CHECK(c == 0);
    CHECK(dist.sentences == 0);
  }
  SECTION("small dataset") {
    Dataset data;
    Sentence s = make_sentence("0", {"kids", "welcome"});
    s.tags = std::vector<BioTag>{BioTag::B_INC, BioTag::INC};
    data.sentences.push_back(s);
    data.phrases.push_back(Phrase{"0", 0, 2, Coarse::INC, Category::CouplesFamily});

    LabelDistribution dist = label_distribution(data);
    CHECK(dist.tag_counts[static_cast<int>(BioTag::B_INC)] == 1);
    CHECK(dist.tag_counts[static_cast<int>(BioTag::INC)] == 1);
    CHECK(dist.tag_counts[static_cast<int>(BioTag::O)] == 0);
    CHECK(dist.tokens == 2);
    CHECK(dist.phrases == 1);
    CHECK(dist.category_counts[static_cast<int>(Category::CouplesFamily)] == 1);

    std::size_t tag_sum = 0;
    for (auto c : dist.tag_counts) tag_sum += c;
    CHECK(tag_sum == dist.tagged_tokens);
  }
}

TEST_CASE("token invariants are enforced") {
  CHECK_THROWS_AS(Token(""), Error);
  CHECK_THROWS_AS(Token("two words"), Error);
  CHECK(Token("Paris").lower == "paris");
}
