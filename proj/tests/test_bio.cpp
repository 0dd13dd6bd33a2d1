#include <catch2/catch.hpp>

#include <random>

#include "excmine/bio.hpp"
#include "oracle.hpp"

using namespace excmine;

using Tags = std::vector<BioTag>;

TEST_CASE("validate_bio accepts well-formed sequences") {
  CHECK(validate_bio(Tags{BioTag::O, BioTag::O, BioTag::O}).empty());
  CHECK(validate_bio(Tags{BioTag::B_INC, BioTag::INC, BioTag::O}).empty());
  CHECK(validate_bio(Tags{BioTag::B_EXC, BioTag::EXC, BioTag::EXC}).empty());
}

TEST_CASE("validate_bio flags an inside run without a begin tag") {
  Tags tags{BioTag::O,   BioTag::O,   BioTag::O,   BioTag::O,   BioTag::O,   BioTag::O,
            BioTag::O,   BioTag::INC, BioTag::INC, BioTag::INC, BioTag::INC, BioTag::INC};
  auto violations = validate_bio(tags);
  REQUIRE(violations == std::vector<std::size_t>{7});
}

TEST_CASE("validate_bio flags class switches inside a run") {
  auto violations = validate_bio(Tags{BioTag::B_EXC, BioTag::INC});
  REQUIRE(violations == std::vector<std::size_t>{1});
}

TEST_CASE("validate_bio flags an inside tag at sentence start") {
  auto violations = validate_bio(Tags{BioTag::EXC, BioTag::EXC});
  REQUIRE(violations == std::vector<std::size_t>{0});
}

TEST_CASE("repair_bio rewrites orphan inside tags to begin tags") {
  CHECK(repair_bio(Tags{BioTag::O, BioTag::INC, BioTag::INC}) ==
        Tags{BioTag::O, BioTag::B_INC, BioTag::INC});
  CHECK(repair_bio(Tags{BioTag::B_EXC, BioTag::INC}) == Tags{BioTag::B_EXC, BioTag::B_INC});
  CHECK(repair_bio(Tags{BioTag::B_INC, BioTag::INC, BioTag::O}) ==
        Tags{BioTag::B_INC, BioTag::INC, BioTag::O});
}

TEST_CASE("extract_phrases finds maximal runs") {
  SECTION("single long exclusion run") {
    Tags tags{BioTag::B_EXC, BioTag::EXC, BioTag::EXC, BioTag::EXC, BioTag::EXC,
              BioTag::EXC,   BioTag::EXC, BioTag::O,   BioTag::O,   BioTag::O};
    auto phrases = extract_phrases("s", tags);
    REQUIRE(phrases.size() == 1);
    CHECK(phrases[0].start == 0);
    CHECK(phrases[0].end == 7);
    CHECK(phrases[0].coarse == Coarse::EXC);
  }
  SECTION("all outside") {
    CHECK(extract_phrases("s", Tags{BioTag::O, BioTag::O}).empty());
  }
  SECTION("adjacent begin tag starts a new phrase") {
    auto phrases = extract_phrases("s", Tags{BioTag::B_INC, BioTag::INC, BioTag::B_INC});
    REQUIRE(phrases.size() == 2);
    CHECK(phrases[0].start == 0);
    CHECK(phrases[0].end == 2);
    CHECK(phrases[1].start == 2);
    CHECK(phrases[1].end == 3);
    CHECK(phrases[0].coarse == Coarse::INC);
  }
  SECTION("invalid input is rejected") {
    CHECK_THROWS_AS(extract_phrases("s", Tags{BioTag::O, BioTag::INC}), InvalidBio);
  }
}

TEST_CASE("bio laws hold on random tag sequences") {
  std::mt19937_64 rng(20240811);
  for (int iter = 0; iter < 10000; ++iter) {
    std::size_t len = 1 + rng() % 12;
    Tags tags = oracle::random_tags(rng, len);

    Tags repaired = repair_bio(tags);
    CHECK(validate_bio(repaired).empty());
    CHECK(repair_bio(repaired) == repaired);

    auto phrases = extract_phrases("s", repaired);
    std::size_t covered = 0;
    std::size_t prev_end = 0;
    for (const Phrase& p : phrases) {
      CHECK(p.start >= prev_end);
      prev_end = p.end;
      covered += p.length();
    }
    std::size_t non_o = 0;
    for (BioTag t : repaired)
      if (t != BioTag::O) ++non_o;
    CHECK(covered == non_o);

    CHECK(tags_from_phrases(len, phrases) == repaired);
  }
}
