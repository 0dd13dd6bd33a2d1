#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "excmine/cli.hpp"

using namespace excmine;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("excmine");
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream captured;
  std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
  int code = cli::run(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old);
  return {code, captured.str()};
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("excmine-cli-" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

// Labeled corpus whose tags follow trigger tokens, plus matching phrase
// categories, embeddings, and keywords.
struct PipelineFixture {
  TempDir dir;
  std::string conll, phrases, embeddings, keywords;

  PipelineFixture() {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    std::ostringstream emb;
    for (const char* w : {"wheelchair", "kids", "the", "place", "was", "nice", "w"}) {
      emb << w;
      for (int j = 0; j < 4; ++j) emb << ' ' << unit(rng);
      emb << "\n";
    }
    embeddings = dir.file("embeddings.txt");
    write_file(embeddings, emb.str());

    keywords = dir.file("keywords.json");
    write_file(keywords,
               R"({"Handicap":["wheelchair"],"CouplesFamily":["kids"]})" "\n");

    Dataset data;
    const char* fillers[] = {"the", "place", "was", "nice"};
    for (int i = 0; i < 40; ++i) {
      Sentence s;
      s.id = "s" + std::to_string(i);
      std::vector<BioTag> tags;
      std::size_t n_chunks = 2 + rng() % 3;
      for (std::size_t c = 0; c < n_chunks; ++c) {
        switch (rng() % 3) {
          case 0:
            s.tokens.push_back(Token("wheelchair"));
            s.tokens.push_back(Token("w"));
            tags.push_back(BioTag::B_EXC);
            tags.push_back(BioTag::EXC);
            break;
          case 1:
            s.tokens.push_back(Token("kids"));
            s.tokens.push_back(Token("w"));
            tags.push_back(BioTag::B_INC);
            tags.push_back(BioTag::INC);
            break;
          default:
            for (int k = 0; k < 2; ++k) {
              s.tokens.push_back(Token(fillers[rng() % 4]));
              tags.push_back(BioTag::O);
            }
        }
      }
      s.tags = tags;
      for (Phrase& p : extract_phrases(s.id, tags)) {
        p.category = (p.coarse == Coarse::EXC) ? Category::Handicap : Category::CouplesFamily;
        data.phrases.push_back(std::move(p));
      }
      data.sentences.push_back(std::move(s));
    }

    conll = dir.file("gold.conll");
    write_file(conll, write_conll(data));
    phrases = dir.file("gold_phrases.tsv");
    write_file(phrases, write_phrases_tsv(data.phrases, &data));
  }
};

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli({"--no-such-flag"}).code == 2);
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"stats"}).code == 2);            // missing required --in
  CHECK(run_cli({"not-a-command"}).code == 2);
}

TEST_CASE("help and version exit with code 0") {
  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({"--version"}).code == 0);
}

TEST_CASE("missing input files exit with code 1") {
  CHECK(run_cli({"stats", "--in", "/nonexistent.conll"}).code == 1);
}

TEST_CASE("stats prints the label distribution") {
  TempDir dir;
  std::string path = dir.file("data.conll");
  write_file(path, "kids\tB_INC\nwelcome\tINC\n\nloud\tO\n\n");
  CliResult r = run_cli({"stats", "--in", path});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("sentences\t2") != std::string::npos);
  CHECK(r.out.find("tag\tB_INC\t1") != std::string::npos);
  CHECK(r.out.find("tag\tINC\t1") != std::string::npos);
  CHECK(r.out.find("tag\tO\t1") != std::string::npos);
}

TEST_CASE("eval-spans on identical files reports all ones") {
  TempDir dir;
  std::string path = dir.file("g.conll");
  write_file(path, "no\tO\nkids\tB_INC\nallowed\tINC\n\n");
  CliResult r = run_cli({"eval-spans", "--pred", path, "--gold", path});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("INC\tbinary\t1.000000\t1.000000\t1.000000") != std::string::npos);
  CHECK(r.out.find("INC\tproportional\t1.000000\t1.000000\t1.000000") != std::string::npos);

  std::string json_path = dir.file("spans.json");
  REQUIRE(run_cli({"eval-spans", "--pred", path, "--gold", path, "--json", json_path}).code == 0);
  nlohmann::json j = nlohmann::json::parse(read_text_file(json_path));
  CHECK(j["INC"]["binary"]["f1"].get<double>() == 1.0);
}

TEST_CASE("eval-spans repairs orphan inside tags before scoring") {
  TempDir dir;
  std::string pred = dir.file("p.conll");
  std::string gold = dir.file("g.conll");
  // prediction starts an inside run without a begin tag
  write_file(pred, "a\tO\nb\tINC\nc\tINC\n\n");
  write_file(gold, "a\tO\nb\tB_INC\nc\tINC\n\n");
  CliResult r = run_cli({"eval-spans", "--pred", pred, "--gold", gold});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("INC\tbinary\t1.000000") != std::string::npos);
}

TEST_CASE("kappa on identical tag files is 1") {
  TempDir dir;
  std::string path = dir.file("a.conll");
  write_file(path, "x\tO\ny\tB_EXC\n\n");
  CliResult r = run_cli({"kappa", "--a", path, "--b", path});
  REQUIRE(r.code == 0);
  CHECK(r.out == "kappa\t1.000000\n");
}

TEST_CASE("kappa over phrase categories") {
  TempDir dir;
  std::string a = dir.file("a.tsv");
  std::string b = dir.file("b.tsv");
  write_file(a,
             "s1\t0\t2\tINC\tPrice\t\n"
             "s1\t3\t5\tINC\tFood\t\n"
             "s2\t0\t1\tEXC\tCrowd\t\n"
             "s2\t2\t4\tEXC\tCrowd\t\n");
  write_file(b,
             "s1\t0\t2\tINC\tPrice\t\n"
             "s1\t3\t5\tINC\tPrice\t\n"
             "s2\t0\t1\tEXC\tCrowd\t\n"
             "s2\t2\t4\tEXC\tFood\t\n");
  CliResult r = run_cli({"kappa", "--a", a, "--b", b, "--mode", "categories"});
  REQUIRE(r.code == 0);
  // hand computation: p_o = 0.5, p_e = (2*1 + 1*2 + 1*1) / 16 = 0.3125
  CHECK(r.out == "kappa\t0.272727\n");
  CHECK(run_cli({"kappa", "--a", a, "--b", b, "--mode", "bogus"}).code == 1);
}

TEST_CASE("prepare filters and tags candidate sentences") {
  TempDir dir;
  std::string reviews = dir.file("reviews.jsonl");
  std::string keywords = dir.file("keywords.json");
  std::string out = dir.file("prepared.conll");
  write_file(reviews,
             R"({"spot_id":"s1","review_id":"r1","text":"Wheelchair access was poor. Lovely views though."})"
             "\n"
             R"({"spot_id":"s2","review_id":"r2","text":"Nothing relevant here."})"
             "\n");
  write_file(keywords, R"({"Handicap":["wheelchair"]})" "\n");

  CliResult r = run_cli({"prepare", "--reviews", reviews, "--keywords", keywords, "--out", out});
  REQUIRE(r.code == 0);

  Dataset prepared = parse_conll(read_text_file(out));
  REQUIRE(prepared.sentences.size() == 1);
  CHECK(prepared.sentences[0].id == "r1:0");
  CHECK(prepared.sentences[0].spot_id == "s1");
  for (BioTag t : *prepared.sentences[0].tags) CHECK(t == BioTag::O);
  CHECK(std::filesystem::exists(out + ".meta.json"));
}

TEST_CASE("full pipeline through the cli") {
  PipelineFixture fx;
  std::string train = fx.dir.file("train.conll");
  std::string dev = fx.dir.file("dev.conll");
  std::string test = fx.dir.file("test.conll");

  REQUIRE(run_cli({"split", "--in", fx.conll, "--ratios", "0.6,0.2,0.2", "--seed", "13",
                   "--train", train, "--dev", dev, "--test", test})
              .code == 0);
  Dataset test_data = parse_conll(read_text_file(test));
  REQUIRE(test_data.sentences.size() == 8);

  std::string model = fx.dir.file("crf.excm");
  REQUIRE(run_cli({"train-crf", "--train", train, "--dev", dev, "--embeddings", fx.embeddings,
                   "--model", model, "--lr", "0.01", "--epochs", "10", "--seed", "5"})
              .code == 0);

  SECTION("training is reproducible byte for byte") {
    std::string model2 = fx.dir.file("crf2.excm");
    REQUIRE(run_cli({"train-crf", "--train", train, "--dev", dev, "--embeddings", fx.embeddings,
                     "--model", model2, "--lr", "0.01", "--epochs", "10", "--seed", "5"})
                .code == 0);
    CHECK(read_text_file(model) == read_text_file(model2));
  }

  std::string pred = fx.dir.file("pred.conll");
  std::string mined = fx.dir.file("mined.tsv");
  REQUIRE(run_cli({"tag", "--model", model, "--embeddings", fx.embeddings, "--in", test, "--out",
                   pred, "--phrases-out", mined})
              .code == 0);

  SECTION("tagged output is aligned, well-formed, and deterministic") {
    Dataset pred_data = parse_conll(read_text_file(pred));
    REQUIRE(pred_data.sentences.size() == test_data.sentences.size());
    for (const Sentence& s : pred_data.sentences) CHECK(validate_bio(*s.tags).empty());

    std::string pred2 = fx.dir.file("pred2.conll");
    REQUIRE(run_cli({"tag", "--model", model, "--embeddings", fx.embeddings, "--in", test,
                     "--out", pred2})
                .code == 0);
    CHECK(read_text_file(pred) == read_text_file(pred2));
  }

  SECTION("cli evaluation equals calling the library directly") {
    std::string report_path = fx.dir.file("spans.tsv");
    REQUIRE(run_cli({"eval-spans", "--pred", pred, "--gold", test, "--out", report_path})
                .code == 0);

    Dataset pred_data = parse_conll(read_text_file(pred));
    std::vector<Phrase> pred_phrases, gold_phrases;
    for (const Sentence& s : pred_data.sentences)
      for (Phrase& p : extract_phrases(s.id, *s.tags)) pred_phrases.push_back(std::move(p));
    for (const Sentence& s : test_data.sentences)
      for (Phrase& p : extract_phrases(s.id, repair_bio(*s.tags)))
        gold_phrases.push_back(std::move(p));
    OverlapReport direct = overlap_scores(pred_phrases, gold_phrases);
    CHECK(read_text_file(report_path) == overlap_report_tsv(direct));
    CHECK(std::filesystem::exists(report_path + ".meta.json"));
  }

  SECTION("classification and end-to-end evaluation run on mined phrases") {
    std::string clf = fx.dir.file("clf.excm");
    REQUIRE(run_cli({"train-clf", "--phrases", fx.phrases, "--conll", fx.conll, "--embeddings",
                     fx.embeddings, "--keywords", fx.keywords, "--model", clf, "--epochs",
                     "150"})
                .code == 0);

    std::string labeled = fx.dir.file("labeled.tsv");
    REQUIRE(run_cli({"classify", "--model", clf, "--phrases", mined, "--conll", pred,
                     "--embeddings", fx.embeddings, "--keywords", fx.keywords, "--out", labeled})
                .code == 0);
    for (const Phrase& p : read_phrases_tsv(read_text_file(labeled)))
      CHECK(p.category.has_value());

    // gold phrases restricted to the test sentences
    std::vector<Phrase> gold_test;
    for (const Phrase& p : read_phrases_tsv(read_text_file(fx.phrases)))
      if (test_data.find_sentence(p.sentence_id)) gold_test.push_back(p);
    std::string gold_tsv = fx.dir.file("gold_test.tsv");
    write_file(gold_tsv, write_phrases_tsv(gold_test, nullptr));

    std::string e2e_json = fx.dir.file("e2e.json");
    REQUIRE(run_cli({"eval-e2e", "--pred", labeled, "--gold", gold_tsv, "--json", e2e_json})
                .code == 0);
    nlohmann::json report = nlohmann::json::parse(read_text_file(e2e_json));
    CHECK(report["overall"]["pred_count"].get<std::size_t>() ==
          read_phrases_tsv(read_text_file(labeled)).size());
    CHECK(report["overall"]["gold_count"].get<std::size_t>() == gold_test.size());
  }
}

TEST_CASE("eval-e2e rejects phrases without categories") {
  TempDir dir;
  std::string gold = dir.file("gold.tsv");
  std::string pred = dir.file("pred.tsv");
  write_file(gold, "s1\t0\t2\tINC\tPrice\t\n");
  write_file(pred, "s1\t0\t2\tINC\t\t\n");
  CHECK(run_cli({"eval-e2e", "--pred", pred, "--gold", gold}).code == 1);
}

TEST_CASE("eval-classes compares aligned phrase files") {
  TempDir dir;
  std::string gold = dir.file("gold.tsv");
  std::string pred = dir.file("pred.tsv");
  write_file(gold,
             "sentence_id\tstart\tend\tcoarse\tcategory\ttext\n"
             "s1\t0\t2\tINC\tPrice\t\n"
             "s1\t3\t5\tINC\tFood\t\n");
  write_file(pred,
             "sentence_id\tstart\tend\tcoarse\tcategory\ttext\n"
             "s1\t0\t2\tINC\tPrice\t\n"
             "s1\t3\t5\tINC\tPrice\t\n");
  CliResult r = run_cli({"eval-classes", "--pred", pred, "--gold", gold});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("Price\t0.500000\t1.000000") != std::string::npos);

  // misaligned spans are data errors
  write_file(pred,
             "sentence_id\tstart\tend\tcoarse\tcategory\ttext\n"
             "s1\t0\t2\tINC\tPrice\t\n"
             "s1\t3\t6\tINC\tPrice\t\n");
  CHECK(run_cli({"eval-classes", "--pred", pred, "--gold", gold}).code == 1);
}
