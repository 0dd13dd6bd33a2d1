#pragma once

#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "excmine/excmine.hpp"

namespace excmine::cli {

namespace detail {

struct InputFile {
  std::string path;
  std::string content;
};

inline InputFile slurp(const std::string& path) {
  return InputFile{path, read_text_file(path)};
}

inline nlohmann::json run_meta(const std::string& command,
                               std::span<const InputFile> inputs,
                               const nlohmann::json& config) {
  nlohmann::json meta;
  meta["format"] = kModelFormatVersion;
  meta["tool"] = "excmine";
  meta["command"] = command;
  meta["config"] = config;
  meta["inputs"] = nlohmann::json::object();
  for (const InputFile& f : inputs) meta["inputs"][f.path] = fnv1a64_hex(f.content);
  return meta;
}

// Every file output gets a sibling <path>.meta.json describing the run.
inline void write_output(const std::string& path, const std::string& content,
                         nlohmann::json meta) {
  write_file_atomic(path, content);
  meta["output"] = nlohmann::json{{"path", path}, {"checksum", fnv1a64_hex(content)}};
  write_file_atomic(path + ".meta.json", meta.dump(2) + "\n");
}

inline void emit_report(const std::string& tsv, const nlohmann::json& json_report,
                        const std::string& out_path, const std::string& json_path,
                        const nlohmann::json& meta) {
  if (out_path.empty() && json_path.empty()) {
    std::cout << tsv;
    return;
  }
  if (!out_path.empty()) write_output(out_path, tsv, meta);
  if (!json_path.empty()) write_output(json_path, json_report.dump(2) + "\n", meta);
}

inline Dataset parse_conll_repaired(const InputFile& file) {
  Dataset data = parse_conll(file.content);
  for (Sentence& s : data.sentences)
    if (s.tags) s.tags = repair_bio(*s.tags);
  return data;
}

inline std::map<std::string, const Sentence*> sentence_lookup(const Dataset& data) {
  std::map<std::string, const Sentence*> lookup;
  for (const Sentence& s : data.sentences) {
    if (lookup.count(s.id)) throw Error("duplicate sentence id '" + s.id + "'");
    lookup[s.id] = &s;
  }
  return lookup;
}

inline const Sentence& resolve_sentence(const std::map<std::string, const Sentence*>& lookup,
                                        const std::string& id) {
  auto it = lookup.find(id);
  if (it == lookup.end()) throw Error("phrase references unknown sentence '" + id + "'");
  return *it->second;
}

inline void require_aligned(const Dataset& pred, const Dataset& gold) {
  if (pred.sentences.size() != gold.sentences.size())
    throw LengthMismatch("sentence count mismatch: " + std::to_string(pred.sentences.size()) +
                         " vs " + std::to_string(gold.sentences.size()));
  for (std::size_t i = 0; i < pred.sentences.size(); ++i) {
    if (pred.sentences[i].id != gold.sentences[i].id)
      throw Error("sentence id mismatch at position " + std::to_string(i) + ": '" +
                  pred.sentences[i].id + "' vs '" + gold.sentences[i].id + "'");
    if (pred.sentences[i].tokens.size() != gold.sentences[i].tokens.size())
      throw LengthMismatch("token count mismatch in sentence '" + pred.sentences[i].id + "'");
  }
}

inline std::vector<Phrase> dataset_phrases(const Dataset& data) {
  std::vector<Phrase> out;
  for (const Sentence& s : data.sentences) {
    if (!s.tags) throw MissingTags("sentence '" + s.id + "' has no tags");
    for (Phrase& p : extract_phrases(s.id, *s.tags)) out.push_back(std::move(p));
  }
  return out;
}

inline std::array<double, 3> parse_ratios(const std::string& text) {
  std::vector<std::string> parts = split_char(text, ',');
  if (parts.size() != 3) throw BadRatios("expected three comma-separated ratios");
  std::array<double, 3> ratios{};
  for (std::size_t i = 0; i < 3; ++i) {
    bool ok = false;
    ratios[i] = parse_double(parts[i], &ok);
    if (!ok) throw BadRatios("bad ratio '" + parts[i] + "'");
  }
  return ratios;
}

// ---------------------------------------------------------------------------
// Subcommand handlers.
// ---------------------------------------------------------------------------

struct PrepareArgs {
  std::string reviews, keywords, out;
};

inline void cmd_prepare(const PrepareArgs& a) {
  InputFile reviews_file = slurp(a.reviews);
  InputFile keywords_file = slurp(a.keywords);

  std::istringstream rin(reviews_file.content);
  std::vector<Review> reviews = read_reviews_jsonl(rin);
  std::vector<Sentence> sentences = reviews_to_sentences(reviews);
  KeywordIndex keywords = load_keywords(keywords_file.content);

  Dataset out;
  for (KeywordMatch& m : filter_candidate_sentences(sentences, keywords)) {
    m.sentence.tags = std::vector<BioTag>(m.sentence.tokens.size(), BioTag::O);
    out.sentences.push_back(std::move(m.sentence));
  }

  std::vector<InputFile> inputs{reviews_file, keywords_file};
  nlohmann::json config{{"reviews", a.reviews}, {"keywords", a.keywords}};
  nlohmann::json meta = run_meta("prepare", inputs, config);
  meta["stats"] = {{"reviews", reviews.size()},
                   {"sentences", sentences.size()},
                   {"kept_sentences", out.sentences.size()}};
  write_output(a.out, write_conll(out), meta);
  std::cerr << "prepare: kept " << out.sentences.size() << " of " << sentences.size()
            << " sentences\n";
}

struct SplitArgs {
  std::string in, train, dev, test;
  std::string ratios = "0.7,0.1,0.2";
  std::uint64_t seed = 13;
};

inline void cmd_split(const SplitArgs& a) {
  InputFile in_file = slurp(a.in);
  Dataset data = parse_conll(in_file.content);
  std::array<double, 3> ratios = parse_ratios(a.ratios);
  SplitResult split = split_dataset(data, ratios, a.seed);

  std::vector<InputFile> inputs{in_file};
  nlohmann::json config{{"ratios", a.ratios}, {"seed", a.seed}};
  for (const auto& [path, part] :
       {std::pair<const std::string&, const Dataset&>{a.train, split.train},
        std::pair<const std::string&, const Dataset&>{a.dev, split.dev},
        std::pair<const std::string&, const Dataset&>{a.test, split.test}}) {
    nlohmann::json meta = run_meta("split", inputs, config);
    meta["stats"] = {{"sentences", part.sentences.size()}};
    write_output(path, write_conll(part), meta);
  }
  std::cerr << "split: " << split.train.sentences.size() << "/" << split.dev.sentences.size()
            << "/" << split.test.sentences.size() << " sentences\n";
}

struct TrainCrfArgs {
  std::string train, dev, embeddings, model;
  TrainConfig config;
  std::size_t window = 1;
  std::size_t min_count = 2;
};

inline void cmd_train_crf(const TrainCrfArgs& a) {
  InputFile train_file = slurp(a.train);
  Dataset train = parse_conll_repaired(train_file);
  Dataset dev;
  std::vector<InputFile> inputs{train_file};
  if (!a.dev.empty()) {
    InputFile dev_file = slurp(a.dev);
    dev = parse_conll_repaired(dev_file);
    inputs.push_back(std::move(dev_file));
  }
  InputFile emb_file = slurp(a.embeddings);
  EmbeddingTable table = load_embeddings(emb_file.content);
  inputs.push_back(std::move(emb_file));

  FeatureTemplate tmpl(table.dim, a.window, a.min_count);
  tmpl.fit(train.sentences);
  tmpl.freeze();

  CrfTrainResult result = train_crf(a.config, train.sentences, dev.sentences, tmpl, table);
  double best_f1 = 0.0;
  for (const EpochStats& e : result.history) best_f1 = std::max(best_f1, e.dev_f1);

  nlohmann::json config{{"learning_rate", a.config.learning_rate},
                        {"momentum", a.config.momentum},
                        {"batch_size", a.config.batch_size},
                        {"epochs", a.config.epochs},
                        {"l2_lambda", a.config.l2_lambda},
                        {"seed", a.config.seed},
                        {"window", a.window},
                        {"min_count", a.min_count}};
  nlohmann::json meta = run_meta("train-crf", inputs, config);
  meta["best_dev_f1"] = best_f1;
  meta["final_train_loss"] = result.history.empty() ? 0.0 : result.history.back().train_loss;

  write_file_atomic(a.model, serialize_crf_model(result.model, meta));
  meta["output"] = nlohmann::json{{"path", a.model}};
  write_file_atomic(a.model + ".meta.json", meta.dump(2) + "\n");
  std::cerr << "train-crf: " << result.history.size() << " epochs, best dev binary F1 "
            << best_f1 << "\n";
}

struct TagArgs {
  std::string model, embeddings, in, out, phrases_out;
};

inline void cmd_tag(const TagArgs& a) {
  LoadedCrfModel loaded = load_crf_model(a.model);
  InputFile model_file = slurp(a.model);
  InputFile emb_file = slurp(a.embeddings);
  InputFile in_file = slurp(a.in);
  EmbeddingTable table = load_embeddings(emb_file.content);
  if (table.dim != loaded.model.tmpl.embedding_dim)
    throw WidthMismatch("embedding dim " + std::to_string(table.dim) +
                        " != model dim " + std::to_string(loaded.model.tmpl.embedding_dim));

  Dataset data = parse_conll(in_file.content);
  std::vector<std::vector<BioTag>> predicted = tag(loaded.model, table, data.sentences);
  for (std::size_t i = 0; i < data.sentences.size(); ++i)
    data.sentences[i].tags = predicted[i];

  std::vector<InputFile> inputs{model_file, emb_file, in_file};
  nlohmann::json config{{"model", a.model}};
  write_output(a.out, write_conll(data), run_meta("tag", inputs, config));

  if (!a.phrases_out.empty()) {
    std::vector<Phrase> phrases = dataset_phrases(data);
    write_output(a.phrases_out, write_phrases_tsv(phrases, &data),
                 run_meta("tag", inputs, config));
  }
}

struct TrainClfArgs {
  std::string phrases, conll, embeddings, keywords, model;
  ClfConfig config;
};

inline void cmd_train_clf(const TrainClfArgs& a) {
  InputFile phrases_file = slurp(a.phrases);
  InputFile conll_file = slurp(a.conll);
  InputFile emb_file = slurp(a.embeddings);
  InputFile keywords_file = slurp(a.keywords);

  std::vector<Phrase> phrases = read_phrases_tsv(phrases_file.content);
  Dataset data = parse_conll(conll_file.content);
  EmbeddingTable table = load_embeddings(emb_file.content);
  KeywordIndex keywords = load_keywords(keywords_file.content);
  auto lookup = sentence_lookup(data);

  std::vector<std::vector<double>> xs;
  std::vector<Category> ys;
  for (const Phrase& p : phrases) {
    if (!p.category)
      throw Error("training phrase in sentence '" + p.sentence_id + "' has no category");
    const Sentence& s = resolve_sentence(lookup, p.sentence_id);
    xs.push_back(phrase_features(table, keywords, s, p));
    ys.push_back(*p.category);
  }

  ClfTrainResult result = train_softmax(a.config, xs, ys);

  std::vector<InputFile> inputs{phrases_file, conll_file, emb_file, keywords_file};
  nlohmann::json config{{"learning_rate", a.config.learning_rate},
                        {"epochs", a.config.epochs},
                        {"l2_lambda", a.config.l2_lambda},
                        {"batch_size", a.config.batch_size},
                        {"seed", a.config.seed}};
  nlohmann::json meta = run_meta("train-clf", inputs, config);
  meta["final_train_loss"] = result.loss_history.empty() ? 0.0 : result.loss_history.back();
  meta["examples"] = xs.size();

  write_file_atomic(a.model, serialize_softmax_model(result.model, table.dim, meta));
  meta["output"] = nlohmann::json{{"path", a.model}};
  write_file_atomic(a.model + ".meta.json", meta.dump(2) + "\n");
  std::cerr << "train-clf: " << xs.size() << " phrases, final loss "
            << (result.loss_history.empty() ? 0.0 : result.loss_history.back()) << "\n";
}

struct ClassifyArgs {
  std::string model, phrases, conll, embeddings, keywords, out;
};

inline void cmd_classify(const ClassifyArgs& a) {
  LoadedSoftmaxModel loaded = load_softmax_model(a.model);
  InputFile model_file = slurp(a.model);
  InputFile phrases_file = slurp(a.phrases);
  InputFile conll_file = slurp(a.conll);
  InputFile emb_file = slurp(a.embeddings);
  InputFile keywords_file = slurp(a.keywords);

  std::vector<Phrase> phrases = read_phrases_tsv(phrases_file.content);
  Dataset data = parse_conll(conll_file.content);
  EmbeddingTable table = load_embeddings(emb_file.content);
  if (table.dim != loaded.embedding_dim)
    throw WidthMismatch("embedding dim " + std::to_string(table.dim) + " != model dim " +
                        std::to_string(loaded.embedding_dim));
  KeywordIndex keywords = load_keywords(keywords_file.content);
  auto lookup = sentence_lookup(data);

  for (Phrase& p : phrases) {
    const Sentence& s = resolve_sentence(lookup, p.sentence_id);
    std::vector<double> x = phrase_features(table, keywords, s, p);
    p.category = predict(loaded.model, x).first;
  }

  std::vector<InputFile> inputs{model_file, phrases_file, conll_file, emb_file, keywords_file};
  nlohmann::json config{{"model", a.model}};
  write_output(a.out, write_phrases_tsv(phrases, &data), run_meta("classify", inputs, config));
}

struct EvalSpansArgs {
  std::string pred, gold, out, json;
};

inline void cmd_eval_spans(const EvalSpansArgs& a) {
  InputFile pred_file = slurp(a.pred);
  InputFile gold_file = slurp(a.gold);
  Dataset pred = parse_conll_repaired(pred_file);
  Dataset gold = parse_conll_repaired(gold_file);
  require_aligned(pred, gold);

  OverlapReport report = overlap_scores(dataset_phrases(pred), dataset_phrases(gold));
  std::vector<InputFile> inputs{pred_file, gold_file};
  nlohmann::json meta = run_meta("eval-spans", inputs, nlohmann::json::object());
  emit_report(overlap_report_tsv(report), overlap_report_json(report), a.out, a.json, meta);
}

struct EvalTsvArgs {
  std::string pred, gold, out, json;
};

// Row-aligned phrase lists: the i-th prediction must be the i-th gold span.
inline std::pair<std::vector<Category>, std::vector<Category>> aligned_categories(
    std::span<const Phrase> pred, std::span<const Phrase> gold) {
  if (pred.size() != gold.size())
    throw LengthMismatch("phrase count mismatch: " + std::to_string(pred.size()) + " vs " +
                         std::to_string(gold.size()));
  std::vector<Category> p, g;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i].sentence_id != gold[i].sentence_id || pred[i].start != gold[i].start ||
        pred[i].end != gold[i].end)
      throw Error("phrase mismatch at row " + std::to_string(i + 2) +
                  ": prediction and gold files must list the same spans in the same order");
    if (!pred[i].category || !gold[i].category)
      throw Error("phrase at row " + std::to_string(i + 2) + " has no category");
    p.push_back(*pred[i].category);
    g.push_back(*gold[i].category);
  }
  return {std::move(p), std::move(g)};
}

inline void cmd_eval_classes(const EvalTsvArgs& a) {
  InputFile pred_file = slurp(a.pred);
  InputFile gold_file = slurp(a.gold);
  auto [pred, gold] = aligned_categories(read_phrases_tsv(pred_file.content),
                                         read_phrases_tsv(gold_file.content));
  ClassReport report = multiclass_report(pred, gold);
  std::vector<InputFile> inputs{pred_file, gold_file};
  nlohmann::json meta = run_meta("eval-classes", inputs, nlohmann::json::object());
  emit_report(class_report_tsv(report), class_report_json(report), a.out, a.json, meta);
}

inline void cmd_eval_e2e(const EvalTsvArgs& a) {
  InputFile pred_file = slurp(a.pred);
  InputFile gold_file = slurp(a.gold);
  std::vector<Phrase> pred = read_phrases_tsv(pred_file.content);
  std::vector<Phrase> gold = read_phrases_tsv(gold_file.content);
  for (const auto& [name, phrases] :
       {std::pair<const char*, const std::vector<Phrase>&>{"prediction", pred},
        std::pair<const char*, const std::vector<Phrase>&>{"gold", gold}}) {
    for (const Phrase& p : phrases)
      if (!p.category)
        throw Error(std::string(name) + " phrase in sentence '" + p.sentence_id +
                    "' has no category; run classify first");
  }
  E2EReport report = end_to_end(pred, gold);
  std::vector<InputFile> inputs{pred_file, gold_file};
  nlohmann::json meta = run_meta("eval-e2e", inputs, nlohmann::json::object());
  emit_report(e2e_report_tsv(report), e2e_report_json(report), a.out, a.json, meta);
}

struct KappaArgs {
  std::string a, b;
  std::string mode = "tags";
};

inline void cmd_kappa(const KappaArgs& args) {
  InputFile a_file = slurp(args.a);
  InputFile b_file = slurp(args.b);
  double kappa = 0.0;
  if (args.mode == "tags") {
    Dataset a = parse_conll(a_file.content);
    Dataset b = parse_conll(b_file.content);
    require_aligned(a, b);
    std::vector<BioTag> ta, tb;
    for (const Sentence& s : a.sentences) ta.insert(ta.end(), s.tags->begin(), s.tags->end());
    for (const Sentence& s : b.sentences) tb.insert(tb.end(), s.tags->begin(), s.tags->end());
    kappa = cohen_kappa(ta, tb);
  } else if (args.mode == "categories") {
    auto [a, b] = aligned_categories(read_phrases_tsv(a_file.content),
                                     read_phrases_tsv(b_file.content));
    kappa = cohen_kappa(a, b);
  } else {
    throw Error("unknown kappa mode '" + args.mode + "' (expected tags or categories)");
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", kappa);
  std::cout << "kappa\t" << buf << "\n";
}

struct StatsArgs {
  std::string in, phrases;
};

inline void cmd_stats(const StatsArgs& a) {
  InputFile in_file = slurp(a.in);
  Dataset data = parse_conll(in_file.content);
  if (!a.phrases.empty()) {
    InputFile phrases_file = slurp(a.phrases);
    data.phrases = read_phrases_tsv(phrases_file.content);
  }
  LabelDistribution dist = label_distribution(data);
  std::cout << "sentences\t" << dist.sentences << "\n";
  std::cout << "tokens\t" << dist.tokens << "\n";
  for (int t = 0; t < kNumTags; ++t)
    std::cout << "tag\t" << tag_name(static_cast<BioTag>(t)) << "\t" << dist.tag_counts[t]
              << "\n";
  std::cout << "phrases\t" << dist.phrases << "\n";
  for (int c = 0; c < kNumCategories; ++c)
    std::cout << "category\t" << category_name(static_cast<Category>(c)) << "\t"
              << dist.category_counts[c] << "\n";
}

}  // namespace detail

// Exit codes: 0 success, 1 data/model errors, 2 usage errors.
inline int run(int argc, const char* const* argv) {
  CLI::App app{"Inclusion/exclusion phrase mining toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("excmine ") + kModelFormatVersion);

  detail::PrepareArgs prepare;
  CLI::App* prepare_cmd =
      app.add_subcommand("prepare", "Filter candidate sentences from raw reviews");
  prepare_cmd->add_option("--reviews", prepare.reviews, "Reviews JSONL file")->required();
  prepare_cmd->add_option("--keywords", prepare.keywords, "Keyword JSON file")->required();
  prepare_cmd->add_option("--out", prepare.out, "Output tag file")->required();

  detail::SplitArgs split;
  CLI::App* split_cmd = app.add_subcommand("split", "Split a dataset into train/dev/test");
  split_cmd->add_option("--in", split.in, "Input tag file")->required();
  split_cmd->add_option("--ratios", split.ratios, "Comma-separated ratios (default 0.7,0.1,0.2)");
  split_cmd->add_option("--seed", split.seed, "Shuffle seed");
  split_cmd->add_option("--train", split.train, "Train output path")->required();
  split_cmd->add_option("--dev", split.dev, "Dev output path")->required();
  split_cmd->add_option("--test", split.test, "Test output path")->required();

  detail::TrainCrfArgs train_crf_args;
  CLI::App* train_crf_cmd = app.add_subcommand("train-crf", "Train the sequence labeler");
  train_crf_cmd->add_option("--train", train_crf_args.train, "Training tag file")->required();
  train_crf_cmd->add_option("--dev", train_crf_args.dev, "Dev tag file for model selection");
  train_crf_cmd->add_option("--embeddings", train_crf_args.embeddings, "Word vector text file")
      ->required();
  train_crf_cmd->add_option("--model", train_crf_args.model, "Model output path")->required();
  train_crf_cmd->add_option("--lr", train_crf_args.config.learning_rate, "Learning rate");
  train_crf_cmd->add_option("--momentum", train_crf_args.config.momentum, "Momentum");
  train_crf_cmd->add_option("--batch", train_crf_args.config.batch_size, "Batch size");
  train_crf_cmd->add_option("--epochs", train_crf_args.config.epochs, "Epochs");
  train_crf_cmd->add_option("--l2", train_crf_args.config.l2_lambda, "L2 strength");
  train_crf_cmd->add_option("--seed", train_crf_args.config.seed, "Shuffle seed");
  train_crf_cmd->add_option("--window", train_crf_args.window, "Context window radius");
  train_crf_cmd->add_option("--min-count", train_crf_args.min_count,
                            "Minimum word count for identity features");

  detail::TagArgs tag_args;
  CLI::App* tag_cmd = app.add_subcommand("tag", "Tag sentences with a trained model");
  tag_cmd->add_option("--model", tag_args.model, "Model path")->required();
  tag_cmd->add_option("--embeddings", tag_args.embeddings, "Word vector text file")->required();
  tag_cmd->add_option("--in", tag_args.in, "Input tag file (existing tags ignored)")->required();
  tag_cmd->add_option("--out", tag_args.out, "Tagged output path")->required();
  tag_cmd->add_option("--phrases-out", tag_args.phrases_out,
                      "Also write extracted phrases as TSV");

  detail::TrainClfArgs train_clf_args;
  CLI::App* train_clf_cmd = app.add_subcommand("train-clf", "Train the phrase classifier");
  train_clf_cmd->add_option("--phrases", train_clf_args.phrases, "Phrase TSV with categories")
      ->required();
  train_clf_cmd->add_option("--conll", train_clf_args.conll, "Tag file with the sentences")
      ->required();
  train_clf_cmd->add_option("--embeddings", train_clf_args.embeddings, "Word vector text file")
      ->required();
  train_clf_cmd->add_option("--keywords", train_clf_args.keywords, "Keyword JSON file")
      ->required();
  train_clf_cmd->add_option("--model", train_clf_args.model, "Model output path")->required();
  train_clf_cmd->add_option("--lr", train_clf_args.config.learning_rate, "Learning rate");
  train_clf_cmd->add_option("--epochs", train_clf_args.config.epochs, "Epochs");
  train_clf_cmd->add_option("--l2", train_clf_args.config.l2_lambda, "L2 strength");
  train_clf_cmd->add_option("--batch", train_clf_args.config.batch_size,
                            "Batch size (0 = full batch)");
  train_clf_cmd->add_option("--seed", train_clf_args.config.seed, "Shuffle seed");

  detail::ClassifyArgs classify_args;
  CLI::App* classify_cmd = app.add_subcommand("classify", "Categorize mined phrases");
  classify_cmd->add_option("--model", classify_args.model, "Model path")->required();
  classify_cmd->add_option("--phrases", classify_args.phrases, "Phrase TSV")->required();
  classify_cmd->add_option("--conll", classify_args.conll, "Tag file with the sentences")
      ->required();
  classify_cmd->add_option("--embeddings", classify_args.embeddings, "Word vector text file")
      ->required();
  classify_cmd->add_option("--keywords", classify_args.keywords, "Keyword JSON file")->required();
  classify_cmd->add_option("--out", classify_args.out, "Output TSV path")->required();

  detail::EvalSpansArgs eval_spans_args;
  CLI::App* eval_spans_cmd =
      app.add_subcommand("eval-spans", "Span overlap metrics for mined phrases");
  eval_spans_cmd->add_option("--pred", eval_spans_args.pred, "Predicted tag file")->required();
  eval_spans_cmd->add_option("--gold", eval_spans_args.gold, "Gold tag file")->required();
  eval_spans_cmd->add_option("--out", eval_spans_args.out, "TSV output path (default stdout)");
  eval_spans_cmd->add_option("--json", eval_spans_args.json, "JSON output path");

  detail::EvalTsvArgs eval_classes_args;
  CLI::App* eval_classes_cmd =
      app.add_subcommand("eval-classes", "Categorization metrics for phrase files");
  eval_classes_cmd->add_option("--pred", eval_classes_args.pred, "Predicted phrase TSV")
      ->required();
  eval_classes_cmd->add_option("--gold", eval_classes_args.gold, "Gold phrase TSV")->required();
  eval_classes_cmd->add_option("--out", eval_classes_args.out, "TSV output path (default stdout)");
  eval_classes_cmd->add_option("--json", eval_classes_args.json, "JSON output path");

  detail::EvalTsvArgs eval_e2e_args;
  CLI::App* eval_e2e_cmd =
      app.add_subcommand("eval-e2e", "End-to-end pipeline metrics for phrase files");
  eval_e2e_cmd->add_option("--pred", eval_e2e_args.pred, "Predicted phrase TSV")->required();
  eval_e2e_cmd->add_option("--gold", eval_e2e_args.gold, "Gold phrase TSV")->required();
  eval_e2e_cmd->add_option("--out", eval_e2e_args.out, "TSV output path (default stdout)");
  eval_e2e_cmd->add_option("--json", eval_e2e_args.json, "JSON output path");

  detail::KappaArgs kappa_args;
  CLI::App* kappa_cmd = app.add_subcommand("kappa", "Inter-annotator agreement");
  kappa_cmd->add_option("--a", kappa_args.a, "First annotator file")->required();
  kappa_cmd->add_option("--b", kappa_args.b, "Second annotator file")->required();
  kappa_cmd->add_option("--mode", kappa_args.mode, "tags (tag files) or categories (phrase TSVs)");

  detail::StatsArgs stats_args;
  CLI::App* stats_cmd = app.add_subcommand("stats", "Label distribution of a dataset");
  stats_cmd->add_option("--in", stats_args.in, "Input tag file")->required();
  stats_cmd->add_option("--phrases", stats_args.phrases, "Optional phrase TSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    std::cout << app.version() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (prepare_cmd->parsed()) detail::cmd_prepare(prepare);
    else if (split_cmd->parsed()) detail::cmd_split(split);
    else if (train_crf_cmd->parsed()) detail::cmd_train_crf(train_crf_args);
    else if (tag_cmd->parsed()) detail::cmd_tag(tag_args);
    else if (train_clf_cmd->parsed()) detail::cmd_train_clf(train_clf_args);
    else if (classify_cmd->parsed()) detail::cmd_classify(classify_args);
    else if (eval_spans_cmd->parsed()) detail::cmd_eval_spans(eval_spans_args);
    else if (eval_classes_cmd->parsed()) detail::cmd_eval_classes(eval_classes_args);
    else if (eval_e2e_cmd->parsed()) detail::cmd_eval_e2e(eval_e2e_args);
    else if (kappa_cmd->parsed()) detail::cmd_kappa(kappa_args);
    else if (stats_cmd->parsed()) detail::cmd_stats(stats_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace excmine::cli
