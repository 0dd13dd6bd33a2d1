#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "excmine/types.hpp"
#include "excmine/util.hpp"

namespace excmine {

enum class OverlapMode : int { Binary = 0, Proportional = 1 };

inline const char* overlap_mode_name(OverlapMode m) {
  return m == OverlapMode::Binary ? "binary" : "proportional";
}

struct OverlapEntry {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double precision_credit = 0.0;  // summed per-span credit before division
  double recall_credit = 0.0;
  std::size_t pred_spans = 0;
  std::size_t gold_spans = 0;
};

struct OverlapReport {
  std::array<std::array<OverlapEntry, 2>, 2> entries{};  // [coarse][mode]

  const OverlapEntry& at(Coarse c, OverlapMode m) const {
    return entries[static_cast<int>(c)][static_cast<int>(m)];
  }
  OverlapEntry& at(Coarse c, OverlapMode m) {
    return entries[static_cast<int>(c)][static_cast<int>(m)];
  }
};

namespace detail {

inline std::size_t span_overlap(std::size_t a_start, std::size_t a_end, std::size_t b_start,
                                std::size_t b_end) {
  std::size_t lo = std::max(a_start, b_start);
  std::size_t hi = std::min(a_end, b_end);
  return hi > lo ? hi - lo : 0;
}

inline void check_span(const Phrase& p) {
  if (p.start >= p.end)
    throw SpanOutOfRange("phrase span [" + std::to_string(p.start) + "," +
                         std::to_string(p.end) + ") in sentence '" + p.sentence_id +
                         "' is empty or inverted");
}

// Credit for one side of the overlap computation: for each phrase in `these`,
// binary credit is 1 when any same-sentence phrase in `others` overlaps it;
// proportional credit is the summed overlap capped at the phrase length,
// divided by the phrase length.
inline std::pair<double, double> overlap_credits(
    std::span<const Phrase> these,
    const std::map<std::string, std::vector<const Phrase*>>& others) {
  double binary = 0.0, proportional = 0.0;
  for (const Phrase& p : these) {
    auto it = others.find(p.sentence_id);
    std::size_t total = 0;
    if (it != others.end())
      for (const Phrase* o : it->second) total += span_overlap(p.start, p.end, o->start, o->end);
    if (total > 0) binary += 1.0;
    proportional +=
        static_cast<double>(std::min(total, p.length())) / static_cast<double>(p.length());
  }
  return {binary, proportional};
}

}  // namespace detail

// Span-level precision/recall/F1 per coarse class, in two modes: binary
// (any overlap counts in full) and proportional (credit scales with the
// overlapped fraction). Predictions only ever match gold of the same class.
inline OverlapReport overlap_scores(std::span<const Phrase> pred, std::span<const Phrase> gold) {
  for (const Phrase& p : pred) detail::check_span(p);
  for (const Phrase& g : gold) detail::check_span(g);

  OverlapReport report;
  for (Coarse c : {Coarse::INC, Coarse::EXC}) {
    std::vector<Phrase> pred_c, gold_c;
    std::map<std::string, std::vector<const Phrase*>> pred_by_sent, gold_by_sent;
    for (const Phrase& p : pred)
      if (p.coarse == c) pred_c.push_back(p);
    for (const Phrase& g : gold)
      if (g.coarse == c) gold_c.push_back(g);
    for (const Phrase& p : pred_c) pred_by_sent[p.sentence_id].push_back(&p);
    for (const Phrase& g : gold_c) gold_by_sent[g.sentence_id].push_back(&g);

    auto [p_bin, p_prop] = detail::overlap_credits(pred_c, gold_by_sent);
    auto [r_bin, r_prop] = detail::overlap_credits(gold_c, pred_by_sent);

    for (OverlapMode m : {OverlapMode::Binary, OverlapMode::Proportional}) {
      OverlapEntry& e = report.at(c, m);
      e.pred_spans = pred_c.size();
      e.gold_spans = gold_c.size();
      e.precision_credit = (m == OverlapMode::Binary) ? p_bin : p_prop;
      e.recall_credit = (m == OverlapMode::Binary) ? r_bin : r_prop;
      e.precision = e.pred_spans ? e.precision_credit / static_cast<double>(e.pred_spans) : 0.0;
      e.recall = e.gold_spans ? e.recall_credit / static_cast<double>(e.gold_spans) : 0.0;
      e.f1 = harmonic_f1(e.precision, e.recall);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Multi-class categorization report.
// ---------------------------------------------------------------------------

struct ClassScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct ClassReport {
  std::array<ClassScore, kNumCategories> per_class{};
  ClassScore weighted;  // support-weighted headline aggregate
  ClassScore macro;     // unweighted mean over categories present
  std::array<std::array<std::size_t, kNumCategories>, kNumCategories> confusion{};  // [gold][pred]
  std::size_t total = 0;
};

inline ClassReport multiclass_report(std::span<const Category> pred,
                                     std::span<const Category> gold) {
  if (pred.size() != gold.size())
    throw LengthMismatch("prediction/gold lists differ in length: " +
                         std::to_string(pred.size()) + " vs " + std::to_string(gold.size()));
  if (pred.empty()) throw EmptyInput("no predictions to score");

  ClassReport report;
  report.total = pred.size();
  for (std::size_t i = 0; i < pred.size(); ++i)
    report.confusion[static_cast<int>(gold[i])][static_cast<int>(pred[i])]++;

  std::size_t present = 0;
  for (int c = 0; c < kNumCategories; ++c) {
    std::size_t tp = report.confusion[c][c];
    std::size_t support = 0, predicted = 0;
    for (int o = 0; o < kNumCategories; ++o) {
      support += report.confusion[c][o];
      predicted += report.confusion[o][c];
    }
    ClassScore& s = report.per_class[c];
    s.support = support;
    s.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    s.recall = support ? static_cast<double>(tp) / static_cast<double>(support) : 0.0;
    s.f1 = harmonic_f1(s.precision, s.recall);

    double w = static_cast<double>(support) / static_cast<double>(report.total);
    report.weighted.precision += w * s.precision;
    report.weighted.recall += w * s.recall;
    report.weighted.f1 += w * s.f1;
    if (support > 0 || predicted > 0) {
      ++present;
      report.macro.precision += s.precision;
      report.macro.recall += s.recall;
      report.macro.f1 += s.f1;
    }
  }
  report.weighted.support = report.total;
  report.macro.support = present;
  if (present > 0) {
    report.macro.precision /= static_cast<double>(present);
    report.macro.recall /= static_cast<double>(present);
    report.macro.f1 /= static_cast<double>(present);
  }
  return report;
}

// ---------------------------------------------------------------------------
// End-to-end protocol: mined phrases with predicted categories scored
// against gold phrases.
// ---------------------------------------------------------------------------

struct E2EBucket {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t pred_count = 0;
  std::size_t gold_count = 0;
  std::size_t correct_predictions = 0;
  std::size_t recalled_gold = 0;
};

struct E2EReport {
  E2EBucket overall, inclusion, exclusion;
  std::size_t sink_predictions = 0;  // predictions overlapping no gold phrase
  std::size_t undetected_gold = 0;   // gold phrases overlapping no prediction
};

// Each prediction is matched to the same-sentence gold phrase with maximum
// token overlap (ties: earliest gold start). A prediction counts for
// precision only with nonzero overlap and an exact category match; a gold
// phrase counts as recalled when such a prediction is matched to it.
// Buckets use the predicted coarse class on the precision side and the gold
// coarse class on the recall side.
inline E2EReport end_to_end(std::span<const Phrase> pred, std::span<const Phrase> gold) {
  for (const Phrase& p : pred) detail::check_span(p);
  for (const Phrase& g : gold) detail::check_span(g);

  std::map<std::string, std::vector<std::size_t>> gold_by_sent;
  for (std::size_t g = 0; g < gold.size(); ++g) gold_by_sent[gold[g].sentence_id].push_back(g);

  E2EReport report;
  std::vector<bool> recalled(gold.size(), false);
  std::vector<bool> touched(gold.size(), false);

  for (const Phrase& p : pred) {
    std::size_t best_overlap = 0;
    std::size_t best_gold = gold.size();
    auto it = gold_by_sent.find(p.sentence_id);
    if (it != gold_by_sent.end()) {
      for (std::size_t g : it->second) {
        std::size_t ov = detail::span_overlap(p.start, p.end, gold[g].start, gold[g].end);
        if (ov == 0) continue;
        touched[g] = true;
        bool better = ov > best_overlap ||
                      (ov == best_overlap && best_gold < gold.size() &&
                       gold[g].start < gold[best_gold].start);
        if (best_gold == gold.size() || better) {
          best_overlap = ov;
          best_gold = g;
        }
      }
    }

    bool correct = best_overlap > 0 && p.category == gold[best_gold].category;
    E2EBucket& bucket = (p.coarse == Coarse::INC) ? report.inclusion : report.exclusion;
    report.overall.pred_count++;
    bucket.pred_count++;
    if (best_overlap == 0) report.sink_predictions++;
    if (correct) {
      report.overall.correct_predictions++;
      bucket.correct_predictions++;
      recalled[best_gold] = true;
    }
  }

  for (std::size_t g = 0; g < gold.size(); ++g) {
    E2EBucket& bucket = (gold[g].coarse == Coarse::INC) ? report.inclusion : report.exclusion;
    report.overall.gold_count++;
    bucket.gold_count++;
    if (recalled[g]) {
      report.overall.recalled_gold++;
      bucket.recalled_gold++;
    }
    if (!touched[g]) report.undetected_gold++;
  }

  for (E2EBucket* b : {&report.overall, &report.inclusion, &report.exclusion}) {
    b->precision = b->pred_count
                       ? static_cast<double>(b->correct_predictions) / static_cast<double>(b->pred_count)
                       : 0.0;
    b->recall = b->gold_count
                    ? static_cast<double>(b->recalled_gold) / static_cast<double>(b->gold_count)
                    : 0.0;
    b->f1 = harmonic_f1(b->precision, b->recall);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Report serialization: TSV rows plus a JSON mirror of the fields.
// ---------------------------------------------------------------------------

namespace detail {
inline std::string fmt_metric(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}
}  // namespace detail

inline std::string overlap_report_tsv(const OverlapReport& report) {
  std::ostringstream out;
  out << "class\tmode\tprecision\trecall\tf1\tprecision_credit\trecall_credit\tpred_spans\tgold_spans\n";
  for (Coarse c : {Coarse::INC, Coarse::EXC}) {
    for (OverlapMode m : {OverlapMode::Binary, OverlapMode::Proportional}) {
      const OverlapEntry& e = report.at(c, m);
      out << coarse_name(c) << '\t' << overlap_mode_name(m) << '\t'
          << detail::fmt_metric(e.precision) << '\t' << detail::fmt_metric(e.recall) << '\t'
          << detail::fmt_metric(e.f1) << '\t' << detail::fmt_metric(e.precision_credit) << '\t'
          << detail::fmt_metric(e.recall_credit) << '\t' << e.pred_spans << '\t' << e.gold_spans
          << "\n";
    }
  }
  return out.str();
}

inline nlohmann::json overlap_report_json(const OverlapReport& report) {
  nlohmann::json j;
  for (Coarse c : {Coarse::INC, Coarse::EXC}) {
    for (OverlapMode m : {OverlapMode::Binary, OverlapMode::Proportional}) {
      const OverlapEntry& e = report.at(c, m);
      j[coarse_name(c)][overlap_mode_name(m)] = {
          {"precision", e.precision},       {"recall", e.recall},
          {"f1", e.f1},                     {"precision_credit", e.precision_credit},
          {"recall_credit", e.recall_credit}, {"pred_spans", e.pred_spans},
          {"gold_spans", e.gold_spans}};
    }
  }
  return j;
}

// 11x11 integer block, rows = gold category, columns = predicted category.
inline std::string confusion_tsv(const ClassReport& report) {
  std::ostringstream out;
  for (int g = 0; g < kNumCategories; ++g) {
    for (int p = 0; p < kNumCategories; ++p) {
      if (p) out << '\t';
      out << report.confusion[g][p];
    }
    out << "\n";
  }
  return out.str();
}

inline std::string class_report_tsv(const ClassReport& report) {
  std::ostringstream out;
  out << "category\tprecision\trecall\tf1\tsupport\n";
  for (int c = 0; c < kNumCategories; ++c) {
    const ClassScore& s = report.per_class[c];
    out << category_name(static_cast<Category>(c)) << '\t' << detail::fmt_metric(s.precision)
        << '\t' << detail::fmt_metric(s.recall) << '\t' << detail::fmt_metric(s.f1) << '\t'
        << s.support << "\n";
  }
  for (const auto& [name, s] :
       {std::pair<const char*, const ClassScore&>{"weighted", report.weighted},
        std::pair<const char*, const ClassScore&>{"macro", report.macro}}) {
    out << name << '\t' << detail::fmt_metric(s.precision) << '\t' << detail::fmt_metric(s.recall)
        << '\t' << detail::fmt_metric(s.f1) << '\t' << s.support << "\n";
  }
  out << "\n";
  out << confusion_tsv(report);
  return out.str();
}

inline nlohmann::json class_report_json(const ClassReport& report) {
  nlohmann::json j;
  auto score_json = [](const ClassScore& s) {
    return nlohmann::json{{"precision", s.precision},
                          {"recall", s.recall},
                          {"f1", s.f1},
                          {"support", s.support}};
  };
  for (int c = 0; c < kNumCategories; ++c)
    j["per_class"][category_name(static_cast<Category>(c))] = score_json(report.per_class[c]);
  j["weighted"] = score_json(report.weighted);
  j["macro"] = score_json(report.macro);
  j["total"] = report.total;
  for (int g = 0; g < kNumCategories; ++g)
    j["confusion"].push_back(report.confusion[g]);
  return j;
}

inline std::string e2e_report_tsv(const E2EReport& report) {
  std::ostringstream out;
  out << "bucket\tprecision\trecall\tf1\tcorrect\tpred\trecalled\tgold\n";
  for (const auto& [name, b] :
       {std::pair<const char*, const E2EBucket&>{"overall", report.overall},
        std::pair<const char*, const E2EBucket&>{"inclusion", report.inclusion},
        std::pair<const char*, const E2EBucket&>{"exclusion", report.exclusion}}) {
    out << name << '\t' << detail::fmt_metric(b.precision) << '\t'
        << detail::fmt_metric(b.recall) << '\t' << detail::fmt_metric(b.f1) << '\t'
        << b.correct_predictions << '\t' << b.pred_count << '\t' << b.recalled_gold << '\t'
        << b.gold_count << "\n";
  }
  out << "sink_predictions\t" << report.sink_predictions << "\n";
  out << "undetected_gold\t" << report.undetected_gold << "\n";
  return out.str();
}

inline nlohmann::json e2e_report_json(const E2EReport& report) {
  auto bucket_json = [](const E2EBucket& b) {
    return nlohmann::json{{"precision", b.precision},
                          {"recall", b.recall},
                          {"f1", b.f1},
                          {"correct_predictions", b.correct_predictions},
                          {"pred_count", b.pred_count},
                          {"recalled_gold", b.recalled_gold},
                          {"gold_count", b.gold_count}};
  };
  return nlohmann::json{{"overall", bucket_json(report.overall)},
                        {"inclusion", bucket_json(report.inclusion)},
                        {"exclusion", bucket_json(report.exclusion)},
                        {"sink_predictions", report.sink_predictions},
                        {"undetected_gold", report.undetected_gold}};
}

}  // namespace excmine
