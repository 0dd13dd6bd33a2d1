#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "excmine/bio.hpp"
#include "excmine/eval.hpp"
#include "excmine/features.hpp"
#include "excmine/types.hpp"
#include "excmine/util.hpp"

namespace excmine {

struct TrainConfig {
  double learning_rate = 1e-5;
  double momentum = 0.7;
  std::size_t batch_size = 8;
  std::size_t epochs = 50;
  double l2_lambda = 1e-4;
  std::uint64_t seed = 1;

  void validate() const {
    if (learning_rate <= 0.0) throw Error("learning_rate must be positive");
    if (momentum < 0.0 || momentum >= 1.0) throw Error("momentum must be in [0, 1)");
    if (batch_size == 0) throw Error("batch_size must be positive");
    if (epochs == 0) throw Error("epochs must be at least 1");
    if (l2_lambda < 0.0) throw Error("l2_lambda must be non-negative");
  }
};

// Linear-chain model over the five BIO tags. Emission weights live in one
// row per tag over the template's dense+sparse feature width. Transitions
// into an inside tag from anything but a same-class begin/inside tag are
// structurally forbidden: they score -inf and their weights never move.
struct CrfModel {
  FeatureTemplate tmpl;
  std::vector<double> emission;  // kNumTags rows * width()
  std::array<std::array<double, kNumTags>, kNumTags> transition{};
  std::array<double, kNumTags> start{};

  CrfModel() = default;
  explicit CrfModel(FeatureTemplate t) : tmpl(std::move(t)) {
    emission.assign(static_cast<std::size_t>(kNumTags) * tmpl.total_width(), 0.0);
  }

  std::size_t width() const { return tmpl.total_width(); }

  double emission_score(int tag, const FeatureVector& fv) const {
    const double* w = emission.data() + static_cast<std::size_t>(tag) * width();
    double s = 0.0;
    for (std::size_t j = 0; j < fv.dense.size(); ++j) s += w[j] * fv.dense[j];
    const double* ws = w + tmpl.dense_width();
    for (int id : fv.sparse) s += ws[id];
    return s;
  }

  double transition_score(int prev, int next) const {
    if (!transition_allowed(static_cast<BioTag>(prev), static_cast<BioTag>(next)))
      return kNegInf;
    return transition[prev][next];
  }

  double start_score(int tag) const {
    if (!start_allowed(static_cast<BioTag>(tag))) return kNegInf;
    return start[tag];
  }
};

struct Lattice {
  const CrfModel* model = nullptr;
  std::size_t len = 0;
  std::vector<std::array<double, kNumTags>> emission;  // [t][tag]
};

inline Lattice build_lattice(const CrfModel& model, std::span<const FeatureVector> features) {
  if (features.empty()) throw EmptyInput("cannot build a lattice for an empty sentence");
  for (const FeatureVector& fv : features)
    if (fv.dense.size() != model.tmpl.dense_width())
      throw WidthMismatch("feature vector dense width " + std::to_string(fv.dense.size()) +
                          " does not match the model template");
  Lattice lat;
  lat.model = &model;
  lat.len = features.size();
  lat.emission.resize(lat.len);
  for (std::size_t t = 0; t < lat.len; ++t)
    for (int y = 0; y < kNumTags; ++y) lat.emission[t][y] = model.emission_score(y, features[t]);
  for (int y = 0; y < kNumTags; ++y)
    if (!start_allowed(static_cast<BioTag>(y))) lat.emission[0][y] = kNegInf;
  return lat;
}

inline std::vector<FeatureVector> featurize_sentence(const FeatureTemplate& tmpl,
                                                     const EmbeddingTable& table,
                                                     const Sentence& sentence) {
  std::vector<FeatureVector> out;
  out.reserve(sentence.tokens.size());
  for (std::size_t t = 0; t < sentence.tokens.size(); ++t)
    out.push_back(token_features(tmpl, table, sentence, t));
  return out;
}

inline Lattice build_lattice(const CrfModel& model, const EmbeddingTable& table,
                             const Sentence& sentence) {
  auto features = featurize_sentence(model.tmpl, table, sentence);
  return build_lattice(model, features);
}

namespace detail {

inline std::vector<std::array<double, kNumTags>> forward_alpha(const Lattice& lat) {
  const CrfModel& m = *lat.model;
  std::vector<std::array<double, kNumTags>> alpha(lat.len);
  // masked starts: -inf start score plus -inf emission stays -inf
  for (int y = 0; y < kNumTags; ++y) alpha[0][y] = m.start_score(y) + lat.emission[0][y];
  for (std::size_t t = 1; t < lat.len; ++t) {
    for (int y = 0; y < kNumTags; ++y) {
      std::array<double, kNumTags> terms;
      int n = 0;
      for (int p = 0; p < kNumTags; ++p) {
        double ts = m.transition_score(p, y);
        if (ts == kNegInf || alpha[t - 1][p] == kNegInf) continue;
        terms[n++] = alpha[t - 1][p] + ts;
      }
      double inflow = log_sum_exp(std::span<const double>(terms.data(), static_cast<std::size_t>(n)));
      alpha[t][y] = (inflow == kNegInf) ? kNegInf : inflow + lat.emission[t][y];
    }
  }
  return alpha;
}

inline std::vector<std::array<double, kNumTags>> backward_beta(const Lattice& lat) {
  const CrfModel& m = *lat.model;
  std::vector<std::array<double, kNumTags>> beta(lat.len);
  for (int y = 0; y < kNumTags; ++y) beta[lat.len - 1][y] = 0.0;
  for (std::size_t t = lat.len - 1; t-- > 0;) {
    for (int y = 0; y < kNumTags; ++y) {
      std::array<double, kNumTags> terms;
      int n = 0;
      for (int q = 0; q < kNumTags; ++q) {
        double ts = m.transition_score(y, q);
        if (ts == kNegInf || beta[t + 1][q] == kNegInf || lat.emission[t + 1][q] == kNegInf)
          continue;
        terms[n++] = ts + lat.emission[t + 1][q] + beta[t + 1][q];
      }
      beta[t][y] = log_sum_exp(std::span<const double>(terms.data(), static_cast<std::size_t>(n)));
    }
  }
  return beta;
}

}  // namespace detail

// Log partition function over all constraint-valid tag sequences.
inline double forward_logz(const Lattice& lat) {
  auto alpha = detail::forward_alpha(lat);
  return log_sum_exp(std::span<const double>(alpha[lat.len - 1].data(), kNumTags));
}

struct Marginals {
  std::vector<std::array<double, kNumTags>> node;                       // [t][tag]
  std::vector<std::array<std::array<double, kNumTags>, kNumTags>> edge; // [t][prev][next]
  double log_z = 0.0;
};

inline Marginals marginals(const Lattice& lat) {
  const CrfModel& m = *lat.model;
  auto alpha = detail::forward_alpha(lat);
  auto beta = detail::backward_beta(lat);

  Marginals out;
  out.log_z = log_sum_exp(std::span<const double>(alpha[lat.len - 1].data(), kNumTags));
  out.node.resize(lat.len);
  for (std::size_t t = 0; t < lat.len; ++t)
    for (int y = 0; y < kNumTags; ++y) {
      double lp = alpha[t][y] + beta[t][y];
      out.node[t][y] = (lp == kNegInf) ? 0.0 : std::exp(lp - out.log_z);
    }

  if (lat.len > 1) out.edge.resize(lat.len - 1);
  for (std::size_t t = 0; t + 1 < lat.len; ++t) {
    for (int y = 0; y < kNumTags; ++y) {
      for (int q = 0; q < kNumTags; ++q) {
        double ts = m.transition_score(y, q);
        if (ts == kNegInf || alpha[t][y] == kNegInf) {
          out.edge[t][y][q] = 0.0;
          continue;
        }
        double lp = alpha[t][y] + ts + lat.emission[t + 1][q] + beta[t + 1][q];
        out.edge[t][y][q] = (lp == kNegInf) ? 0.0 : std::exp(lp - out.log_z);
      }
    }
  }
  return out;
}

// Highest-scoring valid sequence. Ties resolve to the lower canonical tag
// index, decided from the last position backwards, so the result is unique
// for any score configuration. The output is always well-formed BIO.
inline std::pair<std::vector<BioTag>, double> viterbi(const Lattice& lat) {
  const CrfModel& m = *lat.model;
  std::vector<std::array<double, kNumTags>> delta(lat.len);
  std::vector<std::array<int, kNumTags>> back(lat.len);
  for (int y = 0; y < kNumTags; ++y) {
    delta[0][y] = m.start_score(y) + lat.emission[0][y];
    back[0][y] = -1;
  }
  for (std::size_t t = 1; t < lat.len; ++t) {
    for (int y = 0; y < kNumTags; ++y) {
      double best = kNegInf;
      int best_prev = -1;
      for (int p = 0; p < kNumTags; ++p) {
        double ts = m.transition_score(p, y);
        if (ts == kNegInf || delta[t - 1][p] == kNegInf) continue;
        double cand = delta[t - 1][p] + ts;
        if (cand > best) {
          best = cand;
          best_prev = p;
        }
      }
      delta[t][y] = (best_prev < 0) ? kNegInf : best + lat.emission[t][y];
      back[t][y] = best_prev;
    }
  }

  int y = 0;
  double best = delta[lat.len - 1][0];
  for (int c = 1; c < kNumTags; ++c)
    if (delta[lat.len - 1][c] > best) {
      best = delta[lat.len - 1][c];
      y = c;
    }

  std::vector<BioTag> tags(lat.len);
  for (std::size_t t = lat.len; t-- > 0;) {
    tags[t] = static_cast<BioTag>(y);
    y = back[t][y];
  }
  return {std::move(tags), best};
}

// ---------------------------------------------------------------------------
// Training.
// ---------------------------------------------------------------------------

struct CrfExample {
  std::vector<FeatureVector> features;
  std::vector<BioTag> gold;
};

struct CrfGradient {
  std::vector<double> emission;
  std::array<std::array<double, kNumTags>, kNumTags> transition{};
  std::array<double, kNumTags> start{};

  explicit CrfGradient(std::size_t width)
      : emission(static_cast<std::size_t>(kNumTags) * width, 0.0) {}
};

inline void check_gold_valid(std::span<const BioTag> gold) {
  if (gold.empty()) throw InvalidGold("gold tag sequence is empty");
  if (!start_allowed(gold[0]))
    throw InvalidGold("gold sequence starts with an inside tag");
  for (std::size_t t = 1; t < gold.size(); ++t)
    if (!transition_allowed(gold[t - 1], gold[t]))
      throw InvalidGold("gold sequence violates the tag constraints at position " +
                        std::to_string(t));
}

inline double gold_path_score(const Lattice& lat, std::span<const BioTag> gold) {
  const CrfModel& m = *lat.model;
  double s = m.start[static_cast<int>(gold[0])] + lat.emission[0][static_cast<int>(gold[0])];
  for (std::size_t t = 1; t < lat.len; ++t)
    s += m.transition[static_cast<int>(gold[t - 1])][static_cast<int>(gold[t])] +
         lat.emission[t][static_cast<int>(gold[t])];
  return s;
}

// Sequence negative log-likelihood summed over the batch plus an L2 term,
// with its exact gradient: expected feature counts under the model minus
// empirical counts, plus l2_lambda * weights. Forbidden transition and
// start entries receive no gradient.
inline std::pair<double, CrfGradient> nll_and_gradient(const CrfModel& model,
                                                       std::span<const CrfExample* const> batch,
                                                       double l2_lambda) {
  const std::size_t width = model.width();
  const std::size_t dense_w = model.tmpl.dense_width();
  CrfGradient grad(width);
  double loss = 0.0;

  for (const CrfExample* ex_ptr : batch) {
    const CrfExample& ex = *ex_ptr;
    if (ex.features.size() != ex.gold.size())
      throw LengthMismatch("feature/gold length mismatch in training example");
    check_gold_valid(ex.gold);
    Lattice lat = build_lattice(model, ex.features);
    Marginals marg = marginals(lat);
    loss += marg.log_z - gold_path_score(lat, ex.gold);

    for (std::size_t t = 0; t < lat.len; ++t) {
      const FeatureVector& fv = ex.features[t];
      for (int y = 0; y < kNumTags; ++y) {
        double p = marg.node[t][y];
        if (p == 0.0) continue;
        double* row = grad.emission.data() + static_cast<std::size_t>(y) * width;
        for (std::size_t j = 0; j < fv.dense.size(); ++j) row[j] += p * fv.dense[j];
        for (int id : fv.sparse) row[dense_w + static_cast<std::size_t>(id)] += p;
      }
      int g = static_cast<int>(ex.gold[t]);
      double* row = grad.emission.data() + static_cast<std::size_t>(g) * width;
      for (std::size_t j = 0; j < fv.dense.size(); ++j) row[j] -= fv.dense[j];
      for (int id : fv.sparse) row[dense_w + static_cast<std::size_t>(id)] -= 1.0;
    }

    for (std::size_t t = 0; t + 1 < lat.len; ++t)
      for (int y = 0; y < kNumTags; ++y)
        for (int q = 0; q < kNumTags; ++q) grad.transition[y][q] += marg.edge[t][y][q];
    for (std::size_t t = 1; t < lat.len; ++t)
      grad.transition[static_cast<int>(ex.gold[t - 1])][static_cast<int>(ex.gold[t])] -= 1.0;

    for (int y = 0; y < kNumTags; ++y) grad.start[y] += marg.node[0][y];
    grad.start[static_cast<int>(ex.gold[0])] -= 1.0;
  }

  if (l2_lambda > 0.0) {
    double sq = 0.0;
    for (std::size_t i = 0; i < model.emission.size(); ++i) {
      sq += model.emission[i] * model.emission[i];
      grad.emission[i] += l2_lambda * model.emission[i];
    }
    for (int y = 0; y < kNumTags; ++y) {
      for (int q = 0; q < kNumTags; ++q) {
        if (!transition_allowed(static_cast<BioTag>(y), static_cast<BioTag>(q))) continue;
        sq += model.transition[y][q] * model.transition[y][q];
        grad.transition[y][q] += l2_lambda * model.transition[y][q];
      }
      if (start_allowed(static_cast<BioTag>(y))) {
        sq += model.start[y] * model.start[y];
        grad.start[y] += l2_lambda * model.start[y];
      }
    }
    loss += 0.5 * l2_lambda * sq;
  }
  return {loss, std::move(grad)};
}

inline std::pair<double, CrfGradient> nll_and_gradient(const CrfModel& model,
                                                       std::span<const CrfExample> batch,
                                                       double l2_lambda) {
  std::vector<const CrfExample*> ptrs;
  ptrs.reserve(batch.size());
  for (const CrfExample& ex : batch) ptrs.push_back(&ex);
  return nll_and_gradient(model, std::span<const CrfExample* const>(ptrs), l2_lambda);
}

struct EpochStats {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double dev_f1 = 0.0;
};

struct CrfTrainResult {
  CrfModel model;
  std::vector<EpochStats> history;
};

namespace detail {

// Mean of the INC and EXC binary-overlap F1 on predicted vs gold tags.
inline double dev_binary_f1(const CrfModel& model,
                            std::span<const std::vector<FeatureVector>> dev_features,
                            std::span<const std::vector<BioTag>> dev_gold) {
  std::vector<Phrase> pred, gold;
  for (std::size_t i = 0; i < dev_features.size(); ++i) {
    std::string sid = std::to_string(i);
    Lattice lat = build_lattice(model, dev_features[i]);
    auto [tags, score] = viterbi(lat);
    for (Phrase& p : extract_phrases(sid, tags)) pred.push_back(std::move(p));
    for (Phrase& p : extract_phrases(sid, dev_gold[i])) gold.push_back(std::move(p));
  }
  OverlapReport report = overlap_scores(pred, gold);
  return 0.5 * (report.at(Coarse::INC, OverlapMode::Binary).f1 +
                report.at(Coarse::EXC, OverlapMode::Binary).f1);
}

}  // namespace detail

// Minibatch SGD with classical momentum. Deterministic under a fixed seed:
// zero-initialized weights, seeded epoch shuffles, no other randomness.
// Returns the snapshot with the best dev binary-overlap F1 (ties go to the
// later epoch; with an empty dev set that is simply the final model).
inline CrfTrainResult train_crf(const TrainConfig& config, std::span<const Sentence> train,
                                std::span<const Sentence> dev, const FeatureTemplate& tmpl,
                                const EmbeddingTable& table) {
  config.validate();
  if (train.empty()) throw EmptyTrainSet("training set is empty");
  if (!tmpl.frozen) throw Error("feature template must be frozen before training");
  if (tmpl.embedding_dim != table.dim)
    throw WidthMismatch("template dim " + std::to_string(tmpl.embedding_dim) +
                        " != embedding dim " + std::to_string(table.dim));

  std::vector<CrfExample> examples;
  examples.reserve(train.size());
  for (const Sentence& s : train) {
    if (!s.tags) throw MissingTags("training sentence '" + s.id + "' has no tags");
    CrfExample ex;
    ex.features = featurize_sentence(tmpl, table, s);
    ex.gold = *s.tags;
    check_gold_valid(ex.gold);
    examples.push_back(std::move(ex));
  }

  std::vector<std::vector<FeatureVector>> dev_features;
  std::vector<std::vector<BioTag>> dev_gold;
  for (const Sentence& s : dev) {
    if (!s.tags) throw MissingTags("dev sentence '" + s.id + "' has no tags");
    check_gold_valid(*s.tags);
    dev_features.push_back(featurize_sentence(tmpl, table, s));
    dev_gold.push_back(*s.tags);
  }

  CrfModel model(tmpl);
  std::vector<double> v_emission(model.emission.size(), 0.0);
  std::array<std::array<double, kNumTags>, kNumTags> v_transition{};
  std::array<double, kNumTags> v_start{};

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  CrfTrainResult result;
  CrfModel best = model;
  double best_f1 = -1.0;

  std::vector<const CrfExample*> batch;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    deterministic_shuffle(order, rng);
    double epoch_loss = 0.0;
    for (std::size_t off = 0; off < order.size(); off += config.batch_size) {
      std::size_t take = std::min(config.batch_size, order.size() - off);
      batch.clear();
      for (std::size_t k = 0; k < take; ++k) batch.push_back(&examples[order[off + k]]);
      auto [loss, grad] =
          nll_and_gradient(model, std::span<const CrfExample* const>(batch), config.l2_lambda);
      epoch_loss += loss;

      for (std::size_t i = 0; i < model.emission.size(); ++i) {
        v_emission[i] = config.momentum * v_emission[i] + grad.emission[i];
        model.emission[i] -= config.learning_rate * v_emission[i];
      }
      for (int y = 0; y < kNumTags; ++y) {
        for (int q = 0; q < kNumTags; ++q) {
          if (!transition_allowed(static_cast<BioTag>(y), static_cast<BioTag>(q))) continue;
          v_transition[y][q] = config.momentum * v_transition[y][q] + grad.transition[y][q];
          model.transition[y][q] -= config.learning_rate * v_transition[y][q];
        }
        if (start_allowed(static_cast<BioTag>(y))) {
          v_start[y] = config.momentum * v_start[y] + grad.start[y];
          model.start[y] -= config.learning_rate * v_start[y];
        }
      }
    }

    double dev_f1 = dev_features.empty()
                        ? 0.0
                        : detail::dev_binary_f1(model, dev_features, dev_gold);
    result.history.push_back(EpochStats{epoch, epoch_loss, dev_f1});
    if (dev_f1 >= best_f1) {
      best_f1 = dev_f1;
      best = model;
    }
  }

  result.model = std::move(best);
  return result;
}

inline std::vector<std::vector<BioTag>> tag(const CrfModel& model, const EmbeddingTable& table,
                                            std::span<const Sentence> sentences) {
  std::vector<std::vector<BioTag>> out;
  out.reserve(sentences.size());
  for (const Sentence& s : sentences) {
    Lattice lat = build_lattice(model, table, s);
    out.push_back(viterbi(lat).first);
  }
  return out;
}

}  // namespace excmine
