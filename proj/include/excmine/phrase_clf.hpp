#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "excmine/types.hpp"
#include "excmine/util.hpp"

namespace excmine {

struct ClfConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 200;
  double l2_lambda = 1e-3;
  std::size_t batch_size = 0;  // 0 = full batch
  std::uint64_t seed = 1;

  void validate() const {
    if (learning_rate <= 0.0) throw Error("learning_rate must be positive");
    if (epochs == 0) throw Error("epochs must be at least 1");
    if (l2_lambda < 0.0) throw Error("l2_lambda must be non-negative");
  }
};

// Multinomial logistic regression over the eleven categories, class-major
// weight layout.
struct SoftmaxModel {
  std::size_t width = 0;
  std::vector<double> weights;  // kNumCategories * width
  std::array<double, kNumCategories> bias{};

  SoftmaxModel() = default;
  explicit SoftmaxModel(std::size_t feature_width)
      : width(feature_width),
        weights(static_cast<std::size_t>(kNumCategories) * feature_width, 0.0) {}

  std::array<double, kNumCategories> logits(std::span<const double> x) const {
    if (x.size() != width)
      throw WidthMismatch("feature width " + std::to_string(x.size()) +
                          " != model width " + std::to_string(width));
    std::array<double, kNumCategories> z{};
    for (int k = 0; k < kNumCategories; ++k) {
      const double* w = weights.data() + static_cast<std::size_t>(k) * width;
      double s = bias[k];
      for (std::size_t j = 0; j < width; ++j) s += w[j] * x[j];
      z[k] = s;
    }
    return z;
  }
};

inline std::array<double, kNumCategories> softmax(std::array<double, kNumCategories> z) {
  double m = z[0];
  for (double v : z) m = std::max(m, v);
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : z) v /= sum;
  return z;
}

// Probabilities sum to 1; argmax ties resolve to the lower canonical index.
inline std::pair<Category, std::array<double, kNumCategories>> predict(
    const SoftmaxModel& model, std::span<const double> x) {
  auto probs = softmax(model.logits(x));
  int best = 0;
  for (int k = 1; k < kNumCategories; ++k)
    if (probs[k] > probs[best]) best = k;
  return {static_cast<Category>(best), probs};
}

struct SoftmaxGradient {
  std::vector<double> weights;
  std::array<double, kNumCategories> bias{};

  explicit SoftmaxGradient(std::size_t width)
      : weights(static_cast<std::size_t>(kNumCategories) * width, 0.0) {}
};

// Mean cross-entropy over the batch plus (l2/2)*||W||^2; biases are not
// regularized. Gradient is exact.
inline std::pair<double, SoftmaxGradient> softmax_loss_and_gradient(
    const SoftmaxModel& model, std::span<const std::vector<double>> xs,
    std::span<const Category> ys, double l2_lambda) {
  if (xs.size() != ys.size())
    throw LengthMismatch("feature/label count mismatch: " + std::to_string(xs.size()) +
                         " vs " + std::to_string(ys.size()));
  if (xs.empty()) throw EmptyInput("empty batch");

  SoftmaxGradient grad(model.width);
  double loss = 0.0;
  double inv_n = 1.0 / static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    auto probs = softmax(model.logits(xs[i]));
    int y = static_cast<int>(ys[i]);
    loss -= std::log(std::max(probs[y], 1e-300));
    for (int k = 0; k < kNumCategories; ++k) {
      double delta = (probs[k] - (k == y ? 1.0 : 0.0)) * inv_n;
      grad.bias[k] += delta;
      double* row = grad.weights.data() + static_cast<std::size_t>(k) * model.width;
      for (std::size_t j = 0; j < model.width; ++j) row[j] += delta * xs[i][j];
    }
  }
  loss *= inv_n;

  if (l2_lambda > 0.0) {
    double sq = 0.0;
    for (std::size_t i = 0; i < model.weights.size(); ++i) {
      sq += model.weights[i] * model.weights[i];
      grad.weights[i] += l2_lambda * model.weights[i];
    }
    loss += 0.5 * l2_lambda * sq;
  }
  return {loss, std::move(grad)};
}

struct ClfTrainResult {
  SoftmaxModel model;
  std::vector<double> loss_history;  // objective per epoch, before that epoch's update
};

// Plain gradient descent from zero weights; full batch unless batch_size is
// set. Deterministic under the seed (only the minibatch shuffle draws).
inline ClfTrainResult train_softmax(const ClfConfig& config,
                                    std::span<const std::vector<double>> xs,
                                    std::span<const Category> ys) {
  config.validate();
  if (xs.empty()) throw EmptyInput("training set is empty");
  if (xs.size() != ys.size())
    throw LengthMismatch("feature/label count mismatch: " + std::to_string(xs.size()) +
                         " vs " + std::to_string(ys.size()));
  std::size_t width = xs[0].size();
  for (const auto& x : xs)
    if (x.size() != width) throw WidthMismatch("inconsistent feature widths in training set");

  ClfTrainResult result;
  result.model = SoftmaxModel(width);
  SoftmaxModel& model = result.model;

  std::size_t batch = (config.batch_size == 0) ? xs.size() : config.batch_size;
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<std::vector<double>> bx;
  std::vector<Category> by;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (batch < xs.size()) deterministic_shuffle(order, rng);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t off = 0; off < order.size(); off += batch) {
      std::size_t take = std::min(batch, order.size() - off);
      bx.clear();
      by.clear();
      for (std::size_t k = 0; k < take; ++k) {
        bx.push_back(xs[order[off + k]]);
        by.push_back(ys[order[off + k]]);
      }
      auto [loss, grad] = softmax_loss_and_gradient(model, bx, by, config.l2_lambda);
      epoch_loss += loss;
      ++batches;
      for (std::size_t i = 0; i < model.weights.size(); ++i)
        model.weights[i] -= config.learning_rate * grad.weights[i];
      for (int k = 0; k < kNumCategories; ++k)
        model.bias[k] -= config.learning_rate * grad.bias[k];
    }
    result.loss_history.push_back(epoch_loss / static_cast<double>(batches));
  }
  return result;
}

}  // namespace excmine
