// Copyright 2026 The Demograph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "demograph/common.hpp"
#include "demograph/io.hpp"

namespace demograph {

// Row-aligned concatenation of named feature blocks.
struct FeatureMatrix {
  struct Block {
    std::string name;
    Eigen::Index offset = 0;
    Eigen::Index width = 0;
    std::size_t dropped = 0;  // block rows that did not survive the join
  };

  std::vector<std::string> nodes;
  std::vector<std::string> columns;  // "<block>.<column>"
  std::vector<Block> blocks;
  Eigen::MatrixXd values;

  Eigen::Index width() const noexcept { return values.cols(); }
  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
};

// Inner join on node name. Rows follow `nodes` order; names absent from any
// block are dropped. Throws JoinError when nothing survives.
FeatureMatrix join_features(std::span<const FeatureBlock> blocks, std::span<const std::string> nodes);

// ---------------------------------------------------------------------------
// Train/test split
// ---------------------------------------------------------------------------

enum class SplitMode { random, hash };

SplitMode parse_split_mode(std::string_view name);

struct SplitSpec {
  SplitMode mode = SplitMode::hash;
  double train_fraction = 0.75;
  std::uint64_t rng_seed = 0;

  static SplitSpec hashed(double fraction = 0.75) { return {SplitMode::hash, fraction, 0}; }
  static SplitSpec random(std::uint64_t seed, double fraction = 0.70) { return {SplitMode::random, fraction, seed}; }
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// (fnv1a64(name) mod 10000) / 10000 < fraction.
bool hash_in_train(std::string_view name, double fraction) noexcept;

Split split(std::span<const std::string> names, const SplitSpec& spec);

// ---------------------------------------------------------------------------
// Classifiers
// ---------------------------------------------------------------------------

enum class OutputKind { sigmoid, softmax };

struct DenseLayer {
  Eigen::MatrixXd weights;  // fan_out x fan_in
  Eigen::VectorXd bias;
};

// Feed-forward network: ReLU hidden layers, then a sigmoid (binary, one
// logit) or softmax output. An optional affine input transform
// (x - input_mean) / input_scale is applied before the first layer.
struct ModelParams {
  std::vector<DenseLayer> layers;
  OutputKind output = OutputKind::softmax;
  Eigen::VectorXd input_mean;
  Eigen::VectorXd input_scale;

  Eigen::Index input_width() const;
  int classes() const;
  std::vector<int> hidden_sizes() const;

  // Zero weights for logistic/softmax regression; uniform +-1/sqrt(fan_in)
  // weights and zero biases when `rng` is given.
  static ModelParams create(Eigen::Index input_width, std::span<const int> hidden, int classes, Rng* rng);

  std::string to_json() const;
  static ModelParams from_json(const std::string& text);
};

// Fits input_mean/input_scale to the given rows (zero-variance columns keep
// scale 1).
void fit_standardizer(ModelParams& params, const Eigen::MatrixXd& x);

struct Hyper {
  double rate = 0.1;
  int epochs = 4;
  int minibatch = 3000;
  double l2 = 0.0;
  std::uint64_t rng_seed = 0;
  bool balance_classes = false;  // downsample to the rarest class
  bool standardize = false;
  int classes = 0;  // 0: infer as max label + 1
};

struct TrainResult {
  ModelParams params;
  std::vector<double> epoch_loss;  // mean training loss observed during each epoch
};

// Raw logits of the last layer after the input transform.
Eigen::MatrixXd forward(const ModelParams& params, const Eigen::Ref<const Eigen::MatrixXd>& x);

// Mean cross-entropy plus 0.5 * l2 * |W|^2 (weights only). Fills `grad`
// (same shapes as params.layers) when non-null.
double loss_and_gradient(const ModelParams& params, const Eigen::Ref<const Eigen::MatrixXd>& x,
                         std::span<const int> labels, double l2, std::vector<DenseLayer>* grad);

// One plain SGD step on the given batch; returns the loss before the step.
double sgd_step(ModelParams& params, const Eigen::Ref<const Eigen::MatrixXd>& x, std::span<const int> labels,
                double rate, double l2);

// Logistic regression (2 classes) or softmax regression (more classes).
TrainResult train_logistic(const Eigen::MatrixXd& x, std::span<const int> labels, const Hyper& hyper);
TrainResult train_mlp(const Eigen::MatrixXd& x, std::span<const int> labels, std::span<const int> hidden,
                      const Hyper& hyper);

inline TrainResult train_logistic(const FeatureMatrix& f, std::span<const int> labels, const Hyper& hyper) {
  return train_logistic(f.values, labels, hyper);
}
inline TrainResult train_mlp(const FeatureMatrix& f, std::span<const int> labels, std::span<const int> hidden,
                             const Hyper& hyper) {
  return train_mlp(f.values, labels, hidden, hyper);
}

// Per-row class probabilities (n x classes; sigmoid models give 2 columns).
Eigen::MatrixXd predict(const ModelParams& params, const Eigen::MatrixXd& x);
inline Eigen::MatrixXd predict(const ModelParams& params, const FeatureMatrix& f) {
  return predict(params, f.values);
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

struct Metrics {
  std::optional<double> auc;
  double accuracy = 0.0;
  double cross_entropy = 0.0;
  std::size_t rows = 0;
};

// Rank-statistic AUC with average ranks for ties. truth holds 0/1.
// Throws UndefinedMetricError unless both classes are present.
double auc(std::span<const double> scores, std::span<const int> truth);

// AUC (binary only, when defined), argmax accuracy and mean cross-entropy
// with probabilities clamped at 1e-12.
Metrics evaluate(const Eigen::MatrixXd& probabilities, std::span<const int> truth);

}  // namespace demograph
