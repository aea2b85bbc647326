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

#include "demograph/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <json.hpp>

namespace demograph {

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  FeatureMatrix out;
  out.columns = columns;
  out.blocks = blocks;
  out.values.resize(Eigen::Index(rows.size()), values.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.nodes.push_back(nodes.at(rows[i]));
    out.values.row(Eigen::Index(i)) = values.row(Eigen::Index(rows[i]));
  }
  return out;
}

FeatureMatrix join_features(std::span<const FeatureBlock> blocks, std::span<const std::string> nodes) {
  if (blocks.empty()) throw JoinError("no feature blocks to join");
  std::vector<std::unordered_map<std::string_view, Eigen::Index>> index(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (Eigen::Index(blocks[b].nodes.size()) != blocks[b].values.rows() ||
        Eigen::Index(blocks[b].columns.size()) != blocks[b].values.cols()) {
      throw ShapeError("feature block '" + blocks[b].name + "' is inconsistent");
    }
    for (std::size_t r = 0; r < blocks[b].nodes.size(); ++r) {
      index[b].try_emplace(blocks[b].nodes[r], Eigen::Index(r));
    }
  }
  std::span<const std::string> order = nodes.empty() ? std::span<const std::string>(blocks[0].nodes) : nodes;

  FeatureMatrix out;
  Eigen::Index width = 0;
  for (const auto& block : blocks) {
    out.blocks.push_back({block.name, width, block.values.cols(), 0});
    for (const auto& c : block.columns) out.columns.push_back(block.name + "." + c);
    width += block.values.cols();
  }

  std::vector<std::vector<Eigen::Index>> picked;
  for (const auto& name : order) {
    std::vector<Eigen::Index> rows;
    for (const auto& idx : index) {
      auto it = idx.find(name);
      if (it == idx.end()) break;
      rows.push_back(it->second);
    }
    if (rows.size() != blocks.size()) continue;
    out.nodes.push_back(name);
    picked.push_back(std::move(rows));
  }
  if (out.nodes.empty()) throw JoinError("feature blocks share no nodes");

  out.values.resize(Eigen::Index(out.nodes.size()), width);
  for (std::size_t r = 0; r < picked.size(); ++r) {
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      out.values.block(Eigen::Index(r), out.blocks[b].offset, 1, out.blocks[b].width) =
          blocks[b].values.row(picked[r][b]);
    }
  }
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    out.blocks[b].dropped = index[b].size() - out.nodes.size();
  }
  return out;
}

SplitMode parse_split_mode(std::string_view name) {
  if (name == "hash") return SplitMode::hash;
  if (name == "random") return SplitMode::random;
  throw ConfigError("unknown split mode '" + std::string(name) + "' (expected hash|random)");
}

bool hash_in_train(std::string_view name, double fraction) noexcept {
  return double(fnv1a64(name) % 10000) / 10000.0 < fraction;
}

Split split(std::span<const std::string> names, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie in (0, 1)");
  }
  Split out;
  if (spec.mode == SplitMode::hash) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      (hash_in_train(names[i], spec.train_fraction) ? out.train : out.test).push_back(i);
    }
    return out;
  }
  std::vector<std::size_t> order(names.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(spec.rng_seed);
  rng.shuffle(order);
  const auto cut = std::size_t(std::llround(spec.train_fraction * double(names.size())));
  out.train.assign(order.begin(), order.begin() + std::ptrdiff_t(cut));
  out.test.assign(order.begin() + std::ptrdiff_t(cut), order.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

// ---------------------------------------------------------------------------

Eigen::Index ModelParams::input_width() const {
  return layers.empty() ? 0 : layers.front().weights.cols();
}

int ModelParams::classes() const {
  if (layers.empty()) return 0;
  return output == OutputKind::sigmoid ? 2 : int(layers.back().weights.rows());
}

std::vector<int> ModelParams::hidden_sizes() const {
  std::vector<int> out;
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) out.push_back(int(layers[l].weights.rows()));
  return out;
}

ModelParams ModelParams::create(Eigen::Index input_width, std::span<const int> hidden, int classes, Rng* rng) {
  if (input_width < 1) throw ShapeError("model input width must be >= 1");
  if (classes < 2) throw ValidationError("a classifier needs at least 2 classes");
  ModelParams params;
  params.output = (hidden.empty() && classes == 2) ? OutputKind::sigmoid : OutputKind::softmax;
  std::vector<Eigen::Index> sizes{input_width};
  for (int h : hidden) {
    if (h < 1) throw ConfigError("hidden layer sizes must be >= 1");
    sizes.push_back(h);
  }
  sizes.push_back(params.output == OutputKind::sigmoid ? 1 : classes);

  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    DenseLayer layer{Eigen::MatrixXd::Zero(sizes[l + 1], sizes[l]), Eigen::VectorXd::Zero(sizes[l + 1])};
    if (rng) {
      const double bound = 1.0 / std::sqrt(double(sizes[l]));
      for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
        for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
          layer.weights(r, c) = (2.0 * rng->uniform() - 1.0) * bound;
        }
      }
    }
    params.layers.push_back(std::move(layer));
  }
  return params;
}

std::string ModelParams::to_json() const {
  using nlohmann::ordered_json;
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  ordered_json j;
  j["output"] = output == OutputKind::sigmoid ? "sigmoid" : "softmax";
  j["input_mean"] = vec(input_mean);
  j["input_scale"] = vec(input_scale);
  j["layers"] = ordered_json::array();
  for (const auto& layer : layers) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) rows.push_back(vec(layer.weights.row(r).transpose()));
    j["layers"].push_back({{"weights", rows}, {"bias", vec(layer.bias)}});
  }
  return j.dump();
}

ModelParams ModelParams::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model file: ") + e.what());
  }
  auto vec = [](const nlohmann::json& a) {
    auto v = a.get<std::vector<double>>();
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), Eigen::Index(v.size())));
  };
  ModelParams p;
  try {
    p.output = j.at("output").get<std::string>() == "sigmoid" ? OutputKind::sigmoid : OutputKind::softmax;
    p.input_mean = vec(j.at("input_mean"));
    p.input_scale = vec(j.at("input_scale"));
    for (const auto& layer : j.at("layers")) {
      const auto& rows = layer.at("weights");
      DenseLayer d;
      d.bias = vec(layer.at("bias"));
      d.weights.resize(Eigen::Index(rows.size()), rows.empty() ? 0 : Eigen::Index(rows[0].size()));
      for (std::size_t r = 0; r < rows.size(); ++r) d.weights.row(Eigen::Index(r)) = vec(rows[r]).transpose();
      p.layers.push_back(std::move(d));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model file: ") + e.what());
  }
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    if (p.layers[l].bias.size() != p.layers[l].weights.rows() ||
        (l > 0 && p.layers[l].weights.cols() != p.layers[l - 1].weights.rows())) {
      throw ShapeError("model file: layer shapes do not chain");
    }
  }
  return p;
}

void fit_standardizer(ModelParams& params, const Eigen::MatrixXd& x) {
  const double n = double(std::max<Eigen::Index>(x.rows(), 1));
  params.input_mean = x.colwise().sum().transpose() / n;
  Eigen::VectorXd var = (x.rowwise() - params.input_mean.transpose()).array().square().colwise().sum().transpose() / n;
  params.input_scale = var.array().sqrt();
  for (Eigen::Index c = 0; c < params.input_scale.size(); ++c) {
    if (!(params.input_scale(c) > 1e-12)) params.input_scale(c) = 1.0;
  }
}

namespace {

Eigen::MatrixXd transform_input(const ModelParams& params, const Eigen::Ref<const Eigen::MatrixXd>& x) {
  if (x.cols() != params.input_width()) {
    throw ShapeError("feature width " + std::to_string(x.cols()) + " does not match model input width " +
                     std::to_string(params.input_width()));
  }
  if (params.input_mean.size() == 0) return x;
  return (x.rowwise() - params.input_mean.transpose()).array().rowwise() / params.input_scale.transpose().array();
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

Eigen::MatrixXd row_softmax(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p = (logits.colwise() - logits.rowwise().maxCoeff()).array().exp();
  p.array().colwise() /= p.rowwise().sum().array();
  return p;
}

void check_labels(std::span<const int> labels, Eigen::Index rows, int classes) {
  if (Eigen::Index(labels.size()) != rows) throw ShapeError("label count does not match feature rows");
  for (int y : labels) {
    if (y < 0 || y >= classes) throw ValidationError("label " + std::to_string(y) + " outside [0, classes)");
  }
}

}  // namespace

Eigen::MatrixXd forward(const ModelParams& params, const Eigen::Ref<const Eigen::MatrixXd>& x) {
  Eigen::MatrixXd a = transform_input(params, x);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    Eigen::MatrixXd z = (a * layer.weights.transpose()).rowwise() + layer.bias.transpose();
    a = (l + 1 < params.layers.size()) ? Eigen::MatrixXd(z.cwiseMax(0.0)) : std::move(z);
  }
  return a;
}

double loss_and_gradient(const ModelParams& params, const Eigen::Ref<const Eigen::MatrixXd>& x,
                         std::span<const int> labels, double l2, std::vector<DenseLayer>* grad) {
  const std::size_t depth = params.layers.size();
  check_labels(labels, x.rows(), params.classes());
  const double n = double(x.rows());

  // activations[l] is the input to layer l; pre[l] its pre-activation.
  std::vector<Eigen::MatrixXd> activations{transform_input(params, x)};
  std::vector<Eigen::MatrixXd> pre;
  for (std::size_t l = 0; l < depth; ++l) {
    const auto& layer = params.layers[l];
    pre.push_back((activations.back() * layer.weights.transpose()).rowwise() + layer.bias.transpose());
    if (l + 1 < depth) activations.push_back(pre.back().cwiseMax(0.0));
  }

  const Eigen::MatrixXd& logits = pre.back();
  Eigen::MatrixXd delta(logits.rows(), logits.cols());
  double loss = 0.0;
  if (params.output == OutputKind::sigmoid) {
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
      const double z = logits(i, 0);
      const double y = labels[std::size_t(i)];
      loss += softplus(z) - y * z;
      delta(i, 0) = 1.0 / (1.0 + std::exp(-z)) - y;
    }
  } else {
    const Eigen::VectorXd max = logits.rowwise().maxCoeff();
    const Eigen::VectorXd lse =
        max.array() + (logits.colwise() - max).array().exp().rowwise().sum().log();
    delta = (logits.colwise() - lse).array().exp();
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
      const int y = labels[std::size_t(i)];
      loss += lse(i) - logits(i, y);
      delta(i, y) -= 1.0;
    }
  }
  loss /= n;
  delta /= n;
  for (const auto& layer : params.layers) loss += 0.5 * l2 * layer.weights.squaredNorm();
  if (!grad) return loss;

  grad->resize(depth);
  for (std::size_t l = depth; l-- > 0;) {
    auto& g = (*grad)[l];
    g.weights = delta.transpose() * activations[l] + l2 * params.layers[l].weights;
    g.bias = delta.colwise().sum().transpose();
    if (l > 0) {
      Eigen::MatrixXd back = delta * params.layers[l].weights;
      delta = back.array() * (pre[l - 1].array() > 0.0).cast<double>();
    }
  }
  return loss;
}

double sgd_step(ModelParams& params, const Eigen::Ref<const Eigen::MatrixXd>& x, std::span<const int> labels,
                double rate, double l2) {
  std::vector<DenseLayer> grad;
  const double loss = loss_and_gradient(params, x, labels, l2, &grad);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    params.layers[l].weights -= rate * grad[l].weights;
    params.layers[l].bias -= rate * grad[l].bias;
  }
  return loss;
}

namespace {

TrainResult train(const Eigen::MatrixXd& x, std::span<const int> labels, std::span<const int> hidden,
                  const Hyper& hyper, bool random_init) {
  if (x.rows() < 2) throw ValidationError("need at least 2 training rows");
  if (Eigen::Index(labels.size()) != x.rows()) throw ShapeError("label count does not match feature rows");
  if (hyper.epochs < 1 || hyper.minibatch < 1 || !(hyper.rate > 0)) {
    throw ConfigError("epochs, minibatch and rate must be positive");
  }
  const int max_label = *std::max_element(labels.begin(), labels.end());
  const int classes = hyper.classes > 0 ? hyper.classes : std::max(2, max_label + 1);
  check_labels(labels, x.rows(), classes);

  std::vector<std::size_t> per_class(std::size_t(classes), 0);
  for (int y : labels) ++per_class[std::size_t(y)];
  if (std::count_if(per_class.begin(), per_class.end(), [](std::size_t c) { return c > 0; }) < 2) {
    throw ValidationError("training set contains a single class");
  }

  Rng rng(hyper.rng_seed);
  std::vector<std::size_t> rows(std::size_t(x.rows()));
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  if (hyper.balance_classes) {
    std::size_t target = SIZE_MAX;
    for (auto c : per_class) {
      if (c > 0) target = std::min(target, c);
    }
    rng.shuffle(rows);
    std::vector<std::size_t> taken(std::size_t(classes), 0), kept;
    for (auto r : rows) {
      auto& t = taken[std::size_t(labels[r])];
      if (t < target) {
        ++t;
        kept.push_back(r);
      }
    }
    std::sort(kept.begin(), kept.end());
    rows = std::move(kept);
  }

  TrainResult result;
  result.params = ModelParams::create(x.cols(), hidden, classes, random_init ? &rng : nullptr);
  if (hyper.standardize) {
    Eigen::MatrixXd used(Eigen::Index(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) used.row(Eigen::Index(i)) = x.row(Eigen::Index(rows[i]));
    fit_standardizer(result.params, used);
  }

  const std::size_t batch = std::size_t(hyper.minibatch);
  Eigen::MatrixXd xb;
  std::vector<int> yb;
  for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
    rng.shuffle(rows);
    double total = 0.0;
    for (std::size_t start = 0; start < rows.size(); start += batch) {
      const std::size_t len = std::min(batch, rows.size() - start);
      xb.resize(Eigen::Index(len), x.cols());
      yb.resize(len);
      for (std::size_t i = 0; i < len; ++i) {
        xb.row(Eigen::Index(i)) = x.row(Eigen::Index(rows[start + i]));
        yb[i] = labels[rows[start + i]];
      }
      const double loss = sgd_step(result.params, xb, yb, hyper.rate, hyper.l2);
      if (!std::isfinite(loss)) throw DivergenceError(epoch, "non-finite training loss");
      total += loss * double(len);
    }
    for (const auto& layer : result.params.layers) {
      if (!layer.weights.allFinite() || !layer.bias.allFinite()) {
        throw DivergenceError(epoch, "non-finite parameters");
      }
    }
    result.epoch_loss.push_back(total / double(rows.size()));
  }
  return result;
}

}  // namespace

TrainResult train_logistic(const Eigen::MatrixXd& x, std::span<const int> labels, const Hyper& hyper) {
  return train(x, labels, {}, hyper, false);
}

TrainResult train_mlp(const Eigen::MatrixXd& x, std::span<const int> labels, std::span<const int> hidden,
                      const Hyper& hyper) {
  return train(x, labels, hidden, hyper, true);
}

Eigen::MatrixXd predict(const ModelParams& params, const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd logits = forward(params, x);
  if (params.output == OutputKind::softmax) return row_softmax(logits);
  Eigen::MatrixXd p(logits.rows(), 2);
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double z = logits(i, 0);
    const double pos = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    p(i, 0) = 1.0 - pos;
    p(i, 1) = pos;
  }
  return p;
}

// ---------------------------------------------------------------------------

double auc(std::span<const double> scores, std::span<const int> truth) {
  if (scores.size() != truth.size()) throw ShapeError("score and truth lengths differ");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double rank = 0.5 * double(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (truth[order[k]] == 1) {
        positive_rank_sum += rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) throw UndefinedMetricError("AUC needs both classes in the truth");
  const double np = double(positives);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * double(negatives));
}

Metrics evaluate(const Eigen::MatrixXd& probabilities, std::span<const int> truth) {
  if (Eigen::Index(truth.size()) != probabilities.rows()) throw ShapeError("prediction and truth rows differ");
  Metrics m;
  m.rows = truth.size();
  if (m.rows == 0) return m;
  std::size_t correct = 0;
  double ce = 0.0;
  for (Eigen::Index i = 0; i < probabilities.rows(); ++i) {
    const int y = truth[std::size_t(i)];
    if (y < 0 || y >= probabilities.cols()) throw ValidationError("truth label outside prediction classes");
    Eigen::Index best;
    probabilities.row(i).maxCoeff(&best);
    correct += best == y;
    ce -= std::log(std::max(probabilities(i, y), 1e-12));
  }
  m.accuracy = double(correct) / double(m.rows);
  m.cross_entropy = ce / double(m.rows);
  if (probabilities.cols() == 2) {
    std::vector<double> scores(m.rows);
    for (std::size_t i = 0; i < m.rows; ++i) scores[i] = probabilities(Eigen::Index(i), 1);
    try {
      m.auc = auc(scores, truth);
    } catch (const UndefinedMetricError&) {
      m.auc.reset();
    }
  }
  return m;
}

}  // namespace demograph
