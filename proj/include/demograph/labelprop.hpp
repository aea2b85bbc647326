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

// Bulk-synchronous label propagation over an undirected Graph.
//
// Every superstep reads the state left by the previous superstep and writes
// a fresh buffer, so results do not depend on node order or worker count.
// Seed nodes never change. A non-seed node only listens to neighbours that
// were active at the end of the previous superstep; the first time it hears
// from any, it takes their plain mean (no damping on that step).
//
// Update rules for an already active node i with active neighbour mean m_i:
//   alpha:  y_i <- alpha * y_i + (1 - alpha) * m_i
//   beta:   y_i <- (1 - beta^k) * y_i + beta^k * m_i      (k = 1, 2, ...)
//   gamma:  two accumulators (male, female), y_i <- y_i + gamma * m_i,
//           normalised to f / (m + f) once after the last superstep.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "demograph/common.hpp"
#include "demograph/graph.hpp"

namespace demograph {

enum class Strategy { alpha, beta, gamma };

const char* to_string(Strategy s) noexcept;
Strategy parse_strategy(std::string_view name);

inline constexpr int kAgeBuckets = 7;

struct PropagationConfig {
  Strategy strategy = Strategy::alpha;
  double alpha = 0.3;
  double beta = 0.8;
  double gamma = 0.9;
  int iterations = 3;
  int workers = 1;

  // Throws ConfigError when the parameter of the chosen strategy is out of
  // range or iterations < 1.
  void validate() const;
  double parameter() const noexcept;
};

template <class Scalar>
struct LabelState {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Row = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  Matrix values;  // num_nodes x classes; rows of inactive nodes are zero
  std::vector<std::uint8_t> is_seed;
  std::vector<std::uint8_t> is_active;

  LabelState() = default;
  LabelState(std::size_t num_nodes, int classes)
      : values(Matrix::Zero(static_cast<Eigen::Index>(num_nodes), classes)),
        is_seed(num_nodes, 0),
        is_active(num_nodes, 0) {}

  std::size_t size() const noexcept { return is_seed.size(); }
  int classes() const noexcept { return static_cast<int>(values.cols()); }

  void set_seed(NodeId v, Scalar y) {
    values(v, 0) = y;
    is_seed.at(v) = is_active.at(v) = 1;
  }
  template <class Derived>
  void set_seed(NodeId v, const Eigen::MatrixBase<Derived>& row) {
    values.row(v) = row;
    is_seed.at(v) = is_active.at(v) = 1;
  }

  std::size_t seed_count() const;
  std::size_t active_count() const;
  double coverage() const { return size() == 0 ? 0.0 : double(active_count()) / double(size()); }
};

template <class Scalar>
struct PropagationResult {
  LabelState<Scalar> state;
  double coverage = 0.0;
  // Fraction of active nodes and largest absolute change among nodes that
  // were already active, one entry per superstep. Diagnostics only.
  std::vector<double> coverage_trace;
  std::vector<double> max_delta;
};

// Runs cfg.iterations supersteps of the configured strategy. For the gamma
// strategy seeds must be single-channel values in [0, 1] (probability of
// class 1); they are split into accumulators (1 - y, y).
template <class Scalar>
PropagationResult<Scalar> propagate(const Graph& g, const LabelState<Scalar>& seeds,
                                    const PropagationConfig& cfg);

template <class Scalar>
PropagationResult<Scalar> propagate_beta(const Graph& g, const LabelState<Scalar>& seeds,
                                         double beta, int iterations, int workers = 1);

template <class Scalar>
PropagationResult<Scalar> propagate_gamma(const Graph& g, const LabelState<Scalar>& seeds,
                                          double gamma, int iterations, int workers = 1);

// seed_classes[v] is a bucket in [0, 7), or -1 for unlabeled nodes.
PropagationResult<double> propagate_multiclass(const Graph& g, std::span<const int> seed_classes,
                                               const PropagationConfig& cfg);

// One-hot seed state; -1 marks an unlabeled node, other values outside
// [0, classes) are rejected.
LabelState<double> one_hot_seeds(std::span<const int> seed_classes, int classes);

// 0: <=17, 1: 18-24, 2: 25-34, 3: 35-44, 4: 45-54, 5: 55-64, 6: 65+.
int age_bucket(int age_years);

extern template struct LabelState<float>;
extern template struct LabelState<double>;

}  // namespace demograph
