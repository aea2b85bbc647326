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

// Ensemble features from label propagation. The labeled set is split into
// N random partitions and propagation is run once per partition. A labeled
// node never sees its own label: its entry for the run it seeded is replaced
// by the mean of the other runs.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "demograph/graph.hpp"
#include "demograph/io.hpp"
#include "demograph/labelprop.hpp"

namespace demograph {

struct PartitionPlan {
  int partitions = 0;
  std::uint64_t rng_seed = 0;
  std::vector<NodeId> nodes;    // labeled nodes, ascending
  std::vector<int> assignment;  // partition of nodes[i]

  std::optional<int> partition_of(NodeId v) const;
  std::vector<std::size_t> sizes() const;
};

// Seeded shuffle followed by round-robin assignment, so partition sizes
// differ by at most one. Input order does not matter.
PartitionPlan make_partitions(std::span<const NodeId> labeled, int partitions,
                              std::uint64_t rng_seed);

struct LPFeatureBlock {
  int runs = 0;
  int classes = 1;
  // num_nodes x (runs * classes); run r occupies columns [r*classes, (r+1)*classes).
  Eigen::MatrixXd values;
  // num_nodes x runs; 1 where the entry is defined.
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> present;

  // Fixed-width emission: masked entries become the uniform distribution
  // (0.5 for binary, 1/classes otherwise), followed by one presence column
  // per run. Value columns are lp_<r> (binary) or lp_<r>_<c>.
  FeatureBlock to_feature_block(const Graph& g) const;
};

LPFeatureBlock lp_features(const Graph& g, const LabelState<double>& labels, const PartitionPlan& plan,
                           const PropagationConfig& cfg);

}  // namespace demograph
