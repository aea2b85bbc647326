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

// Planted-partition follow graphs with known labels, used as a stand-in for
// real demographic data.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "demograph/graph.hpp"
#include "demograph/io.hpp"

namespace demograph {

struct PlantedGraphSpec {
  int nodes_per_class = 1000;
  int classes = 2;
  double p = 0.01;  // intra-class pair probability
  double q = 0.001;  // inter-class pair probability
  double reveal = 0.2;
  double noise = 1.0;  // std-dev of the additive Gaussian noise on one-hot features
  std::uint64_t rng_seed = 1;
  bool allow_anti_homophily = false;

  void validate() const;
};

struct SynthData {
  std::vector<std::string> names;  // node i is "u<i>", class i / nodes_per_class
  std::vector<int> truth;
  // Each sampled pair becomes one follow arc in a random direction.
  std::vector<std::pair<NodeId, NodeId>> arcs;
  std::vector<NodeId> revealed;  // ascending
  Eigen::MatrixXd cumf;          // names.size() x classes

  std::size_t num_nodes() const noexcept { return names.size(); }
  int classes() const noexcept { return int(cumf.cols()); }

  // Nodes are interned in index order, so NodeId i is names[i].
  EdgeList edge_list() const;
  Graph graph() const { return Graph::from_edges(edge_list()); }
  LabelState<double> seed_state() const;  // binary or one-hot
  FeatureBlock cumf_block() const;

  // edges.tsv, truth.tsv, seeds.tsv, cumf.csv. Isolated nodes appear in
  // edges.tsv as self-loops so the node set survives a reload.
  void write(const std::filesystem::path& dir) const;
};

SynthData generate(const PlantedGraphSpec& spec);

}  // namespace demograph
