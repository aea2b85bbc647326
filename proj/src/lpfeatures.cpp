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

#include "demograph/lpfeatures.hpp"

#include <algorithm>
#include <string>

namespace demograph {

std::optional<int> PartitionPlan::partition_of(NodeId v) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), v);
  if (it == nodes.end() || *it != v) return std::nullopt;
  return assignment[std::size_t(it - nodes.begin())];
}

std::vector<std::size_t> PartitionPlan::sizes() const {
  std::vector<std::size_t> out(std::size_t(std::max(partitions, 0)), 0);
  for (int a : assignment) ++out[std::size_t(a)];
  return out;
}

PartitionPlan make_partitions(std::span<const NodeId> labeled, int partitions, std::uint64_t rng_seed) {
  if (partitions < 2) throw ConfigError("partition count must be >= 2");
  std::vector<NodeId> nodes(labeled.begin(), labeled.end());
  std::sort(nodes.begin(), nodes.end());
  if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end()) {
    throw ValidationError("labeled node listed twice");
  }
  if (nodes.size() < std::size_t(partitions)) {
    throw ConfigError("cannot split " + std::to_string(nodes.size()) + " labeled nodes into " +
                      std::to_string(partitions) + " partitions");
  }

  std::vector<std::size_t> order(nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(rng_seed);
  rng.shuffle(order);

  PartitionPlan plan;
  plan.partitions = partitions;
  plan.rng_seed = rng_seed;
  plan.assignment.assign(nodes.size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    plan.assignment[order[i]] = int(i % std::size_t(partitions));
  }
  plan.nodes = std::move(nodes);
  return plan;
}

LPFeatureBlock lp_features(const Graph& g, const LabelState<double>& labels, const PartitionPlan& plan,
                           const PropagationConfig& cfg) {
  const std::size_t n = g.num_nodes();
  if (labels.size() != n) throw ValidationError("label state does not match graph size");
  std::vector<NodeId> seeded;
  for (NodeId v = 0; v < n; ++v) {
    if (labels.is_seed[v]) seeded.push_back(v);
  }
  if (seeded != plan.nodes) throw ValidationError("partition plan does not cover exactly the seed nodes");

  const int runs = plan.partitions;
  const int classes = labels.classes();
  const Eigen::Index width = classes;

  std::vector<LabelState<double>> outputs;
  outputs.reserve(std::size_t(runs));
  for (int r = 0; r < runs; ++r) {
    LabelState<double> seeds(n, classes);
    for (std::size_t i = 0; i < plan.nodes.size(); ++i) {
      if (plan.assignment[i] == r) seeds.set_seed(plan.nodes[i], labels.values.row(plan.nodes[i]));
    }
    outputs.push_back(propagate(g, seeds, cfg).state);
  }

  LPFeatureBlock block;
  block.runs = runs;
  block.classes = classes;
  block.values = Eigen::MatrixXd::Zero(Eigen::Index(n), runs * width);
  block.present.setZero(Eigen::Index(n), runs);

  for (NodeId v = 0; v < n; ++v) {
    for (int r = 0; r < runs; ++r) {
      if (outputs[r].is_active[v]) {
        block.values.block(v, r * width, 1, width) = outputs[r].values.row(v);
        block.present(v, r) = 1;
      }
    }
    auto own = plan.partition_of(v);
    if (!own) continue;

    // Replace the self-seeded entry by the mean of the other runs.
    const int i = *own;
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(width);
    int count = 0;
    for (int r = 0; r < runs; ++r) {
      if (r == i || !outputs[r].is_active[v]) continue;
      sum += outputs[r].values.row(v);
      ++count;
    }
    if (count > 0) {
      block.values.block(v, i * width, 1, width) = sum / double(count);
      block.present(v, i) = 1;
    } else {
      block.values.block(v, i * width, 1, width).setZero();
      block.present(v, i) = 0;
    }
  }
  return block;
}

FeatureBlock LPFeatureBlock::to_feature_block(const Graph& g) const {
  const double fill = classes == 1 ? 0.5 : 1.0 / classes;
  FeatureBlock out;
  out.name = "lp";
  out.nodes = g.nodes().names();
  for (int r = 0; r < runs; ++r) {
    for (int c = 0; c < classes; ++c) {
      out.columns.push_back(classes == 1 ? "lp_" + std::to_string(r)
                                         : "lp_" + std::to_string(r) + "_" + std::to_string(c));
    }
  }
  for (int r = 0; r < runs; ++r) out.columns.push_back("lp_present_" + std::to_string(r));

  const Eigen::Index n = values.rows();
  out.values.resize(n, runs * classes + runs);
  for (Eigen::Index v = 0; v < n; ++v) {
    for (int r = 0; r < runs; ++r) {
      const bool ok = present(v, r) != 0;
      for (int c = 0; c < classes; ++c) {
        out.values(v, r * classes + c) = ok ? values(v, r * classes + c) : fill;
      }
      out.values(v, runs * classes + r) = ok ? 1.0 : 0.0;
    }
  }
  return out;
}

}  // namespace demograph
