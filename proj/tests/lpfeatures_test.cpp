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

#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "demograph/lpfeatures.hpp"
#include "oracles.hpp"

namespace demograph {
namespace {

Graph parse(const std::string& text) {
  std::istringstream in(text);
  return Graph::from_edges(read_edge_list(in));
}

NodeId id(const Graph& g, std::string_view name) { return *g.find(name); }

// Hand-built plan: `nodes` must be ascending.
PartitionPlan plan_of(int runs, std::vector<NodeId> nodes, std::vector<int> assignment) {
  PartitionPlan p;
  p.partitions = runs;
  p.nodes = std::move(nodes);
  p.assignment = std::move(assignment);
  return p;
}

PropagationConfig one_step() {
  PropagationConfig cfg;
  cfg.alpha = 0.3;
  cfg.iterations = 1;
  return cfg;
}

std::vector<NodeId> range(NodeId n) {
  std::vector<NodeId> v(n);
  std::iota(v.begin(), v.end(), NodeId{0});
  return v;
}

TEST(MakePartitions, Balance) {
  const auto nine = make_partitions(range(9), 3, 1);
  EXPECT_EQ(nine.sizes(), (std::vector<std::size_t>{3, 3, 3}));
  auto ten = make_partitions(range(10), 3, 1).sizes();
  std::sort(ten.begin(), ten.end());
  EXPECT_EQ(ten, (std::vector<std::size_t>{3, 3, 4}));
}

TEST(MakePartitions, DeterministicAndOrderFree) {
  const auto a = make_partitions(range(50), 4, 99);
  const auto b = make_partitions(range(50), 4, 99);
  EXPECT_EQ(a.assignment, b.assignment);
  auto reversed = range(50);
  std::reverse(reversed.begin(), reversed.end());
  EXPECT_EQ(make_partitions(reversed, 4, 99).assignment, a.assignment);
  EXPECT_NE(make_partitions(range(50), 4, 100).assignment, a.assignment);
  for (NodeId v = 0; v < 50; ++v) EXPECT_TRUE(a.partition_of(v).has_value());
  EXPECT_FALSE(a.partition_of(50).has_value());
}

TEST(MakePartitions, Errors) {
  EXPECT_THROW(make_partitions(range(2), 3, 0), ConfigError);
  EXPECT_THROW(make_partitions(range(5), 1, 0), ConfigError);
  std::vector<NodeId> dup{1, 2, 2};
  EXPECT_THROW(make_partitions(dup, 2, 0), ValidationError);
}

// u is unlabeled and hears one seed per run.
TEST(LpFeatures, UnlabeledPassthrough) {
  const Graph g = parse("s0 u\ns1 u\ns2 u\n");
  LabelState<double> labels(g.num_nodes(), 1);
  labels.set_seed(id(g, "s0"), 0.2);
  labels.set_seed(id(g, "s1"), 0.4);
  labels.set_seed(id(g, "s2"), 0.6);
  const auto plan = plan_of(3, {id(g, "s0"), id(g, "s1"), id(g, "s2")}, {0, 1, 2});
  const auto f = lp_features(g, labels, plan, one_step());
  const NodeId u = id(g, "u");
  EXPECT_EQ(f.values(u, 0), 0.2);
  EXPECT_EQ(f.values(u, 1), 0.4);
  EXPECT_EQ(f.values(u, 2), 0.6);
}

// u is labeled in partition 0; runs 1 and 2 give it 0.4 and 0.6.
TEST(LpFeatures, LeaveOutMean) {
  const Graph g = parse("u p\nu q\n");
  LabelState<double> labels(g.num_nodes(), 1);
  labels.set_seed(id(g, "u"), 1.0);
  labels.set_seed(id(g, "p"), 0.4);
  labels.set_seed(id(g, "q"), 0.6);
  std::vector<NodeId> nodes{id(g, "u"), id(g, "p"), id(g, "q")};
  const auto plan = plan_of(3, nodes, {0, 1, 2});
  const auto f = lp_features(g, labels, plan, one_step());
  EXPECT_EQ(f.values(id(g, "u"), 0), 0.5);
  EXPECT_EQ(f.values(id(g, "u"), 1), 0.4);
  EXPECT_EQ(f.values(id(g, "u"), 2), 0.6);
  EXPECT_EQ(f.present(id(g, "u"), 0), 1);
}

TEST(LpFeatures, SingleRemainingRun) {
  const Graph g = parse("u p\n");
  LabelState<double> labels(g.num_nodes(), 1);
  labels.set_seed(id(g, "u"), 1.0);
  labels.set_seed(id(g, "p"), 0.3);
  const auto plan = plan_of(2, {id(g, "u"), id(g, "p")}, {0, 1});
  const auto f = lp_features(g, labels, plan, one_step());
  EXPECT_EQ(f.values(id(g, "u"), 0), 0.3);
}

TEST(LpFeatures, MaskedEntriesAndEmission) {
  // far is two hops from every seed, so with K=1 it is never reached.
  const Graph g = parse("a b\nb far\nc d\n");
  LabelState<double> labels(g.num_nodes(), 1);
  labels.set_seed(id(g, "a"), 1.0);
  labels.set_seed(id(g, "c"), 0.0);
  const auto plan = plan_of(2, {id(g, "a"), id(g, "c")}, {0, 1});
  const auto f = lp_features(g, labels, plan, one_step());
  const NodeId far = id(g, "far");
  EXPECT_EQ(f.present(far, 0), 0);
  EXPECT_EQ(f.present(far, 1), 0);
  // a is labeled in run 0 and run 1 never reaches it: fully masked too.
  EXPECT_EQ(f.present(id(g, "a"), 0), 0);

  const FeatureBlock block = f.to_feature_block(g);
  EXPECT_EQ(block.name, "lp");
  EXPECT_EQ(block.columns, (std::vector<std::string>{"lp_0", "lp_1", "lp_present_0", "lp_present_1"}));
  EXPECT_EQ(block.values(far, 0), 0.5);
  EXPECT_EQ(block.values(far, 2), 0.0);
  EXPECT_EQ(block.values(id(g, "b"), 0), 1.0);
  EXPECT_EQ(block.values(id(g, "b"), 2), 1.0);
}

TEST(LpFeatures, PlanMustMatchSeeds) {
  const Graph g = parse("a b\nb c\n");
  LabelState<double> labels(g.num_nodes(), 1);
  labels.set_seed(0, 1.0);
  labels.set_seed(2, 0.0);
  EXPECT_THROW(lp_features(g, labels, plan_of(2, {0, 1}, {0, 1}), one_step()), ValidationError);
}

struct Instance {
  Graph g;
  LabelState<double> labels;
  std::vector<NodeId> seeded;
};

Instance random_instance(Rng& rng, int n) {
  Instance in{oracle::graph_from_pairs(n, oracle::random_pairs(rng, n, 4.0 / n)), LabelState<double>(n, 1), {}};
  for (NodeId v = 0; v < NodeId(n); ++v) {
    if (rng.bernoulli(0.3)) {
      in.labels.set_seed(v, double(rng.below(2)));
      in.seeded.push_back(v);
    }
  }
  return in;
}

TEST(LpFeatures, NoSelfLeakage) {
  Rng rng(31);
  PropagationConfig cfg;
  cfg.iterations = 3;
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = random_instance(rng, 60);
    if (inst.seeded.size() < 3) continue;
    const auto plan = make_partitions(inst.seeded, 3, std::uint64_t(trial));
    const auto base = lp_features(inst.g, inst.labels, plan, cfg);
    for (NodeId u : inst.seeded) {
      LabelState<double> flipped = inst.labels;
      flipped.values(u, 0) = 1.0 - flipped.values(u, 0);
      const auto changed = lp_features(inst.g, flipped, plan, cfg);
      const int own = *plan.partition_of(u);
      EXPECT_EQ(base.values(u, own), changed.values(u, own));
      EXPECT_EQ(base.present(u, own), changed.present(u, own));
    }
  }
}

TEST(LpFeatures, PartitionPermutationPermutesColumns) {
  Rng rng(32);
  auto inst = random_instance(rng, 80);
  const auto plan = make_partitions(inst.seeded, 3, 5);
  PartitionPlan rotated = plan;
  for (int& a : rotated.assignment) a = (a + 1) % 3;
  const auto a = lp_features(inst.g, inst.labels, plan, PropagationConfig{});
  const auto b = lp_features(inst.g, inst.labels, rotated, PropagationConfig{});
  for (int r = 0; r < 3; ++r) {
    EXPECT_EQ(a.values.col(r), b.values.col((r + 1) % 3));
    EXPECT_EQ(a.present.col(r), b.present.col((r + 1) % 3));
  }
}

TEST(LpFeatures, IdenticalPartitionsGiveEqualColumns) {
  // A plan cannot list a node twice, so the degenerate "same seeds in every
  // partition" case is built from two disjoint copies of one graph: copy k
  // carries the full seed set and is partition k. Each copy's column must
  // equal a plain propagation of the original.
  Rng rng(33);
  auto inst = random_instance(rng, 50);
  PropagationConfig cfg;
  const auto single = propagate(inst.g, inst.labels, cfg).state;
  EdgeList two;
  for (int copy = 0; copy < 2; ++copy) {
    for (NodeId v = 0; v < inst.g.num_nodes(); ++v) two.nodes.intern(std::to_string(copy) + ":" + inst.g.name(v));
  }
  const NodeId n = NodeId(inst.g.num_nodes());
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId u : inst.g.neighbors(v)) {
      two.arcs.emplace_back(v, u);
      two.arcs.emplace_back(v + n, u + n);
    }
  }
  const Graph g2 = Graph::from_edges(std::move(two));
  LabelState<double> labels2(2 * n, 1);
  std::vector<NodeId> nodes;
  std::vector<int> assignment;
  for (NodeId v : inst.seeded) {
    labels2.set_seed(v, inst.labels.values(v, 0));
    labels2.set_seed(v + n, inst.labels.values(v, 0));
  }
  for (NodeId v : inst.seeded) {
    nodes.push_back(v);
    assignment.push_back(0);
  }
  for (NodeId v : inst.seeded) {
    nodes.push_back(v + n);
    assignment.push_back(1);
  }
  const auto f = lp_features(g2, labels2, plan_of(2, nodes, assignment), cfg);
  for (NodeId v = 0; v < n; ++v) {
    if (inst.labels.is_seed[v]) continue;
    EXPECT_EQ(f.present(v, 0), single.is_active[v]);
    EXPECT_EQ(f.present(v + n, 1), single.is_active[v]);
    if (single.is_active[v]) {
      EXPECT_EQ(f.values(v, 0), single.values(v, 0));
      EXPECT_EQ(f.values(v + n, 1), f.values(v, 0));
    }
  }
}

TEST(LpFeatures, MulticlassWidthAndFill) {
  const Graph g = parse("a x\nb x\nc y\ny far\n");
  std::vector<int> classes(g.num_nodes(), -1);
  classes[id(g, "a")] = 2;
  classes[id(g, "b")] = 5;
  classes[id(g, "c")] = 5;
  const auto labels = one_hot_seeds(classes, kAgeBuckets);
  const auto plan = plan_of(2, {id(g, "a"), id(g, "b"), id(g, "c")}, {0, 1, 0});
  const auto f = lp_features(g, labels, plan, one_step());
  EXPECT_EQ(f.values.cols(), 14);
  EXPECT_EQ(f.values(id(g, "x"), 2), 1.0);      // run 0, bucket 2
  EXPECT_EQ(f.values(id(g, "x"), 7 + 5), 1.0);  // run 1, bucket 5
  // a is labeled in run 0: its run-0 vector is run 1's (x is inactive in
  // run 1 at K=1, so a is not reached there) -> masked.
  EXPECT_EQ(f.present(id(g, "a"), 0), 0);

  const auto block = f.to_feature_block(g);
  EXPECT_EQ(block.columns.size(), 16u);
  EXPECT_EQ(block.columns[8], "lp_1_1");
  EXPECT_DOUBLE_EQ(block.values(id(g, "far"), 0), 1.0 / 7.0);
  EXPECT_NEAR(block.values.row(id(g, "x")).head(7).sum(), 1.0, 1e-12);
}

}  // namespace
}  // namespace demograph
