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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "demograph/labelprop.hpp"
#include "demograph/model.hpp"
#include "demograph/synth.hpp"

namespace demograph {
namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Generate, ExtremeProbabilitiesGiveCliques) {
  PlantedGraphSpec spec;
  spec.nodes_per_class = 5;
  spec.p = 1.0;
  spec.q = 0.0;
  const auto data = generate(spec);
  const Graph g = data.graph();
  EXPECT_EQ(g.num_nodes(), 10u);
  EXPECT_EQ(g.num_edges(), 20u);
  for (NodeId v = 0; v < 10; ++v) {
    EXPECT_EQ(g.degree(v), 4u);
    for (NodeId u : g.neighbors(v)) EXPECT_EQ(data.truth[u], data.truth[v]);
  }
}

TEST(Generate, EqualProbabilitiesGiveRatioOne) {
  PlantedGraphSpec spec;
  spec.nodes_per_class = 100;
  spec.p = spec.q = 0.05;
  const auto data = generate(spec);
  double intra = 0, inter = 0;
  for (auto [s, t] : data.arcs) (data.truth[s] == data.truth[t] ? intra : inter) += 1.0;
  // Per node, intra pairs = 99 and inter pairs = 100.
  const double intra_pairs = 2 * 100.0 * 99 / 2, inter_pairs = 100.0 * 100;
  const double ratio = (inter / inter_pairs) / (intra / intra_pairs);
  // Delta-method standard error of a ratio of two binomial rates.
  const double se = std::sqrt((1 - spec.q) / (spec.q * inter_pairs) + (1 - spec.p) / (spec.p * intra_pairs));
  EXPECT_NEAR(ratio, 1.0, 3 * se);
}

TEST(Generate, EdgeCountsWithinFourSigma) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    PlantedGraphSpec spec;
    spec.nodes_per_class = 120;
    spec.classes = seed % 2 ? 2 : 7;
    spec.p = 0.08;
    spec.q = 0.01;
    spec.rng_seed = seed;
    const auto data = generate(spec);
    const double n = spec.nodes_per_class, c = spec.classes;
    const double intra_pairs = c * n * (n - 1) / 2, inter_pairs = c * (c - 1) / 2 * n * n;
    double intra = 0, inter = 0;
    for (auto [s, t] : data.arcs) (data.truth[s] == data.truth[t] ? intra : inter) += 1.0;
    EXPECT_NEAR(intra, spec.p * intra_pairs, 4 * std::sqrt(intra_pairs * spec.p * (1 - spec.p)));
    EXPECT_NEAR(inter, spec.q * inter_pairs, 4 * std::sqrt(inter_pairs * spec.q * (1 - spec.q)));
  }
}

TEST(Generate, DeterministicFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "demograph_synth_test";
  std::filesystem::remove_all(dir);
  PlantedGraphSpec spec;
  spec.nodes_per_class = 50;
  spec.p = 0.1;
  spec.rng_seed = 11;
  generate(spec).write(dir / "a");
  generate(spec).write(dir / "b");
  for (const char* f : {"edges.tsv", "truth.tsv", "seeds.tsv", "cumf.csv"}) {
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
    EXPECT_FALSE(slurp(dir / "a" / f).empty()) << f;
  }
  spec.rng_seed = 12;
  generate(spec).write(dir / "c");
  EXPECT_NE(slurp(dir / "a" / "edges.tsv"), slurp(dir / "c" / "edges.tsv"));

  // Reloading the written edge list reproduces the node set.
  const Graph g = load_edge_list(dir / "a" / "edges.tsv");
  EXPECT_EQ(g.num_nodes(), 100u);
  std::filesystem::remove_all(dir);
}

TEST(Generate, RevealAndFeatures) {
  PlantedGraphSpec spec;
  spec.nodes_per_class = 500;
  spec.reveal = 0.2;
  spec.noise = 0.0;
  const auto data = generate(spec);
  EXPECT_EQ(data.revealed.size(), 200u);
  EXPECT_TRUE(std::is_sorted(data.revealed.begin(), data.revealed.end()));
  for (std::size_t i = 0; i < data.num_nodes(); ++i) {
    EXPECT_EQ(data.cumf(Eigen::Index(i), data.truth[i]), 1.0);
    EXPECT_EQ(data.cumf.row(Eigen::Index(i)).sum(), 1.0);
  }
  const auto seeds = data.seed_state();
  EXPECT_EQ(seeds.seed_count(), 200u);
  const auto block = data.cumf_block();
  EXPECT_EQ(block.columns, (std::vector<std::string>{"cumf_0", "cumf_1"}));
}

TEST(Generate, Validation) {
  PlantedGraphSpec spec;
  spec.p = 0.001;
  spec.q = 0.01;
  EXPECT_THROW(generate(spec), ValidationError);
  spec.allow_anti_homophily = true;
  spec.nodes_per_class = 20;
  EXPECT_NO_THROW(generate(spec));
  spec = PlantedGraphSpec{};
  spec.reveal = 1.0;
  EXPECT_THROW(spec.validate(), ValidationError);
  spec = PlantedGraphSpec{};
  spec.noise = -1;
  EXPECT_THROW(spec.validate(), ValidationError);
  spec = PlantedGraphSpec{};
  spec.classes = 1;
  EXPECT_THROW(spec.validate(), ValidationError);
}

TEST(Generate, SevenClassSeedsAreOneHot) {
  PlantedGraphSpec spec;
  spec.classes = 7;
  spec.nodes_per_class = 30;
  spec.p = 0.2;
  spec.q = 0.01;
  const auto data = generate(spec);
  const auto seeds = data.seed_state();
  EXPECT_EQ(seeds.classes(), 7);
  PropagationConfig cfg;
  const auto s = propagate(data.graph(), seeds, cfg).state;
  for (NodeId v = 0; v < s.size(); ++v) {
    if (s.is_active[v]) {
      EXPECT_NEAR(s.values.row(v).sum(), 1.0, 1e-9);
    }
  }
}

// The homophily sanity bar: strong planted structure and 10% reveal give
// propagation AUC >= 0.9 on hidden nodes.
TEST(Generate, PropagationRecoversLabels) {
  PlantedGraphSpec spec;
  spec.nodes_per_class = 500;
  spec.p = 0.02;
  spec.q = 0.001;
  spec.reveal = 0.1;
  const auto data = generate(spec);
  PropagationConfig cfg;  // alpha 0.3, K 3
  const auto s = propagate(data.graph(), data.seed_state(), cfg).state;
  std::vector<double> scores;
  std::vector<int> truth;
  for (NodeId v = 0; v < data.num_nodes(); ++v) {
    if (s.is_seed[v]) continue;
    scores.push_back(s.is_active[v] ? s.values(v, 0) : 0.5);
    truth.push_back(data.truth[v]);
  }
  EXPECT_GE(auc(scores, truth), 0.9);
}

}  // namespace
}  // namespace demograph
