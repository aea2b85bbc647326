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

#include "demograph/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace demograph {

void PlantedGraphSpec::validate() const {
  if (nodes_per_class < 1) throw ValidationError("nodes per class must be >= 1");
  if (classes < 2) throw ValidationError("need at least 2 classes");
  if (!(p >= 0 && p <= 1 && q >= 0 && q <= 1)) throw ValidationError("edge probabilities must lie in [0, 1]");
  if (p < q && !allow_anti_homophily) {
    throw ValidationError("p < q requests an anti-homophilous graph; enable it explicitly");
  }
  if (!(reveal > 0 && reveal < 1)) throw ValidationError("reveal fraction must lie in (0, 1)");
  if (!(noise >= 0)) throw ValidationError("feature noise must be >= 0");
}

SynthData generate(const PlantedGraphSpec& spec) {
  spec.validate();
  const std::size_t n = std::size_t(spec.nodes_per_class) * std::size_t(spec.classes);
  SynthData data;
  data.names.reserve(n);
  data.truth.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    data.names.push_back("u" + std::to_string(i));
    data.truth.push_back(int(i / std::size_t(spec.nodes_per_class)));
  }

  Rng edge_rng(derive_seed(spec.rng_seed, "synth/edges"));
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      const double prob = data.truth[i] == data.truth[j] ? spec.p : spec.q;
      if (!edge_rng.bernoulli(prob)) continue;
      if (edge_rng.bernoulli(0.5)) {
        data.arcs.emplace_back(i, j);
      } else {
        data.arcs.emplace_back(j, i);
      }
    }
  }

  Rng reveal_rng(derive_seed(spec.rng_seed, "synth/reveal"));
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  reveal_rng.shuffle(order);
  const auto shown = std::max<std::size_t>(1, std::size_t(std::llround(spec.reveal * double(n))));
  data.revealed.assign(order.begin(), order.begin() + std::ptrdiff_t(shown));
  std::sort(data.revealed.begin(), data.revealed.end());

  Rng noise_rng(derive_seed(spec.rng_seed, "synth/features"));
  data.cumf = Eigen::MatrixXd::Zero(Eigen::Index(n), spec.classes);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < spec.classes; ++c) {
      data.cumf(Eigen::Index(i), c) = (c == data.truth[i] ? 1.0 : 0.0) + spec.noise * noise_rng.normal();
    }
  }
  return data;
}

EdgeList SynthData::edge_list() const {
  EdgeList edges;
  for (const auto& name : names) edges.nodes.intern(name);
  edges.arcs = arcs;
  std::sort(edges.arcs.begin(), edges.arcs.end());
  return edges;
}

LabelState<double> SynthData::seed_state() const {
  if (classes() == 2) {
    LabelState<double> state(num_nodes(), 1);
    for (NodeId v : revealed) state.set_seed(v, double(truth[v]));
    return state;
  }
  std::vector<int> seeds(num_nodes(), -1);
  for (NodeId v : revealed) seeds[v] = truth[v];
  return one_hot_seeds(seeds, classes());
}

FeatureBlock SynthData::cumf_block() const {
  FeatureBlock block{"cumf", names, {}, cumf};
  for (int c = 0; c < classes(); ++c) block.columns.push_back("cumf_" + std::to_string(c));
  return block;
}

void SynthData::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* file) {
    std::ofstream out(dir / file);
    if (!out) throw RuntimeError("cannot write " + (dir / file).string());
    return out;
  };

  {
    auto out = open("edges.tsv");
    std::vector<std::uint8_t> touched(num_nodes(), 0);
    for (auto [s, t] : arcs) {
      out << names[s] << '\t' << names[t] << '\n';
      touched[s] = touched[t] = 1;
    }
    for (std::size_t v = 0; v < num_nodes(); ++v) {
      if (!touched[v]) out << names[v] << '\t' << names[v] << '\n';
    }
  }
  {
    auto out = open("truth.tsv");
    for (std::size_t v = 0; v < num_nodes(); ++v) out << names[v] << '\t' << truth[v] << '\n';
  }
  {
    auto out = open("seeds.tsv");
    for (NodeId v : revealed) out << names[v] << '\t' << truth[v] << '\n';
  }
  {
    auto out = open("cumf.csv");
    write_feature_csv(out, cumf_block());
  }
}

}  // namespace demograph
