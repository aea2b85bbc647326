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

#include "demograph/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace demograph {

NodeId NodeTable::intern(std::string_view name) {
  auto [it, inserted] = index_.try_emplace(std::string(name), static_cast<NodeId>(names_.size()));
  if (inserted) names_.emplace_back(name);
  return it->second;
}

std::optional<NodeId> NodeTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void NodeTable::write_mapping(std::ostream& out) const {
  for (std::size_t i = 0; i < names_.size(); ++i) out << i << '\t' << names_[i] << '\n';
}

std::vector<std::vector<NodeId>> EdgeList::out_adjacency(bool bidirectional) const {
  std::vector<std::vector<NodeId>> adj(nodes.size());
  for (auto [s, t] : arcs) {
    adj[s].push_back(t);
    if (bidirectional) adj[t].push_back(s);
  }
  if (bidirectional) {
    for (auto& list : adj) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
  }
  return adj;
}

EdgeList read_edge_list(std::istream& in, std::size_t min_degree, const std::string& source) {
  EdgeList raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream tokens(line);
    std::string src, dst, extra;
    if (!(tokens >> src >> dst) || (tokens >> extra)) {
      throw ParseError(source, line_no, "expected two tokens <src> <dst>");
    }
    NodeId s = raw.nodes.intern(src);
    NodeId t = raw.nodes.intern(dst);
    if (s != t) raw.arcs.emplace_back(s, t);
  }
  if (raw.nodes.size() == 0) throw EmptyGraphError(source + ": no edges");

  std::sort(raw.arcs.begin(), raw.arcs.end());
  raw.arcs.erase(std::unique(raw.arcs.begin(), raw.arcs.end()), raw.arcs.end());
  if (min_degree == 0) return raw;

  std::vector<std::size_t> out_degree(raw.nodes.size(), 0);
  for (auto [s, t] : raw.arcs) ++out_degree[s];

  EdgeList kept;
  std::vector<NodeId> remap(raw.nodes.size(), 0);
  std::vector<bool> keep(raw.nodes.size(), false);
  for (NodeId v = 0; v < raw.nodes.size(); ++v) {
    if (out_degree[v] >= min_degree) {
      keep[v] = true;
      remap[v] = kept.nodes.intern(raw.nodes.name(v));
    }
  }
  if (kept.nodes.size() == 0) {
    throw EmptyGraphError(source + ": no node has out-degree >= " + std::to_string(min_degree));
  }
  for (auto [s, t] : raw.arcs) {
    if (keep[s] && keep[t]) kept.arcs.emplace_back(remap[s], remap[t]);
  }
  std::sort(kept.arcs.begin(), kept.arcs.end());
  return kept;
}

EdgeList load_directed(const std::filesystem::path& path, std::size_t min_degree) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open edge list: " + path.string());
  return read_edge_list(in, min_degree, path.string());
}

Graph Graph::from_edges(EdgeList edges, bool symmetrize) {
  const std::size_t n = edges.nodes.size();
  std::vector<std::pair<NodeId, NodeId>> pairs;
  pairs.reserve(edges.arcs.size() * (symmetrize ? 2 : 1));
  for (auto [s, t] : edges.arcs) {
    if (s >= n || t >= n) throw ValidationError("arc references a node that was never interned");
    if (s == t) continue;
    pairs.emplace_back(s, t);
    if (symmetrize) pairs.emplace_back(t, s);
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  if (!symmetrize) {
    for (auto [s, t] : pairs) {
      if (!std::binary_search(pairs.begin(), pairs.end(), std::make_pair(t, s))) {
        throw ValidationError("asymmetric input: arc " + edges.nodes.name(s) + " -> " +
                              edges.nodes.name(t) + " has no reverse");
      }
    }
  }

  Graph g;
  g.nodes_ = std::move(edges.nodes);
  g.offsets_.assign(n + 1, 0);
  for (auto [s, t] : pairs) ++g.offsets_[s + 1];
  for (std::size_t v = 0; v < n; ++v) g.offsets_[v + 1] += g.offsets_[v];
  g.adjacency_.reserve(pairs.size());
  for (auto [s, t] : pairs) g.adjacency_.push_back(t);
  return g;
}

std::size_t Graph::degree(NodeId v) const {
  if (v >= num_nodes()) throw std::out_of_range("node index " + std::to_string(v) + " out of range");
  return offsets_[v + 1] - offsets_[v];
}

std::span<const NodeId> Graph::neighbors(NodeId v) const {
  if (v >= num_nodes()) throw std::out_of_range("node index " + std::to_string(v) + " out of range");
  return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

void Graph::write_edge_list(std::ostream& out) const {
  for (NodeId v = 0; v < num_nodes(); ++v) {
    auto adj = neighbors(v);
    if (adj.empty()) out << name(v) << '\t' << name(v) << '\n';
    for (NodeId u : adj) {
      if (u > v) out << name(v) << '\t' << name(u) << '\n';
    }
  }
}

Graph load_edge_list(const std::filesystem::path& path, std::size_t min_degree, bool symmetrize) {
  return Graph::from_edges(load_directed(path, min_degree), symmetrize);
}

}  // namespace demograph
