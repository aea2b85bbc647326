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

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "demograph/common.hpp"

namespace demograph {

// Bijection between external node names and contiguous dense indices.
class NodeTable {
 public:
  NodeId intern(std::string_view name);
  std::optional<NodeId> find(std::string_view name) const;
  const std::string& name(NodeId v) const { return names_.at(v); }
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  void write_mapping(std::ostream& out) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId> index_;
};

// Raw follow relation: deduplicated directed arcs, self-loops removed,
// sorted by (source, target).
struct EdgeList {
  NodeTable nodes;
  std::vector<std::pair<NodeId, NodeId>> arcs;

  // Out-neighbour lists, optionally merged with in-neighbours.
  std::vector<std::vector<NodeId>> out_adjacency(bool bidirectional = false) const;
};

// Parses `<src> <dst>` lines. Lines starting with '#' and blank lines are
// skipped. With min_degree > 0 every node whose out-degree in the input is
// below the threshold is dropped together with its arcs, and survivors are
// re-interned in first-appearance order.
EdgeList read_edge_list(std::istream& in, std::size_t min_degree = 0,
                        const std::string& source = "<stream>");
EdgeList load_directed(const std::filesystem::path& path, std::size_t min_degree = 0);

// Immutable undirected graph in CSR layout.
class Graph {
 public:
  Graph() = default;

  // symmetrize=false requires every arc's reverse to be present already.
  static Graph from_edges(EdgeList edges, bool symmetrize = true);

  std::size_t num_nodes() const noexcept { return nodes_.size(); }
  std::size_t num_edges() const noexcept { return adjacency_.size() / 2; }
  std::size_t degree(NodeId v) const;
  std::span<const NodeId> neighbors(NodeId v) const;

  const NodeTable& nodes() const noexcept { return nodes_; }
  const std::string& name(NodeId v) const { return nodes_.name(v); }
  std::optional<NodeId> find(std::string_view name) const { return nodes_.find(name); }

  // Writes each undirected edge once; isolated nodes are written as
  // self-loops so that reloading reproduces the node set.
  void write_edge_list(std::ostream& out) const;

 private:
  NodeTable nodes_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> adjacency_;
};

Graph load_edge_list(const std::filesystem::path& path, std::size_t min_degree = 0,
                     bool symmetrize = true);

}  // namespace demograph
