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

// Node embeddings from one-hop "sentences": each node followed by every
// node it follows, in a seeded random order. Vectors are trained with
// word2vec-style negative sampling (skip-gram or CBOW).

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "demograph/graph.hpp"
#include "demograph/io.hpp"

namespace demograph {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct SentenceCorpus {
  std::vector<std::string> tokens;  // token id -> external name
  std::vector<std::vector<std::uint32_t>> sentences;
  std::uint64_t rng_seed = 0;

  std::size_t word_count() const;
  // One sentence per line, space-separated names.
  void write(std::ostream& out) const;
  static SentenceCorpus read(std::istream& in);
};

// One sentence per node with at least one followed node. With
// bidirectional, followers are included too.
SentenceCorpus build_sentences(const EdgeList& edges, std::uint64_t rng_seed, bool bidirectional = false);

enum class EmbedMode { skipgram, cbow };

EmbedMode parse_embed_mode(std::string_view name);

struct TrainConfig {
  EmbedMode mode = EmbedMode::skipgram;
  int dim = 50;
  int window = 5;
  int negatives = 5;
  double learning_rate = 0.025;
  double min_rate_fraction = 1e-4;  // linear decay floor, relative to learning_rate
  int epochs = 5;
  int min_count = 5;
  double subsample = 0.0;  // word2vec `sample`; 0 disables
  std::uint64_t rng_seed = 1;

  static TrainConfig cbow();  // window 6
  void validate() const;
};

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::vector<std::string> tokens, std::vector<std::uint64_t> counts, RowMatrixXd vectors);

  int dim() const noexcept { return int(vectors_.cols()); }
  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  const RowMatrixXd& vectors() const noexcept { return vectors_; }
  std::optional<Eigen::Index> find(std::string_view token) const;
  auto vector(Eigen::Index row) const { return vectors_.row(row); }

  // word2vec text format: `<vocab> <dim>` then `<token> <v1> ... <vd>`.
  void write_word2vec(std::ostream& out) const;
  static EmbeddingTable read_word2vec(std::istream& in, const std::string& source = "<stream>");

  // Feature block over the given node names; rows missing from the table
  // are skipped. Columns are emb_0..emb_{d-1}.
  FeatureBlock to_feature_block(std::span<const std::string> nodes) const;

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  RowMatrixXd vectors_;
  std::unordered_map<std::string, Eigen::Index> index_;
};

EmbeddingTable train_embeddings(const SentenceCorpus& corpus, const TrainConfig& cfg);

// Mean of the neighbours' vectors that exist in the table, or nullopt.
std::optional<Eigen::VectorXd> coldstart_embedding(const Graph& g, const EmbeddingTable& table, NodeId v);

// Table covering every graph node that is embedded or has an embedded
// neighbour. One round only: filled vectors never feed other fills.
EmbeddingTable coldstart_fill(const Graph& g, const EmbeddingTable& table);

namespace sgns {

// Negative-sampling loss for a hidden vector h against one positive output
// row and a set of negative rows:
//   -log sigma(h . out[positive]) - sum_n log sigma(-h . out[n])
double loss(const Eigen::Ref<const Eigen::RowVectorXd>& h, const RowMatrixXd& out, Eigen::Index positive,
            std::span<const Eigen::Index> negatives);

// Analytic gradient of `loss` with respect to h and to the full output
// matrix (rows not involved are zero).
void gradient(const Eigen::Ref<const Eigen::RowVectorXd>& h, const RowMatrixXd& out, Eigen::Index positive,
              std::span<const Eigen::Index> negatives, Eigen::RowVectorXd& grad_h, RowMatrixXd& grad_out);

// One word2vec update at the given rate. Output rows are updated in place
// and the step for h is accumulated into h_update (applied by the caller).
// Negatives equal to the positive are skipped.
void step(const Eigen::Ref<const Eigen::RowVectorXd>& h, RowMatrixXd& out, Eigen::Index positive,
          std::span<const Eigen::Index> negatives, double rate, Eigen::Ref<Eigen::RowVectorXd> h_update);

}  // namespace sgns

}  // namespace demograph
