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

#include "demograph/embed.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace demograph {

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigma(x)) without overflow.
double log_sigmoid(double x) { return std::min(x, 0.0) - std::log1p(std::exp(-std::abs(x))); }

}  // namespace

std::size_t SentenceCorpus::word_count() const {
  std::size_t total = 0;
  for (const auto& s : sentences) total += s.size();
  return total;
}

void SentenceCorpus::write(std::ostream& out) const {
  for (const auto& s : sentences) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out << ' ';
      out << tokens[s[i]];
    }
    out << '\n';
  }
}

SentenceCorpus SentenceCorpus::read(std::istream& in) {
  SentenceCorpus corpus;
  NodeTable table;
  std::string line, token;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::vector<std::uint32_t> sentence;
    while (words >> token) sentence.push_back(table.intern(token));
    if (!sentence.empty()) corpus.sentences.push_back(std::move(sentence));
  }
  corpus.tokens = table.names();
  return corpus;
}

SentenceCorpus build_sentences(const EdgeList& edges, std::uint64_t rng_seed, bool bidirectional) {
  SentenceCorpus corpus;
  corpus.tokens = edges.nodes.names();
  corpus.rng_seed = rng_seed;
  const auto adjacency = edges.out_adjacency(bidirectional);
  for (NodeId v = 0; v < adjacency.size(); ++v) {
    if (adjacency[v].empty()) continue;
    std::vector<std::uint32_t> sentence;
    sentence.reserve(adjacency[v].size() + 1);
    sentence.push_back(v);
    sentence.insert(sentence.end(), adjacency[v].begin(), adjacency[v].end());
    // Per-node stream so that sentences can be generated independently.
    Rng rng(splitmix64(rng_seed ^ splitmix64(v)));
    rng.shuffle(sentence);
    corpus.sentences.push_back(std::move(sentence));
  }
  return corpus;
}

EmbedMode parse_embed_mode(std::string_view name) {
  if (name == "skipgram" || name == "skip-gram") return EmbedMode::skipgram;
  if (name == "cbow") return EmbedMode::cbow;
  throw ConfigError("unknown embedding mode '" + std::string(name) + "' (expected skipgram|cbow)");
}

TrainConfig TrainConfig::cbow() {
  TrainConfig cfg;
  cfg.mode = EmbedMode::cbow;
  cfg.window = 6;
  return cfg;
}

void TrainConfig::validate() const {
  if (dim < 1) throw ConfigError("embedding dimension must be >= 1");
  if (window < 1) throw ConfigError("window must be >= 1");
  if (negatives < 1) throw ConfigError("negatives must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (min_count < 1) throw ConfigError("min-count must be >= 1");
  if (!(learning_rate > 0)) throw ConfigError("learning rate must be positive");
  if (subsample < 0) throw ConfigError("subsample threshold must be >= 0");
}

EmbeddingTable::EmbeddingTable(std::vector<std::string> tokens, std::vector<std::uint64_t> counts,
                               RowMatrixXd vectors)
    : tokens_(std::move(tokens)), counts_(std::move(counts)), vectors_(std::move(vectors)) {
  if (counts_.size() != tokens_.size() || Eigen::Index(tokens_.size()) != vectors_.rows()) {
    throw ShapeError("embedding table: token, count and vector rows disagree");
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], Eigen::Index(i));
}

std::optional<Eigen::Index> EmbeddingTable::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void EmbeddingTable::write_word2vec(std::ostream& out) const {
  out << size() << ' ' << dim() << '\n';
  for (std::size_t i = 0; i < size(); ++i) {
    out << tokens_[i];
    for (Eigen::Index c = 0; c < vectors_.cols(); ++c) out << ' ' << format_real(vectors_(Eigen::Index(i), c));
    out << '\n';
  }
}

EmbeddingTable EmbeddingTable::read_word2vec(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing header");
  std::istringstream header(line);
  std::size_t rows = 0;
  int dim = 0;
  if (!(header >> rows >> dim) || dim < 1) throw ParseError(source, 1, "expected '<vocab-size> <dim>'");

  std::vector<std::string> tokens;
  RowMatrixXd vectors(Eigen::Index(rows), dim);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) throw ParseError(source, r + 2, "truncated table");
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    for (int c = 0; c < dim; ++c) {
      if (!(fields >> vectors(Eigen::Index(r), c))) throw ParseError(source, r + 2, "short vector");
    }
    tokens.push_back(std::move(token));
  }
  return EmbeddingTable(std::move(tokens), std::vector<std::uint64_t>(rows, 0), std::move(vectors));
}

FeatureBlock EmbeddingTable::to_feature_block(std::span<const std::string> nodes) const {
  FeatureBlock block;
  block.name = "emb";
  for (int c = 0; c < dim(); ++c) block.columns.push_back("emb_" + std::to_string(c));
  std::vector<Eigen::Index> rows;
  for (const auto& name : nodes) {
    if (auto r = find(name)) {
      block.nodes.push_back(name);
      rows.push_back(*r);
    }
  }
  block.values.resize(Eigen::Index(rows.size()), dim());
  for (std::size_t i = 0; i < rows.size(); ++i) block.values.row(Eigen::Index(i)) = vectors_.row(rows[i]);
  return block;
}

namespace sgns {

double loss(const Eigen::Ref<const Eigen::RowVectorXd>& h, const RowMatrixXd& out, Eigen::Index positive,
            std::span<const Eigen::Index> negatives) {
  double total = -log_sigmoid(h.dot(out.row(positive)));
  for (Eigen::Index n : negatives) total -= log_sigmoid(-h.dot(out.row(n)));
  return total;
}

void gradient(const Eigen::Ref<const Eigen::RowVectorXd>& h, const RowMatrixXd& out, Eigen::Index positive,
              std::span<const Eigen::Index> negatives, Eigen::RowVectorXd& grad_h, RowMatrixXd& grad_out) {
  grad_h = Eigen::RowVectorXd::Zero(h.size());
  grad_out = RowMatrixXd::Zero(out.rows(), out.cols());
  const double gp = sigmoid(h.dot(out.row(positive))) - 1.0;
  grad_h += gp * out.row(positive);
  grad_out.row(positive) += gp * h;
  for (Eigen::Index n : negatives) {
    const double gn = sigmoid(h.dot(out.row(n)));
    grad_h += gn * out.row(n);
    grad_out.row(n) += gn * h;
  }
}

void step(const Eigen::Ref<const Eigen::RowVectorXd>& h, RowMatrixXd& out, Eigen::Index positive,
          std::span<const Eigen::Index> negatives, double rate, Eigen::Ref<Eigen::RowVectorXd> h_update) {
  auto update = [&](Eigen::Index target, double label) {
    const double g = (label - sigmoid(h.dot(out.row(target)))) * rate;
    h_update += g * out.row(target);
    out.row(target) += g * h;
  };
  update(positive, 1.0);
  for (Eigen::Index n : negatives) {
    if (n != positive) update(n, 0.0);
  }
}

}  // namespace sgns

namespace {

class NoiseSampler {
 public:
  explicit NoiseSampler(const std::vector<std::uint64_t>& counts) {
    cumulative_.reserve(counts.size());
    double total = 0;
    for (auto c : counts) {
      total += std::pow(double(c), 0.75);
      cumulative_.push_back(total);
    }
  }

  Eigen::Index draw(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return Eigen::Index(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

}  // namespace

EmbeddingTable train_embeddings(const SentenceCorpus& corpus, const TrainConfig& cfg) {
  cfg.validate();
  if (corpus.sentences.empty()) throw TrainingError("empty corpus");

  std::vector<std::uint64_t> token_counts(corpus.tokens.size(), 0);
  for (const auto& s : corpus.sentences) {
    for (auto t : s) ++token_counts[t];
  }
  std::vector<std::uint32_t> vocab;
  for (std::uint32_t t = 0; t < token_counts.size(); ++t) {
    if (token_counts[t] >= std::uint64_t(cfg.min_count)) vocab.push_back(t);
  }
  if (vocab.empty()) throw TrainingError("vocabulary is empty after min-count filtering");
  std::sort(vocab.begin(), vocab.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (token_counts[a] != token_counts[b]) return token_counts[a] > token_counts[b];
    return corpus.tokens[a] < corpus.tokens[b];
  });

  std::vector<Eigen::Index> to_vocab(corpus.tokens.size(), -1);
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> counts;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    to_vocab[vocab[i]] = Eigen::Index(i);
    tokens.push_back(corpus.tokens[vocab[i]]);
    counts.push_back(token_counts[vocab[i]]);
  }

  std::vector<std::vector<Eigen::Index>> sentences;
  std::uint64_t train_words = 0;
  for (const auto& s : corpus.sentences) {
    std::vector<Eigen::Index> kept;
    for (auto t : s) {
      if (to_vocab[t] >= 0) kept.push_back(to_vocab[t]);
    }
    train_words += kept.size();
    if (kept.size() > 1) sentences.push_back(std::move(kept));
  }

  const Eigen::Index v = Eigen::Index(vocab.size());
  const int d = cfg.dim;
  Rng rng(cfg.rng_seed);
  RowMatrixXd input(v, d);
  for (Eigen::Index r = 0; r < v; ++r) {
    for (int c = 0; c < d; ++c) input(r, c) = (rng.uniform() - 0.5) / d;
  }
  RowMatrixXd output = RowMatrixXd::Zero(v, d);

  const NoiseSampler noise(counts);
  const double total_steps = double(cfg.epochs) * double(train_words) + 1.0;
  const double sample_scale = cfg.subsample * double(train_words);
  std::uint64_t processed = 0;
  std::vector<Eigen::Index> negatives(std::size_t(cfg.negatives));
  std::vector<Eigen::Index> window_words;
  Eigen::RowVectorXd h(d), h_update(d);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const auto& sentence : sentences) {
      window_words.clear();
      for (Eigen::Index w : sentence) {
        if (sample_scale > 0) {
          const double f = double(counts[std::size_t(w)]);
          const double keep = (std::sqrt(f / sample_scale) + 1.0) * sample_scale / f;
          if (keep < rng.uniform()) continue;
        }
        window_words.push_back(w);
      }
      const auto len = std::ptrdiff_t(window_words.size());
      for (std::ptrdiff_t pos = 0; pos < len; ++pos) {
        const double rate =
            cfg.learning_rate * std::max(cfg.min_rate_fraction, 1.0 - double(processed) / total_steps);
        ++processed;
        const Eigen::Index center = window_words[std::size_t(pos)];
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, pos - cfg.window);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len - 1, pos + cfg.window);

        if (cfg.mode == EmbedMode::skipgram) {
          for (std::ptrdiff_t o = lo; o <= hi; ++o) {
            if (o == pos) continue;
            for (auto& n : negatives) n = noise.draw(rng);
            h_update.setZero();
            sgns::step(input.row(center), output, window_words[std::size_t(o)], negatives, rate, h_update);
            input.row(center) += h_update;
          }
        } else {
          if (hi == lo) continue;
          h.setZero();
          for (std::ptrdiff_t o = lo; o <= hi; ++o) {
            if (o != pos) h += input.row(window_words[std::size_t(o)]);
          }
          h /= double(hi - lo);
          for (auto& n : negatives) n = noise.draw(rng);
          h_update.setZero();
          sgns::step(h, output, center, negatives, rate, h_update);
          for (std::ptrdiff_t o = lo; o <= hi; ++o) {
            if (o != pos) input.row(window_words[std::size_t(o)]) += h_update;
          }
        }
      }
    }
  }
  return EmbeddingTable(std::move(tokens), std::move(counts), std::move(input));
}

std::optional<Eigen::VectorXd> coldstart_embedding(const Graph& g, const EmbeddingTable& table, NodeId v) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(table.dim());
  std::size_t count = 0;
  for (NodeId u : g.neighbors(v)) {
    if (auto row = table.find(g.name(u))) {
      sum += table.vector(*row).transpose();
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return Eigen::VectorXd(sum / double(count));
}

EmbeddingTable coldstart_fill(const Graph& g, const EmbeddingTable& table) {
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> counts;
  std::vector<Eigen::VectorXd> rows;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (auto row = table.find(g.name(v))) {
      tokens.push_back(g.name(v));
      counts.push_back(table.counts()[std::size_t(*row)]);
      rows.emplace_back(table.vector(*row).transpose());
    } else if (auto filled = coldstart_embedding(g, table, v)) {
      tokens.push_back(g.name(v));
      counts.push_back(0);
      rows.push_back(std::move(*filled));
    }
  }
  RowMatrixXd vectors(Eigen::Index(rows.size()), table.dim());
  for (std::size_t i = 0; i < rows.size(); ++i) vectors.row(Eigen::Index(i)) = rows[i].transpose();
  return EmbeddingTable(std::move(tokens), std::move(counts), std::move(vectors));
}

}  // namespace demograph
