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

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "demograph/embed.hpp"
#include "oracles.hpp"

namespace demograph {
namespace {

EdgeList edges_of(const std::string& text) {
  std::istringstream in(text);
  return read_edge_list(in);
}

std::string corpus_text(const SentenceCorpus& c) {
  std::ostringstream out;
  c.write(out);
  return out.str();
}

// Complete directed cliques "a0..a{n-1}" and "b0..b{n-1}".
EdgeList two_cliques(int n) {
  std::string text;
  for (char side : {'a', 'b'}) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j) text += std::string(1, side) + std::to_string(i) + " " + side + std::to_string(j) + "\n";
      }
    }
  }
  return edges_of(text);
}

double cosine(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) { return a.dot(b) / (a.norm() * b.norm()); }

TEST(Sentences, FocusPlusFollowed) {
  const auto edges = edges_of("X A\nX B\nA B\n");
  const auto corpus = build_sentences(edges, 7);
  ASSERT_EQ(corpus.sentences.size(), 2u);  // B follows nobody
  std::vector<std::string> first;
  for (auto t : corpus.sentences[0]) first.push_back(corpus.tokens[t]);
  std::sort(first.begin(), first.end());
  EXPECT_EQ(first, (std::vector<std::string>{"A", "B", "X"}));
  EXPECT_EQ(corpus.sentences[1].size(), 2u);
}

TEST(Sentences, SeededPermutation) {
  const auto edges = edges_of("X A\nX B\nX C\nX D\nX E\nX F\n");
  const auto a = build_sentences(edges, 1);
  EXPECT_EQ(corpus_text(a), corpus_text(build_sentences(edges, 1)));
  bool differs = false;
  for (std::uint64_t s = 2; s < 10 && !differs; ++s) differs = corpus_text(build_sentences(edges, s)) != corpus_text(a);
  EXPECT_TRUE(differs);
}

TEST(Sentences, LengthIdentity) {
  Rng rng(4);
  std::string text;
  for (int e = 0; e < 300; ++e) text += "v" + std::to_string(rng.below(60)) + " v" + std::to_string(rng.below(60)) + "\n";
  const auto edges = edges_of(text);
  const auto out = edges.out_adjacency();
  std::size_t expected = 0;
  for (const auto& a : out) expected += a.empty() ? 0 : a.size() + 1;
  const auto corpus = build_sentences(edges, 3);
  EXPECT_EQ(corpus.word_count(), expected);
  for (const auto& s : corpus.sentences) {
    auto sorted = s;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
  }
}

TEST(Sentences, BidirectionalIncludesFollowers) {
  const auto edges = edges_of("X A\nY X\n");
  EXPECT_EQ(build_sentences(edges, 1).word_count(), 4u);  // X A | Y X
  const auto both = build_sentences(edges, 1, true);
  EXPECT_EQ(both.sentences.size(), 3u);  // A now has a sentence via its follower
}

TEST(Sentences, TextRoundTrip) {
  const auto corpus = build_sentences(two_cliques(4), 2);
  std::istringstream in(corpus_text(corpus));
  EXPECT_EQ(corpus_text(SentenceCorpus::read(in)), corpus_text(corpus));
}

TEST(Sgns, GradientMatchesFiniteDifferences) {
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 6;
    RowMatrixXd out(5, d);
    for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = rng.normal() * 0.5;
    Eigen::RowVectorXd h(d);
    for (int i = 0; i < d; ++i) h(i) = rng.normal() * 0.5;
    const std::vector<Eigen::Index> negs{1, 3, 4};

    Eigen::RowVectorXd grad_h;
    RowMatrixXd grad_out;
    sgns::gradient(h, out, 0, negs, grad_h, grad_out);

    auto f_h = [&](const Eigen::VectorXd& x) { return sgns::loss(x.transpose(), out, 0, negs); };
    const Eigen::VectorXd num_h = oracle::numeric_gradient(f_h, h.transpose());
    EXPECT_LE(oracle::relative_error(grad_h.transpose(), num_h), 1e-6);

    auto f_out = [&](const Eigen::VectorXd& x) {
      RowMatrixXd o = Eigen::Map<const RowMatrixXd>(x.data(), out.rows(), out.cols());
      return sgns::loss(h, o, 0, negs);
    };
    const Eigen::VectorXd flat = Eigen::Map<const Eigen::VectorXd>(out.data(), out.size());
    const Eigen::VectorXd num_out = oracle::numeric_gradient(f_out, flat);
    const Eigen::VectorXd ana_out = Eigen::Map<const Eigen::VectorXd>(grad_out.data(), grad_out.size());
    EXPECT_LE(oracle::relative_error(ana_out, num_out), 1e-6);
  }
}

TEST(Sgns, SingleStepHandTrace) {
  // One positive (row 1) and one negative (row 0), rate 0.025.
  const double rate = 0.025;
  Eigen::RowVectorXd h(2);
  h << 0.1, -0.2;
  RowMatrixXd out(2, 2);
  out << 0.3, 0.4, -0.5, 0.2;
  const Eigen::RowVectorXd pos0 = out.row(1), neg0 = out.row(0);

  const double sp = 1.0 / (1.0 + std::exp(-(0.1 * -0.5 + -0.2 * 0.2)));
  const double sn = 1.0 / (1.0 + std::exp(-(0.1 * 0.3 + -0.2 * 0.4)));
  const double gp = (1.0 - sp) * rate;
  const double gn = (0.0 - sn) * rate;

  Eigen::RowVectorXd h_update = Eigen::RowVectorXd::Zero(2);
  const std::vector<Eigen::Index> negs{0};
  sgns::step(h, out, 1, negs, rate, h_update);

  EXPECT_NEAR(h_update(0), gp * pos0(0) + gn * neg0(0), 1e-12);
  EXPECT_NEAR(h_update(1), gp * pos0(1) + gn * neg0(1), 1e-12);
  EXPECT_NEAR(out(1, 0), pos0(0) + gp * h(0), 1e-12);
  EXPECT_NEAR(out(1, 1), pos0(1) + gp * h(1), 1e-12);
  EXPECT_NEAR(out(0, 0), neg0(0) + gn * h(0), 1e-12);
  EXPECT_NEAR(out(0, 1), neg0(1) + gn * h(1), 1e-12);

  // The step is plain gradient descent on the loss.
  RowMatrixXd before(2, 2);
  before << 0.3, 0.4, -0.5, 0.2;
  Eigen::RowVectorXd grad_h;
  RowMatrixXd grad_out;
  sgns::gradient(h, before, 1, negs, grad_h, grad_out);
  EXPECT_NEAR((h_update + rate * grad_h).norm(), 0.0, 1e-15);
  EXPECT_NEAR((out - before + rate * grad_out).norm(), 0.0, 1e-15);
}

TEST(Sgns, NegativeEqualToPositiveIsSkipped) {
  Eigen::RowVectorXd h(2);
  h << 0.1, 0.2;
  RowMatrixXd a(2, 2), b(2, 2);
  a << 0.1, 0.1, 0.2, 0.2;
  b = a;
  Eigen::RowVectorXd ua = Eigen::RowVectorXd::Zero(2), ub = ua;
  const std::vector<Eigen::Index> with_self{1}, none{};
  sgns::step(h, a, 1, with_self, 0.1, ua);
  sgns::step(h, b, 1, none, 0.1, ub);
  EXPECT_EQ(a, b);
  EXPECT_EQ(ua, ub);
}

TEST(Train, VocabularyRespectsMinCount) {
  // t appears 4 times, u and v 5 times each.
  std::istringstream in("t u v\nt u v\nt u v\nt u v\nu v\n");
  TrainConfig cfg;
  cfg.dim = 4;
  cfg.epochs = 1;
  const auto table = train_embeddings(SentenceCorpus::read(in), cfg);
  EXPECT_FALSE(table.find("t").has_value());
  ASSERT_TRUE(table.find("u").has_value());
  for (auto c : table.counts()) EXPECT_GE(c, 5u);
  EXPECT_EQ(table.tokens(), (std::vector<std::string>{"u", "v"}));
  EXPECT_TRUE(table.vectors().allFinite());
}

TEST(Train, Errors) {
  SentenceCorpus empty;
  EXPECT_THROW(train_embeddings(empty, TrainConfig{}), TrainingError);
  TrainConfig bad;
  bad.window = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = TrainConfig{};
  bad.negatives = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  EXPECT_EQ(TrainConfig::cbow().window, 6);
  EXPECT_EQ(TrainConfig{}.window, 5);
  EXPECT_THROW(parse_embed_mode("glove"), ConfigError);
}

TEST(Train, Deterministic) {
  const auto corpus = build_sentences(two_cliques(8), 1);
  for (auto mode : {EmbedMode::skipgram, EmbedMode::cbow}) {
    TrainConfig cfg;
    cfg.mode = mode;
    cfg.dim = 8;
    cfg.min_count = 1;
    cfg.subsample = mode == EmbedMode::cbow ? 1e-2 : 0.0;
    std::ostringstream a, b;
    train_embeddings(corpus, cfg).write_word2vec(a);
    train_embeddings(corpus, cfg).write_word2vec(b);
    EXPECT_EQ(a.str(), b.str());
  }
}

struct CliqueScores {
  double intra = 0, inter = 0;
};

CliqueScores clique_cosines(const EmbeddingTable& t, int n) {
  CliqueScores s;
  int ni = 0, nx = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      auto ai = t.vector(*t.find("a" + std::to_string(i)));
      auto aj = t.vector(*t.find("a" + std::to_string(j)));
      auto bi = t.vector(*t.find("b" + std::to_string(i)));
      auto bj = t.vector(*t.find("b" + std::to_string(j)));
      if (i != j) {
        s.intra += cosine(ai, aj) + cosine(bi, bj);
        ni += 2;
      }
      s.inter += cosine(ai, bj);
      ++nx;
    }
  }
  s.intra /= ni;
  s.inter /= nx;
  return s;
}

TEST(Train, TwoCliquesSeparate) {
  const auto corpus = build_sentences(two_cliques(20), 5);
  for (auto mode : {EmbedMode::skipgram, EmbedMode::cbow}) {
    TrainConfig cfg = mode == EmbedMode::cbow ? TrainConfig::cbow() : TrainConfig{};
    cfg.dim = 8;
    cfg.epochs = 5;
    const auto s = clique_cosines(train_embeddings(corpus, cfg), 20);
    EXPECT_GT(s.intra, s.inter) << (mode == EmbedMode::cbow ? "cbow" : "skipgram");
  }
}

TEST(Coldstart, NeighbourMean) {
  std::istringstream in("x a\nx b\ny a\nz q\n");
  const Graph g = Graph::from_edges(read_edge_list(in));
  RowMatrixXd vecs(2, 2);
  vecs << 1.0, 2.0, 3.0, 6.0;
  const EmbeddingTable table({"a", "b"}, {5, 5}, vecs);

  const auto x = coldstart_embedding(g, table, *g.find("x"));
  ASSERT_TRUE(x.has_value());
  EXPECT_EQ(*x, (Eigen::VectorXd(2) << 2.0, 4.0).finished());
  const auto y = coldstart_embedding(g, table, *g.find("y"));
  EXPECT_EQ(*y, (Eigen::VectorXd(2) << 1.0, 2.0).finished());
  EXPECT_FALSE(coldstart_embedding(g, table, *g.find("z")).has_value());

  const auto filled = coldstart_fill(g, table);
  EXPECT_TRUE(filled.find("x").has_value());
  EXPECT_TRUE(filled.find("a").has_value());
  EXPECT_FALSE(filled.find("z").has_value());
  EXPECT_FALSE(filled.find("q").has_value());
}

TEST(Coldstart, OneRoundOnly) {
  // c's only neighbour b is itself cold, so c stays absent.
  std::istringstream in("a b\nb c\n");
  const Graph g = Graph::from_edges(read_edge_list(in));
  RowMatrixXd vecs(1, 2);
  vecs << 1.0, 1.0;
  const auto filled = coldstart_fill(g, EmbeddingTable({"a"}, {5}, vecs));
  EXPECT_TRUE(filled.find("b").has_value());
  EXPECT_FALSE(filled.find("c").has_value());
}

TEST(EmbeddingTable, Word2vecRoundTripAndFeatures) {
  RowMatrixXd vecs(2, 3);
  vecs << 0.1, 0.2, 1.0 / 3.0, -1e-9, 5.0, 6.0;
  const EmbeddingTable t({"p", "q"}, {1, 1}, vecs);
  std::stringstream text;
  t.write_word2vec(text);
  EXPECT_EQ(text.str().substr(0, 4), "2 3\n");
  const auto back = EmbeddingTable::read_word2vec(text);
  EXPECT_EQ(back.vectors(), vecs);
  EXPECT_EQ(back.tokens(), t.tokens());

  const std::vector<std::string> names{"q", "missing", "p"};
  const auto block = t.to_feature_block(names);
  EXPECT_EQ(block.nodes, (std::vector<std::string>{"q", "p"}));
  EXPECT_EQ(block.columns, (std::vector<std::string>{"emb_0", "emb_1", "emb_2"}));
  EXPECT_EQ(block.values(0, 1), 5.0);

  std::istringstream truncated("3 2\na 1 2\n");
  EXPECT_THROW(EmbeddingTable::read_word2vec(truncated), ParseError);
}

}  // namespace
}  // namespace demograph
