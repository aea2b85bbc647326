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

// demograph: command-line front end. Exit codes: 0 success, 1 validation or
// configuration error, 2 runtime error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "demograph/embed.hpp"
#include "demograph/experiment.hpp"
#include "demograph/graph.hpp"
#include "demograph/io.hpp"
#include "demograph/labelprop.hpp"
#include "demograph/lpfeatures.hpp"
#include "demograph/model.hpp"
#include "demograph/synth.hpp"

namespace {

using namespace demograph;

constexpr const char* kVersion = "demograph 0.1.0";

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeError("cannot write " + path);
  return out;
}

// Writes to `path`, or to stdout when the path is empty or "-".
template <class Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
  } else {
    auto out = open_out(path);
    fn(out);
  }
}

LabelKind label_kind(const std::string& task, bool raw_age) {
  if (task == "gender") return LabelKind::binary;
  if (task == "age") return raw_age ? LabelKind::raw_age : LabelKind::age_bucket;
  throw ConfigError("task must be gender or age");
}

void print_metrics(const Metrics& m) {
  std::cout << format_report({RegimeReport{"model", m, 0, m.rows}});
  std::printf("%-14s %s\n", "auc", m.auc ? format_real(*m.auc).c_str() : "undefined");
  std::printf("%-14s %.6f\n", "accuracy", m.accuracy);
  std::printf("%-14s %.6f\n", "cross_entropy", m.cross_entropy);
  std::printf("%-14s %zu\n", "rows", m.rows);
}

struct Labeled {
  std::vector<std::size_t> rows;
  std::vector<int> labels;
};

// Rows of `f` that carry a label, in feature order.
Labeled attach_labels(const FeatureMatrix& f, const std::vector<LabelEntry>& entries, LabelKind kind) {
  std::unordered_map<std::string, int> by_name;
  for (const auto& e : entries) by_name.try_emplace(e.node, label_class(e.value, kind));
  Labeled out;
  for (std::size_t r = 0; r < f.nodes.size(); ++r) {
    if (auto it = by_name.find(f.nodes[r]); it != by_name.end()) {
      out.rows.push_back(r);
      out.labels.push_back(it->second);
    }
  }
  if (out.rows.empty()) throw JoinError("no feature row has a label");
  return out;
}

FeatureMatrix load_features(const std::string& list) {
  std::vector<FeatureBlock> blocks;
  std::stringstream ss(list);
  std::string path;
  while (std::getline(ss, path, ',')) {
    if (path.empty()) continue;
    auto stem = std::filesystem::path(path).stem().string();
    blocks.push_back(read_feature_csv(path, stem));
  }
  if (blocks.empty()) throw ConfigError("no feature files given");
  auto f = join_features(blocks, {});
  for (const auto& b : f.blocks) {
    if (b.dropped) std::cerr << "join: dropped " << b.dropped << " rows of block '" << b.name << "'\n";
  }
  return f;
}

std::vector<int> parse_hidden(const std::string& text) {
  std::vector<int> hidden;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) hidden.push_back(std::stoi(item));
  }
  return hidden;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-based demographic inference: label propagation, embeddings and classifiers"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto add = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->set_version_flag("--version", kVersion);
    return sub;
  };

  // ingest
  std::string graph_path, map_out, edges_out;
  std::size_t min_degree = 0;
  auto* ingest = add("ingest", "Load an edge list, report its shape, export the node mapping");
  ingest->add_option("--graph", graph_path, "Edge list (<src> <dst> per line)")->required();
  ingest->add_option("--min-degree", min_degree, "Drop nodes with out-degree below this");
  ingest->add_option("--map-out", map_out, "Write <index>\\t<name> mapping here");
  ingest->add_option("--edges-out", edges_out, "Write the cleaned undirected edge list here");

  // propagate
  std::string seeds_path, out_path, strategy = "alpha";
  PropagationConfig prop;
  int prop_classes = 1;
  bool raw_age = false, emit_inactive = false;
  auto* propagate_cmd = add("propagate", "Run bulk-synchronous label propagation");
  propagate_cmd->add_option("--graph", graph_path, "Edge list")->required();
  propagate_cmd->add_option("--seeds", seeds_path, "Seed labels (<name>\\t<value>)")->required();
  propagate_cmd->add_option("--strategy", strategy, "alpha|beta|gamma")->capture_default_str();
  propagate_cmd->add_option("--alpha", prop.alpha, "Own-value weight")->capture_default_str();
  propagate_cmd->add_option("--beta", prop.beta, "Beta decay base")->capture_default_str();
  propagate_cmd->add_option("--gamma", prop.gamma, "Gamma accumulation weight")->capture_default_str();
  propagate_cmd->add_option("--iters", prop.iterations, "Supersteps K")->capture_default_str();
  propagate_cmd->add_option("--classes", prop_classes, "1 (binary) or 7 (age buckets)")->capture_default_str();
  propagate_cmd->add_flag("--raw-age", raw_age, "Seed values are ages in years");
  propagate_cmd->add_flag("--emit-inactive", emit_inactive, "Write unreached nodes as NA");
  propagate_cmd->add_option("--workers", prop.workers, "Worker threads")->capture_default_str();
  propagate_cmd->add_option("--min-degree", min_degree, "Drop nodes with out-degree below this");
  propagate_cmd->add_option("--out", out_path, "Output file (default stdout)");

  // lp-features
  int splits = 3;
  std::uint64_t rng_seed = 0;
  auto* lpf = add("lp-features", "Ensemble label-propagation features");
  lpf->add_option("--graph", graph_path, "Edge list")->required();
  lpf->add_option("--seeds", seeds_path, "Seed labels")->required();
  lpf->add_option("--splits", splits, "Partition count N")->capture_default_str();
  lpf->add_option("--rng-seed", rng_seed, "Partition seed")->capture_default_str();
  lpf->add_option("--strategy", strategy, "alpha|beta|gamma")->capture_default_str();
  lpf->add_option("--iters", prop.iterations, "Supersteps K")->capture_default_str();
  lpf->add_option("--alpha", prop.alpha, "Own-value weight")->capture_default_str();
  lpf->add_option("--beta", prop.beta, "Beta decay base")->capture_default_str();
  lpf->add_option("--gamma", prop.gamma, "Gamma accumulation weight")->capture_default_str();
  lpf->add_option("--classes", prop_classes, "1 (binary) or 7 (age buckets)")->capture_default_str();
  lpf->add_flag("--raw-age", raw_age, "Seed values are ages in years");
  lpf->add_option("--workers", prop.workers, "Worker threads")->capture_default_str();
  lpf->add_option("--min-degree", min_degree, "Drop nodes with out-degree below this");
  lpf->add_option("--out", out_path, "Output CSV (default stdout)");

  // sentences
  bool bidirectional = false;
  auto* sentences = add("sentences", "Build one-hop sentences from the follow graph");
  sentences->add_option("--graph", graph_path, "Edge list")->required();
  sentences->add_option("--rng-seed", rng_seed, "Permutation seed")->capture_default_str();
  sentences->add_flag("--bidirectional", bidirectional, "Include followers as well as followed nodes");
  sentences->add_option("--min-degree", min_degree, "Drop nodes with out-degree below this");
  sentences->add_option("--out", out_path, "Corpus file (default stdout)");

  // embed
  std::string corpus_path, mode = "skipgram";
  TrainConfig emb;
  bool window_set = false;
  auto* embed = add("embed", "Train node embeddings on a sentence corpus");
  embed->add_option("--corpus", corpus_path, "Corpus (one sentence per line)")->required();
  embed->add_option("--mode", mode, "skipgram|cbow")->capture_default_str();
  embed->add_option("--dim", emb.dim, "Dimension")->capture_default_str();
  embed->add_option("--window", emb.window, "Window (default 5 skipgram, 6 cbow)")
      ->each([&](const std::string&) { window_set = true; });
  embed->add_option("--min-count", emb.min_count, "Minimum token count")->capture_default_str();
  embed->add_option("--epochs", emb.epochs, "Epochs")->capture_default_str();
  embed->add_option("--negatives", emb.negatives, "Negative samples")->capture_default_str();
  embed->add_option("--rate", emb.learning_rate, "Initial learning rate")->capture_default_str();
  embed->add_option("--subsample", emb.subsample, "Frequent-token subsampling threshold (0 = off)");
  embed->add_option("--rng-seed", emb.rng_seed, "Seed")->capture_default_str();
  embed->add_option("--out", out_path, "Embedding table, word2vec text (default stdout)");

  // coldstart
  std::string table_path;
  auto* coldstart = add("coldstart", "Fill missing embeddings with the mean of embedded neighbours");
  coldstart->add_option("--graph", graph_path, "Edge list")->required();
  coldstart->add_option("--embeddings", table_path, "word2vec text table")->required();
  coldstart->add_option("--min-degree", min_degree, "Drop nodes with out-degree below this");
  coldstart->add_option("--out", out_path, "Filled table (default stdout)");

  // synth
  PlantedGraphSpec synth_spec;
  std::string out_dir;
  auto* synth = add("synth", "Generate a planted-partition dataset");
  synth->add_option("--classes", synth_spec.classes, "2 or 7")->capture_default_str();
  synth->add_option("--per-class", synth_spec.nodes_per_class, "Nodes per class")->capture_default_str();
  synth->add_option("--p", synth_spec.p, "Intra-class edge probability")->capture_default_str();
  synth->add_option("--q", synth_spec.q, "Inter-class edge probability")->capture_default_str();
  synth->add_option("--reveal", synth_spec.reveal, "Fraction of labels revealed as seeds")->capture_default_str();
  synth->add_option("--noise", synth_spec.noise, "Feature noise std-dev")->capture_default_str();
  synth->add_option("--rng-seed", synth_spec.rng_seed, "Seed")->capture_default_str();
  synth->add_flag("--allow-anti-homophily", synth_spec.allow_anti_homophily, "Permit p < q");
  synth->add_option("--out-dir", out_dir, "Output directory")->required();

  // train
  std::string features, labels_path, task = "gender", model = "lr", hidden_text = "256,256,256";
  std::string split_mode = "hash", model_out;
  Hyper hyper;
  double train_frac = 0.75;
  auto* train = add("train", "Train a classifier on joined feature blocks and report test metrics");
  train->add_option("--features", features, "Comma-separated feature CSVs")->required();
  train->add_option("--labels", labels_path, "Labels (<name>\\t<value>)")->required();
  train->add_option("--task", task, "gender|age")->capture_default_str();
  train->add_flag("--raw-age", raw_age, "Label values are ages in years");
  train->add_option("--model", model, "lr|mlp")->capture_default_str();
  train->add_option("--hidden", hidden_text, "MLP hidden sizes")->capture_default_str();
  train->add_option("--epochs", hyper.epochs, "Epochs")->capture_default_str();
  train->add_option("--minibatch", hyper.minibatch, "Minibatch size")->capture_default_str();
  train->add_option("--rate", hyper.rate, "SGD learning rate")->capture_default_str();
  train->add_option("--l2", hyper.l2, "L2 penalty")->capture_default_str();
  train->add_flag("--balance", hyper.balance_classes, "Downsample to the rarest class");
  train->add_flag("--standardize", hyper.standardize, "Standardize inputs with training statistics");
  train->add_option("--split", split_mode, "hash|random")->capture_default_str();
  train->add_option("--train-frac", train_frac, "Training fraction")->capture_default_str();
  train->add_option("--rng-seed", rng_seed, "Seed for splits, init and shuffling")->capture_default_str();
  train->add_option("--model-out", model_out, "Write the fitted model (JSON)");

  // eval
  std::string model_path;
  bool test_only = false;
  auto* eval = add("eval", "Evaluate a saved model");
  eval->add_option("--model", model_path, "Model JSON")->required();
  eval->add_option("--features", features, "Comma-separated feature CSVs")->required();
  eval->add_option("--labels", labels_path, "Labels")->required();
  eval->add_option("--task", task, "gender|age")->capture_default_str();
  eval->add_flag("--raw-age", raw_age, "Label values are ages in years");
  eval->add_flag("--test-only", test_only, "Only score rows on the test side of the split");
  eval->add_option("--split", split_mode, "hash|random")->capture_default_str();
  eval->add_option("--train-frac", train_frac, "Training fraction")->capture_default_str();
  eval->add_option("--rng-seed", rng_seed, "Split seed")->capture_default_str();

  // pipeline
  std::string config_path;
  std::vector<std::string> overrides;
  auto* pipeline = add("pipeline", "Run ingest -> features -> train -> evaluate for each regime");
  pipeline->add_option("--config", config_path, "key=value config file")->required();
  pipeline->add_option("--set", overrides, "Override a config key (key=value), repeatable");
  pipeline->add_option("--out", out_path, "Metrics report (overrides `out`)");

  // sensitivity
  std::string truth_path, pivot_out;
  std::string strategies_text = "alpha", alphas_text = "0.2,0.5,0.8", betas_text = "0.8", gammas_text = "0.9";
  std::string ks_text = "1,2,3,4,5,6,7,8,9,10,15,20";
  ExperimentGrid grid;
  auto* sens = add("sensitivity", "AUC of label propagation over a grid of strategies, parameters and K");
  sens->add_option("--graph", graph_path, "Edge list")->required();
  sens->add_option("--seeds", seeds_path, "Seed labels")->required();
  sens->add_option("--truth", truth_path, "Ground-truth labels for scoring")->required();
  sens->add_option("--strategies", strategies_text, "Comma list of alpha,beta,gamma")->capture_default_str();
  sens->add_option("--alphas", alphas_text, "Comma list of alpha values")->capture_default_str();
  sens->add_option("--betas", betas_text, "Comma list of beta values")->capture_default_str();
  sens->add_option("--gammas", gammas_text, "Comma list of gamma values")->capture_default_str();
  sens->add_option("--iters", ks_text, "Comma list of K")->capture_default_str();
  sens->add_option("--repetitions", grid.repetitions, "Seed/hidden redraws per cell")->capture_default_str();
  sens->add_option("--rng-seed", grid.rng_seed, "Seed for repetition redraws")->capture_default_str();
  sens->add_option("--workers", grid.workers, "Worker threads")->capture_default_str();
  sens->add_option("--min-degree", min_degree, "Drop nodes with out-degree below this");
  sens->add_option("--out", out_path, "Long-format CSV (default stdout)");
  sens->add_option("--pivot-out", pivot_out, "Pivoted AUC table (default stderr)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (ingest->parsed()) {
      const Graph g = load_edge_list(graph_path, min_degree);
      std::size_t isolated = 0;
      for (NodeId v = 0; v < g.num_nodes(); ++v) isolated += g.degree(v) == 0;
      std::cout << "nodes\t" << g.num_nodes() << "\nedges\t" << g.num_edges() << "\nisolated\t" << isolated
                << '\n';
      if (!map_out.empty()) emit(map_out, [&](std::ostream& o) { g.nodes().write_mapping(o); });
      if (!edges_out.empty()) emit(edges_out, [&](std::ostream& o) { g.write_edge_list(o); });
    } else if (propagate_cmd->parsed()) {
      prop.strategy = parse_strategy(strategy);
      if (prop_classes != 1 && prop_classes != kAgeBuckets) throw ConfigError("--classes must be 1 or 7");
      const Graph g = load_edge_list(graph_path, min_degree);
      const LabelKind kind = prop_classes == 1 ? LabelKind::binary
                                               : (raw_age ? LabelKind::raw_age : LabelKind::age_bucket);
      std::size_t skipped = 0;
      const auto seeds = seeds_from_labels(g, read_labels(seeds_path), kind, &skipped);
      if (skipped) std::cerr << "skipped " << skipped << " seed labels for unknown nodes\n";
      const auto result = propagate(g, seeds, prop);
      emit(out_path, [&](std::ostream& o) { write_label_state(o, g, result.state, emit_inactive); });
      std::cerr << "coverage\t" << format_real(result.coverage) << '\n';
      for (std::size_t k = 0; k < result.max_delta.size(); ++k) {
        std::cerr << "superstep " << k + 1 << "\tcoverage " << format_real(result.coverage_trace[k])
                  << "\tmax_delta " << format_real(result.max_delta[k]) << '\n';
      }
    } else if (lpf->parsed()) {
      prop.strategy = parse_strategy(strategy);
      if (prop_classes != 1 && prop_classes != kAgeBuckets) throw ConfigError("--classes must be 1 or 7");
      const Graph g = load_edge_list(graph_path, min_degree);
      const LabelKind kind = prop_classes == 1 ? LabelKind::binary
                                               : (raw_age ? LabelKind::raw_age : LabelKind::age_bucket);
      const auto seeds = seeds_from_labels(g, read_labels(seeds_path), kind);
      std::vector<NodeId> seeded;
      for (NodeId v = 0; v < g.num_nodes(); ++v) {
        if (seeds.is_seed[v]) seeded.push_back(v);
      }
      const auto plan = make_partitions(seeded, splits, rng_seed);
      const auto block = lp_features(g, seeds, plan, prop).to_feature_block(g);
      emit(out_path, [&](std::ostream& o) { write_feature_csv(o, block); });
    } else if (sentences->parsed()) {
      const auto corpus = build_sentences(load_directed(graph_path, min_degree), rng_seed, bidirectional);
      emit(out_path, [&](std::ostream& o) { corpus.write(o); });
    } else if (embed->parsed()) {
      emb.mode = parse_embed_mode(mode);
      if (emb.mode == EmbedMode::cbow && !window_set) emb.window = TrainConfig::cbow().window;
      std::ifstream in(corpus_path);
      if (!in) throw ConfigError("cannot open corpus " + corpus_path);
      const auto table = train_embeddings(SentenceCorpus::read(in), emb);
      emit(out_path, [&](std::ostream& o) { table.write_word2vec(o); });
    } else if (coldstart->parsed()) {
      const Graph g = load_edge_list(graph_path, min_degree);
      std::ifstream in(table_path);
      if (!in) throw ConfigError("cannot open embeddings " + table_path);
      const auto table = EmbeddingTable::read_word2vec(in, table_path);
      const auto filled = coldstart_fill(g, table);
      std::cerr << "embedded " << filled.size() << " of " << g.num_nodes() << " nodes\n";
      emit(out_path, [&](std::ostream& o) { filled.write_word2vec(o); });
    } else if (synth->parsed()) {
      const auto data = generate(synth_spec);
      data.write(out_dir);
      std::cerr << "nodes " << data.num_nodes() << ", arcs " << data.arcs.size() << ", seeds "
                << data.revealed.size() << '\n';
    } else if (train->parsed()) {
      const LabelKind kind = label_kind(task, raw_age);
      const FeatureMatrix f = load_features(features);
      const Labeled labeled = attach_labels(f, read_labels(labels_path), kind);
      const FeatureMatrix rows = f.select_rows(labeled.rows);
      SplitSpec spec{parse_split_mode(split_mode), train_frac, rng_seed};
      const Split parts = split(rows.nodes, spec);
      if (parts.train.empty() || parts.test.empty()) throw RuntimeError("split left one side empty");
      std::vector<int> y_train, y_test;
      for (auto r : parts.train) y_train.push_back(labeled.labels[r]);
      for (auto r : parts.test) y_test.push_back(labeled.labels[r]);
      hyper.rng_seed = rng_seed;
      if (task == "age") hyper.classes = kAgeBuckets;
      const FeatureMatrix train_rows = rows.select_rows(parts.train);
      const auto hidden = parse_hidden(hidden_text);
      const TrainResult fitted = model == "lr" ? train_logistic(train_rows, y_train, hyper)
                                 : model == "mlp" ? train_mlp(train_rows, y_train, hidden, hyper)
                                                  : throw ConfigError("model must be lr or mlp");
      for (std::size_t e = 0; e < fitted.epoch_loss.size(); ++e) {
        std::cerr << "epoch " << e + 1 << "\tloss " << format_real(fitted.epoch_loss[e]) << '\n';
      }
      print_metrics(evaluate(predict(fitted.params, rows.select_rows(parts.test)), y_test));
      if (!model_out.empty()) emit(model_out, [&](std::ostream& o) { o << fitted.params.to_json() << '\n'; });
    } else if (eval->parsed()) {
      std::ifstream in(model_path);
      if (!in) throw ConfigError("cannot open model " + model_path);
      std::stringstream text;
      text << in.rdbuf();
      const ModelParams params = ModelParams::from_json(text.str());
      const FeatureMatrix f = load_features(features);
      const Labeled labeled = attach_labels(f, read_labels(labels_path), label_kind(task, raw_age));
      FeatureMatrix rows = f.select_rows(labeled.rows);
      std::vector<int> truth = labeled.labels;
      if (test_only) {
        const Split parts = split(rows.nodes, SplitSpec{parse_split_mode(split_mode), train_frac, rng_seed});
        rows = rows.select_rows(parts.test);
        truth.clear();
        for (auto r : parts.test) truth.push_back(labeled.labels[r]);
      }
      print_metrics(evaluate(predict(params, rows), truth));
    } else if (pipeline->parsed()) {
      PipelineConfig cfg = PipelineConfig::load(config_path);
      for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (!out_path.empty()) cfg.out = out_path;
      const auto reports = run_pipeline(cfg);
      std::cout << format_report(reports);
      std::printf("%-16s %-10s %-10s %-14s %s\n", "regime", "auc", "accuracy", "cross_entropy", "test_rows");
      for (const auto& r : reports) {
        std::printf("%-16s %-10s %-10.4f %-14.4f %zu\n", r.regime.c_str(),
                    r.metrics.auc ? std::to_string(*r.metrics.auc).substr(0, 6).c_str() : "-",
                    r.metrics.accuracy, r.metrics.cross_entropy, r.test_rows);
      }
    } else if (sens->parsed()) {
      auto doubles = [](const std::string& text) {
        std::vector<double> out;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
          if (!item.empty()) out.push_back(std::stod(item));
        }
        return out;
      };
      grid.strategies.clear();
      {
        std::stringstream ss(strategies_text);
        std::string item;
        while (std::getline(ss, item, ',')) {
          if (!item.empty()) grid.strategies.push_back(parse_strategy(item));
        }
      }
      grid.alphas = doubles(alphas_text);
      grid.betas = doubles(betas_text);
      grid.gammas = doubles(gammas_text);
      grid.iterations = parse_hidden(ks_text);
      grid.validate();
      const auto data = SensitivityData::from_files(graph_path, seeds_path, truth_path, min_degree);
      const auto rows = run_sensitivity(data, grid);
      emit(out_path, [&](std::ostream& o) { write_sensitivity_csv(o, rows); });
      if (pivot_out.empty()) {
        write_sensitivity_pivot(std::cerr, rows);
      } else {
        emit(pivot_out, [&](std::ostream& o) { write_sensitivity_pivot(o, rows); });
      }
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
