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

#include "demograph/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "demograph/lpfeatures.hpp"

namespace demograph {

// ---------------------------------------------------------------------------
// Sensitivity
// ---------------------------------------------------------------------------

void ExperimentGrid::validate() const {
  if (strategies.empty()) throw ConfigError("grid has no strategies");
  if (iterations.empty()) throw ConfigError("grid has no iteration counts");
  for (int k : iterations) {
    if (k < 1) throw ConfigError("grid iteration counts must be >= 1");
  }
  for (Strategy s : strategies) {
    if (parameters(s).empty()) throw ConfigError(std::string("grid has no values for ") + to_string(s));
  }
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
}

const std::vector<double>& ExperimentGrid::parameters(Strategy s) const {
  switch (s) {
    case Strategy::alpha: return alphas;
    case Strategy::beta: return betas;
    case Strategy::gamma: return gammas;
  }
  return alphas;
}

SensitivityData SensitivityData::from_synth(const SynthData& data) {
  if (data.classes() != 2) throw ConfigError("sensitivity runs need binary labels");
  SensitivityData out;
  out.graph = data.graph();
  out.seeds = data.seed_state();
  for (NodeId v = 0; v < data.num_nodes(); ++v) {
    if (!out.seeds.is_seed[v]) out.hidden.emplace_back(v, data.truth[v]);
  }
  return out;
}

SensitivityData SensitivityData::from_files(const std::filesystem::path& edges, const std::filesystem::path& seeds,
                                            const std::filesystem::path& truth, std::size_t min_degree) {
  SensitivityData out;
  const auto seed_labels = read_labels(seeds);
  if (seed_labels.empty()) throw ConfigError("seed file " + seeds.string() + " has no labels");
  out.graph = load_edge_list(edges, min_degree);
  out.seeds = seeds_from_labels(out.graph, seed_labels, LabelKind::binary);
  if (out.seeds.seed_count() == 0) throw ConfigError("no seed label names a graph node");
  std::unordered_set<NodeId> scored;
  for (const auto& e : read_labels(truth)) {
    auto v = out.graph.find(e.node);
    if (!v || out.seeds.is_seed[*v] || !scored.insert(*v).second) continue;
    out.hidden.emplace_back(*v, label_class(e.value, LabelKind::binary));
  }
  return out;
}

namespace {

struct Cell {
  Strategy strategy;
  double parameter;
  int iterations;
  int repetition;
};

struct Replicate {
  LabelState<double> seeds;
  std::vector<std::pair<NodeId, int>> hidden;
};

Replicate redraw(const SensitivityData& data, std::uint64_t seed) {
  struct Labeled {
    NodeId node;
    double value;
    int cls;
  };
  std::vector<Labeled> pool;
  for (NodeId v = 0; v < data.seeds.size(); ++v) {
    if (data.seeds.is_seed[v]) {
      const double y = data.seeds.values(v, 0);
      pool.push_back({v, y, y >= 0.5 ? 1 : 0});
    }
  }
  const std::size_t seed_count = pool.size();
  for (auto [v, c] : data.hidden) pool.push_back({v, double(c), c});
  Rng rng(seed);
  rng.shuffle(pool);

  Replicate rep{LabelState<double>(data.seeds.size(), 1), {}};
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (i < seed_count) {
      rep.seeds.set_seed(pool[i].node, pool[i].value);
    } else {
      rep.hidden.emplace_back(pool[i].node, pool[i].cls);
    }
  }
  std::sort(rep.hidden.begin(), rep.hidden.end());
  return rep;
}

SensitivityRow run_cell(const Graph& g, const Replicate& rep, const Cell& cell) {
  SensitivityRow row{cell.strategy, cell.parameter, cell.iterations, cell.repetition, 0.0, 0.0, {}};
  try {
    PropagationConfig cfg;
    cfg.strategy = cell.strategy;
    cfg.alpha = cfg.beta = cfg.gamma = cell.parameter;
    cfg.iterations = cell.iterations;
    const auto result = propagate(g, rep.seeds, cfg);
    std::vector<double> scores;
    std::vector<int> truth;
    for (auto [v, c] : rep.hidden) {
      scores.push_back(result.state.is_active[v] ? result.state.values(v, 0) : 0.5);
      truth.push_back(c);
    }
    row.auc = auc(scores, truth);
    row.coverage = result.coverage;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::vector<SensitivityRow> run_sensitivity(const SensitivityData& data, const ExperimentGrid& grid) {
  grid.validate();
  if (data.seeds.seed_count() == 0) throw ConfigError("no seed labels");
  if (data.hidden.empty()) throw ConfigError("no hidden labeled nodes to score");

  std::vector<Replicate> reps;
  reps.push_back({data.seeds, data.hidden});
  for (int r = 1; r < grid.repetitions; ++r) {
    reps.push_back(redraw(data, derive_seed(grid.rng_seed, "rep/" + std::to_string(r))));
  }

  std::vector<Cell> cells;
  for (Strategy s : grid.strategies) {
    for (double param : grid.parameters(s)) {
      for (int k : grid.iterations) {
        for (int r = 0; r < grid.repetitions; ++r) cells.push_back({s, param, k, r});
      }
    }
  }

  std::vector<SensitivityRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      rows[i] = run_cell(data.graph, reps[std::size_t(cells[i].repetition)], cells[i]);
    }
  };
  const int threads = std::min<int>(grid.workers, int(cells.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return rows;
}

namespace {

// Grid parameters are user-typed decimals; print them the way they were typed.
std::string param_text(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

void write_sensitivity_csv(std::ostream& out, const std::vector<SensitivityRow>& rows) {
  out << "strategy,parameter,iterations,repetition,auc,coverage,error\n";
  for (const auto& r : rows) {
    out << to_string(r.strategy) << ',' << param_text(r.parameter) << ',' << r.iterations << ','
        << r.repetition << ',';
    if (r.error.empty()) {
      out << format_real(r.auc) << ',' << format_real(r.coverage) << ",\n";
    } else {
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      out << ",," << msg << '\n';
    }
  }
}

void write_sensitivity_pivot(std::ostream& out, const std::vector<SensitivityRow>& rows) {
  std::vector<int> ks;
  std::vector<std::pair<Strategy, double>> lines;
  for (const auto& r : rows) {
    if (std::find(ks.begin(), ks.end(), r.iterations) == ks.end()) ks.push_back(r.iterations);
    std::pair<Strategy, double> key{r.strategy, r.parameter};
    if (std::find(lines.begin(), lines.end(), key) == lines.end()) lines.push_back(key);
  }
  std::sort(ks.begin(), ks.end());

  out << "strategy,parameter";
  for (int k : ks) out << ",K=" << k;
  out << '\n';
  for (const auto& [s, param] : lines) {
    out << to_string(s) << ',' << param_text(param);
    for (int k : ks) {
      double sum = 0.0;
      int count = 0;
      for (const auto& r : rows) {
        if (r.strategy == s && r.parameter == param && r.iterations == k && r.error.empty()) {
          sum += r.auc;
          ++count;
        }
      }
      char buf[32];
      if (count) {
        std::snprintf(buf, sizeof buf, ",%.4f", sum / count);
      } else {
        std::snprintf(buf, sizeof buf, ",NA");
      }
      out << buf;
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Pipeline configuration
// ---------------------------------------------------------------------------

PipelineConfig::PipelineConfig() {
  hyper.standardize = true;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  if (!(in >> out) || !(in >> std::ws).eof()) {
    throw ConfigError("config key '" + key + "': cannot parse '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "no") return false;
  throw ConfigError("config key '" + key + "': expected true|false, got '" + value + "'");
}

}  // namespace

void PipelineConfig::set(const std::string& key, const std::string& value) {
  if (key == "edges") edges = value;
  else if (key == "seeds") seeds = value;
  else if (key == "labels") labels = value;
  else if (key == "cumf") cumf = value;
  else if (key == "out") out = value;
  else if (key == "regimes") regimes = split_list(value);
  else if (key == "task") task = value;
  else if (key == "raw_age") raw_age = parse_bool(key, value);
  else if (key == "model") model = value;
  else if (key == "hidden") {
    hidden.clear();
    for (const auto& h : split_list(value)) hidden.push_back(parse_number<int>(key, h));
  }
  else if (key == "rate") hyper.rate = parse_number<double>(key, value);
  else if (key == "epochs") hyper.epochs = parse_number<int>(key, value);
  else if (key == "minibatch") hyper.minibatch = parse_number<int>(key, value);
  else if (key == "l2") hyper.l2 = parse_number<double>(key, value);
  else if (key == "balance") hyper.balance_classes = parse_bool(key, value);
  else if (key == "standardize") hyper.standardize = parse_bool(key, value);
  else if (key == "split") split.mode = parse_split_mode(value);
  else if (key == "train_frac") split.train_fraction = parse_number<double>(key, value);
  else if (key == "min_degree") min_degree = parse_number<std::size_t>(key, value);
  else if (key == "lp_splits") lp_splits = parse_number<int>(key, value);
  else if (key == "lp_strategy") lp.strategy = parse_strategy(value);
  else if (key == "lp_alpha") lp.alpha = parse_number<double>(key, value);
  else if (key == "lp_beta") lp.beta = parse_number<double>(key, value);
  else if (key == "lp_gamma") lp.gamma = parse_number<double>(key, value);
  else if (key == "lp_iters") lp.iterations = parse_number<int>(key, value);
  else if (key == "emb_mode") emb.mode = parse_embed_mode(value);
  else if (key == "emb_dim") emb.dim = parse_number<int>(key, value);
  else if (key == "emb_window") emb.window = parse_number<int>(key, value);
  else if (key == "emb_negatives") emb.negatives = parse_number<int>(key, value);
  else if (key == "emb_epochs") emb.epochs = parse_number<int>(key, value);
  else if (key == "emb_min_count") emb.min_count = parse_number<int>(key, value);
  else if (key == "emb_rate") emb.learning_rate = parse_number<double>(key, value);
  else if (key == "emb_subsample") emb.subsample = parse_number<double>(key, value);
  else if (key == "emb_bidirectional") emb_bidirectional = parse_bool(key, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

PipelineConfig PipelineConfig::parse(std::istream& in, const std::string& source) {
  PipelineConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, line_no, "expected key = value");
    try {
      cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  return cfg;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  PipelineConfig cfg = parse(in, path.string());
  // Relative paths are relative to the config file.
  const auto base = path.parent_path();
  for (auto* p : {&cfg.edges, &cfg.seeds, &cfg.labels, &cfg.cumf, &cfg.out}) {
    if (!p->empty() && p->is_relative()) *p = base / *p;
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Pipeline execution
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> regime_blocks(const std::string& regime) {
  if (regime == "all") return {"cumf", "emb", "lp"};
  auto parts = split_list(regime, '+');
  if (parts.empty()) throw ConfigError("empty regime");
  for (const auto& p : parts) {
    if (p != "cumf" && p != "emb" && p != "lp") {
      throw ConfigError("unknown feature block '" + p + "' in regime '" + regime + "'");
    }
  }
  return parts;
}

}  // namespace

std::vector<RegimeReport> run_pipeline(const PipelineConfig& cfg) {
  if (cfg.regimes.empty()) throw ConfigError("no regimes configured");
  if (cfg.task != "gender" && cfg.task != "age") throw ConfigError("task must be gender or age");
  if (cfg.model != "lr" && cfg.model != "mlp") throw ConfigError("model must be lr or mlp");

  std::set<std::string> needed;
  std::vector<std::vector<std::string>> regime_parts;
  for (const auto& r : cfg.regimes) {
    regime_parts.push_back(regime_blocks(r));
    needed.insert(regime_parts.back().begin(), regime_parts.back().end());
  }
  const auto label_path = cfg.labels.empty() ? cfg.seeds : cfg.labels;

  std::vector<std::string> missing;
  auto require = [&](const std::filesystem::path& p, const char* key) {
    if (p.empty()) {
      missing.push_back(std::string(key) + " (not set)");
    } else if (!std::filesystem::exists(p)) {
      missing.push_back(std::string(key) + "=" + p.string());
    }
  };
  require(label_path, "labels");
  if (needed.count("lp") || needed.count("emb")) require(cfg.edges, "edges");
  if (needed.count("lp")) require(cfg.seeds, "seeds");
  if (needed.count("cumf")) require(cfg.cumf, "cumf");
  if (!missing.empty()) {
    std::string msg = "missing pipeline inputs:";
    for (const auto& m : missing) msg += " " + m;
    throw ConfigError(msg);
  }

  const LabelKind kind =
      cfg.task == "gender" ? LabelKind::binary : (cfg.raw_age ? LabelKind::raw_age : LabelKind::age_bucket);

  std::vector<std::string> labeled;
  std::unordered_map<std::string, int> label_of;
  for (const auto& e : read_labels(label_path)) {
    if (label_of.try_emplace(e.node, label_class(e.value, kind)).second) labeled.push_back(e.node);
  }

  std::map<std::string, FeatureBlock> blocks;
  if (needed.count("cumf")) blocks["cumf"] = read_feature_csv(cfg.cumf, "cumf");
  if (needed.count("lp") || needed.count("emb")) {
    EdgeList edges = load_directed(cfg.edges, cfg.min_degree);
    const Graph graph = Graph::from_edges(edges);
    if (needed.count("lp")) {
      const auto seeds = seeds_from_labels(graph, read_labels(cfg.seeds), kind);
      std::vector<NodeId> seeded;
      for (NodeId v = 0; v < graph.num_nodes(); ++v) {
        if (seeds.is_seed[v]) seeded.push_back(v);
      }
      const auto plan = make_partitions(seeded, cfg.lp_splits, derive_seed(cfg.seed, "lp-partitions"));
      blocks["lp"] = lp_features(graph, seeds, plan, cfg.lp).to_feature_block(graph);
    }
    if (needed.count("emb")) {
      const auto corpus = build_sentences(edges, derive_seed(cfg.seed, "sentences"), cfg.emb_bidirectional);
      TrainConfig emb = cfg.emb;
      emb.rng_seed = derive_seed(cfg.seed, "embed");
      const auto table = coldstart_fill(graph, train_embeddings(corpus, emb));
      blocks["emb"] = table.to_feature_block(graph.nodes().names());
    }
  }

  // Every regime is scored on the same rows: labeled nodes present in all
  // requested blocks.
  std::vector<FeatureBlock> all_blocks;
  for (const auto& [name, block] : blocks) all_blocks.push_back(block);
  const FeatureMatrix common = join_features(all_blocks, labeled);

  SplitSpec split_spec = cfg.split;
  split_spec.rng_seed = derive_seed(cfg.seed, "split");
  const Split parts = split(common.nodes, split_spec);
  if (parts.train.empty() || parts.test.empty()) throw RuntimeError("train/test split left one side empty");

  auto labels_for = [&](const std::vector<std::size_t>& rows) {
    std::vector<int> y;
    for (auto r : rows) y.push_back(label_of.at(common.nodes[r]));
    return y;
  };
  const std::vector<int> y_train = labels_for(parts.train);
  const std::vector<int> y_test = labels_for(parts.test);

  Hyper hyper = cfg.hyper;
  hyper.rng_seed = derive_seed(cfg.seed, "model");
  if (cfg.task == "age") hyper.classes = kAgeBuckets;

  std::vector<RegimeReport> reports;
  for (std::size_t i = 0; i < cfg.regimes.size(); ++i) {
    std::vector<FeatureBlock> chosen;
    for (const auto& name : regime_parts[i]) chosen.push_back(blocks.at(name));
    const FeatureMatrix features = join_features(chosen, common.nodes);
    const FeatureMatrix train = features.select_rows(parts.train);
    const FeatureMatrix test = features.select_rows(parts.test);

    const TrainResult fitted = cfg.model == "lr" ? train_logistic(train, y_train, hyper)
                                                 : train_mlp(train, y_train, cfg.hidden, hyper);
    RegimeReport report;
    report.regime = cfg.regimes[i];
    report.metrics = evaluate(predict(fitted.params, test), y_test);
    report.train_rows = train.nodes.size();
    report.test_rows = test.nodes.size();
    reports.push_back(std::move(report));
  }

  if (!cfg.out.empty()) {
    std::ofstream out(cfg.out);
    if (!out) throw RuntimeError("cannot write " + cfg.out.string());
    out << format_report(reports);
  }
  return reports;
}

std::string format_report(const std::vector<RegimeReport>& reports) {
  std::string text;
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["regime"] = r.regime;
    j["auc"] = r.metrics.auc ? nlohmann::ordered_json(*r.metrics.auc) : nlohmann::ordered_json(nullptr);
    j["accuracy"] = r.metrics.accuracy;
    j["cross_entropy"] = r.metrics.cross_entropy;
    j["train_rows"] = r.train_rows;
    j["test_rows"] = r.test_rows;
    text += j.dump() + "\n";
  }
  return text;
}

}  // namespace demograph
