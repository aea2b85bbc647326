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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "demograph/embed.hpp"
#include "demograph/graph.hpp"
#include "demograph/labelprop.hpp"
#include "demograph/model.hpp"
#include "demograph/synth.hpp"

namespace demograph {

// ---------------------------------------------------------------------------
// Sensitivity grid over propagation strategies, parameters and K.
// ---------------------------------------------------------------------------

struct ExperimentGrid {
  std::vector<Strategy> strategies{Strategy::alpha};
  std::vector<double> alphas{0.2, 0.5, 0.8};
  std::vector<double> betas{0.8};
  std::vector<double> gammas{0.9};
  std::vector<int> iterations{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20};
  int repetitions = 1;
  std::uint64_t rng_seed = 0;
  int workers = 1;

  void validate() const;
  const std::vector<double>& parameters(Strategy s) const;
};

// Binary task: seeds drive propagation, hidden nodes are scored.
struct SensitivityData {
  Graph graph;
  LabelState<double> seeds;
  std::vector<std::pair<NodeId, int>> hidden;

  static SensitivityData from_synth(const SynthData& data);
  // Truth entries that are also seeds are not scored.
  static SensitivityData from_files(const std::filesystem::path& edges, const std::filesystem::path& seeds,
                                    const std::filesystem::path& truth, std::size_t min_degree = 0);
};

struct SensitivityRow {
  Strategy strategy = Strategy::alpha;
  double parameter = 0.0;
  int iterations = 0;
  int repetition = 0;
  double auc = 0.0;
  double coverage = 0.0;
  std::string error;  // non-empty when the cell failed
};

// One row per (strategy, parameter, K, repetition) in that canonical order.
// Hidden nodes the propagation never reached score 0.5. Repetition 0 uses
// the given seeds; repetition r > 0 redraws which labeled nodes are seeds
// (same count) from derive_seed(grid.rng_seed, "rep/<r>").
std::vector<SensitivityRow> run_sensitivity(const SensitivityData& data, const ExperimentGrid& grid);

// `strategy,parameter,iterations,repetition,auc,coverage,error`
void write_sensitivity_csv(std::ostream& out, const std::vector<SensitivityRow>& rows);
// Mean AUC over repetitions, one line per (strategy, parameter), one column per K.
void write_sensitivity_pivot(std::ostream& out, const std::vector<SensitivityRow>& rows);

// ---------------------------------------------------------------------------
// Pipeline: ingest -> features -> join -> train -> evaluate, per regime.
// ---------------------------------------------------------------------------

struct PipelineConfig {
  std::filesystem::path edges;
  std::filesystem::path seeds;   // labels that seed propagation
  std::filesystem::path labels;  // labels for training/evaluation; defaults to seeds
  std::filesystem::path cumf;
  std::filesystem::path out;     // metrics report; empty -> none written

  std::vector<std::string> regimes{"cumf", "cumf+lp", "all"};
  std::string task = "gender";  // gender | age
  bool raw_age = false;
  std::string model = "lr";     // lr | mlp
  std::vector<int> hidden{256, 256, 256};
  Hyper hyper;
  SplitSpec split;
  std::size_t min_degree = 0;

  int lp_splits = 3;
  PropagationConfig lp;
  TrainConfig emb;
  bool emb_bidirectional = false;

  std::uint64_t seed = 0;

  PipelineConfig();

  // Flat `key = value` lines; '#' starts a comment. Unknown keys are errors.
  static PipelineConfig parse(std::istream& in, const std::string& source = "<stream>");
  static PipelineConfig load(const std::filesystem::path& path);
  void set(const std::string& key, const std::string& value);
};

struct RegimeReport {
  std::string regime;
  Metrics metrics;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
};

std::vector<RegimeReport> run_pipeline(const PipelineConfig& cfg);

// One JSON record per regime: {"regime","auc","accuracy","cross_entropy",...}.
std::string format_report(const std::vector<RegimeReport>& reports);

}  // namespace demograph
