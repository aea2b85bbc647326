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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "demograph/graph.hpp"
#include "demograph/labelprop.hpp"

namespace demograph {

// A named, node-keyed block of real-valued columns.
struct FeatureBlock {
  std::string name;
  std::vector<std::string> nodes;
  std::vector<std::string> columns;
  Eigen::MatrixXd values;  // nodes.size() x columns.size()
};

// CSV with a header whose first column is `node`.
FeatureBlock read_feature_csv(std::istream& in, const std::string& name,
                              const std::string& source = "<stream>");
FeatureBlock read_feature_csv(const std::filesystem::path& path, const std::string& name);
void write_feature_csv(std::ostream& out, const FeatureBlock& block);

struct LabelEntry {
  std::string node;
  double value = 0.0;
};

// `<name><TAB><value>` lines; '#' comments and blank lines are skipped.
std::vector<LabelEntry> read_labels(std::istream& in, const std::string& source = "<stream>");
std::vector<LabelEntry> read_labels(const std::filesystem::path& path);

enum class LabelKind {
  binary,      // reals in [0, 1]
  age_bucket,  // integer bucket in [0, 7)
  raw_age,     // integer years, bucketed on read
};

// Integer class for a label value; binary values must be exactly 0 or 1.
int label_class(double value, LabelKind kind);

// Seed state over the graph's nodes. Entries naming unknown nodes are
// skipped and counted in *skipped when given.
LabelState<double> seeds_from_labels(const Graph& g, const std::vector<LabelEntry>& labels,
                                     LabelKind kind, std::size_t* skipped = nullptr);

// `<name><TAB><v0>[,v1..]`, 17 significant digits. Inactive nodes are
// omitted unless emit_inactive, in which case they carry `NA`.
void write_label_state(std::ostream& out, const Graph& g, const LabelState<double>& state,
                       bool emit_inactive = false);

}  // namespace demograph
