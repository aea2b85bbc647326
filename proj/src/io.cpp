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

#include "demograph/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace demograph {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_double(std::string_view text, double& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && !text.empty();
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

FeatureBlock read_feature_csv(std::istream& in, const std::string& name, const std::string& source) {
  FeatureBlock block;
  block.name = name;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing header");
  strip_cr(line);
  auto header = split_commas(line);
  if (header.empty() || header[0] != "node") throw ParseError(source, 1, "first column must be 'node'");
  block.columns.assign(header.begin() + 1, header.end());
  const std::size_t width = block.columns.size();

  std::vector<double> flat;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_commas(line);
    if (fields.size() != width + 1) {
      throw ParseError(source, line_no, "expected " + std::to_string(width + 1) + " fields, got " +
                                            std::to_string(fields.size()));
    }
    block.nodes.push_back(fields[0]);
    for (std::size_t c = 0; c < width; ++c) {
      double v;
      if (!parse_double(fields[c + 1], v)) {
        throw ParseError(source, line_no, "not a number: '" + fields[c + 1] + "'");
      }
      flat.push_back(v);
    }
  }
  block.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), Eigen::Index(block.nodes.size()), Eigen::Index(width));
  return block;
}

FeatureBlock read_feature_csv(const std::filesystem::path& path, const std::string& name) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open feature file: " + path.string());
  return read_feature_csv(in, name, path.string());
}

void write_feature_csv(std::ostream& out, const FeatureBlock& block) {
  out << "node";
  for (const auto& c : block.columns) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < block.nodes.size(); ++r) {
    out << block.nodes[r];
    for (Eigen::Index c = 0; c < block.values.cols(); ++c) {
      out << ',' << format_real(block.values(Eigen::Index(r), c));
    }
    out << '\n';
  }
}

std::vector<LabelEntry> read_labels(std::istream& in, const std::string& source) {
  std::vector<LabelEntry> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream tokens(line);
    std::string node, value, extra;
    if (!(tokens >> node >> value) || (tokens >> extra)) {
      throw ParseError(source, line_no, "expected <name> <value>");
    }
    LabelEntry e{node, 0.0};
    if (!parse_double(value, e.value) || !std::isfinite(e.value)) {
      throw ParseError(source, line_no, "not a number: '" + value + "'");
    }
    labels.push_back(std::move(e));
  }
  return labels;
}

std::vector<LabelEntry> read_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open label file: " + path.string());
  return read_labels(in, path.string());
}

int label_class(double value, LabelKind kind) {
  const double rounded = std::round(value);
  if (rounded != value) {
    throw ValidationError("label " + format_real(value) + " is not an integer class");
  }
  const int c = static_cast<int>(rounded);
  switch (kind) {
    case LabelKind::binary:
      if (c != 0 && c != 1) throw ValidationError("binary label must be 0 or 1");
      return c;
    case LabelKind::age_bucket:
      if (c < 0 || c >= kAgeBuckets) throw ValidationError("age bucket outside [0, 7)");
      return c;
    case LabelKind::raw_age:
      return age_bucket(c);
  }
  return c;
}

LabelState<double> seeds_from_labels(const Graph& g, const std::vector<LabelEntry>& labels,
                                     LabelKind kind, std::size_t* skipped) {
  const int classes = kind == LabelKind::binary ? 1 : kAgeBuckets;
  LabelState<double> state(g.num_nodes(), classes);
  std::size_t missing = 0;
  for (const auto& e : labels) {
    auto v = g.find(e.node);
    if (!v) {
      ++missing;
      continue;
    }
    if (kind == LabelKind::binary) {
      if (!(e.value >= 0.0 && e.value <= 1.0)) {
        throw ValidationError("binary seed for " + e.node + " outside [0, 1]");
      }
      state.set_seed(*v, e.value);
    } else {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(classes);
      row(label_class(e.value, kind)) = 1.0;
      state.set_seed(*v, row);
    }
  }
  if (skipped) *skipped = missing;
  return state;
}

void write_label_state(std::ostream& out, const Graph& g, const LabelState<double>& state,
                       bool emit_inactive) {
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (!state.is_active[v]) {
      if (emit_inactive) out << g.name(v) << "\tNA\n";
      continue;
    }
    out << g.name(v) << '\t';
    for (int c = 0; c < state.classes(); ++c) {
      if (c) out << ',';
      out << format_real(state.values(v, c));
    }
    out << '\n';
  }
}

}  // namespace demograph
