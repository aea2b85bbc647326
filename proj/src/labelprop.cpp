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

#include "demograph/labelprop.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace demograph {

const char* to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::alpha: return "alpha";
    case Strategy::beta: return "beta";
    case Strategy::gamma: return "gamma";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "alpha") return Strategy::alpha;
  if (name == "beta") return Strategy::beta;
  if (name == "gamma") return Strategy::gamma;
  throw ConfigError("unknown strategy '" + std::string(name) + "' (expected alpha|beta|gamma)");
}

void PropagationConfig::validate() const {
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  switch (strategy) {
    case Strategy::alpha:
      if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
      break;
    case Strategy::beta:
      if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in [0, 1]");
      break;
    case Strategy::gamma:
      if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
      break;
  }
}

double PropagationConfig::parameter() const noexcept {
  switch (strategy) {
    case Strategy::alpha: return alpha;
    case Strategy::beta: return beta;
    case Strategy::gamma: return gamma;
  }
  return 0.0;
}

template <class Scalar>
std::size_t LabelState<Scalar>::seed_count() const {
  return static_cast<std::size_t>(std::count(is_seed.begin(), is_seed.end(), 1));
}

template <class Scalar>
std::size_t LabelState<Scalar>::active_count() const {
  return static_cast<std::size_t>(std::count(is_active.begin(), is_active.end(), 1));
}

template struct LabelState<float>;
template struct LabelState<double>;

namespace {

template <class Scalar>
void check_inputs(const Graph& g, const LabelState<Scalar>& seeds, const PropagationConfig& cfg) {
  cfg.validate();
  if (g.num_nodes() == 0) throw ConfigError("graph is empty");
  if (seeds.size() != g.num_nodes()) {
    throw ValidationError("label state covers " + std::to_string(seeds.size()) +
                          " nodes, graph has " + std::to_string(g.num_nodes()));
  }
  if (seeds.seed_count() == 0) throw ConfigError("no seed labels");
}

// Runs the supersteps in place on `state`, whose channels are propagated
// together. For gamma the channels are the raw accumulators.
template <class Scalar>
void run_supersteps(const Graph& g, LabelState<Scalar>& state, const PropagationConfig& cfg,
                    PropagationResult<Scalar>& report) {
  using Matrix = typename LabelState<Scalar>::Matrix;
  const auto n = static_cast<std::int64_t>(g.num_nodes());
  const bool accumulate = cfg.strategy == Strategy::gamma;

  Matrix next(state.values.rows(), state.values.cols());
  std::vector<std::uint8_t> next_active(state.size(), 0);

  for (int k = 1; k <= cfg.iterations; ++k) {
    Scalar own_weight = 0, neighbor_weight = 0;
    switch (cfg.strategy) {
      case Strategy::alpha:
        own_weight = static_cast<Scalar>(cfg.alpha);
        neighbor_weight = static_cast<Scalar>(1.0 - cfg.alpha);
        break;
      case Strategy::beta: {
        const double decay = std::pow(cfg.beta, k);
        own_weight = static_cast<Scalar>(1.0 - decay);
        neighbor_weight = static_cast<Scalar>(decay);
        break;
      }
      case Strategy::gamma:
        own_weight = 1;
        neighbor_weight = static_cast<Scalar>(cfg.gamma);
        break;
    }

#pragma omp parallel for schedule(dynamic, 256) num_threads(cfg.workers) if (cfg.workers > 1)
    for (std::int64_t i = 0; i < n; ++i) {
      auto out = next.row(i);
      if (state.is_seed[i]) {
        out = state.values.row(i);
        next_active[i] = 1;
        continue;
      }
      out.setZero();
      std::size_t count = 0;
      if (accumulate) {
        // Sum each channel over its sorted terms, so the result depends only
        // on the multiset of neighbor values: mirrored seed patterns then give
        // bit-identical m and f accumulators.
        thread_local std::vector<Scalar> terms;
        for (Eigen::Index c = 0; c < out.cols(); ++c) {
          terms.clear();
          for (NodeId j : g.neighbors(static_cast<NodeId>(i))) {
            if (state.is_active[j]) terms.push_back(state.values(j, c));
          }
          std::sort(terms.begin(), terms.end());
          for (Scalar t : terms) out(c) += t;
          count = terms.size();
        }
      } else {
        for (NodeId j : g.neighbors(static_cast<NodeId>(i))) {
          if (state.is_active[j]) {
            out += state.values.row(j);
            ++count;
          }
        }
      }
      if (count == 0) {
        out = state.values.row(i);
        next_active[i] = state.is_active[i];
        continue;
      }
      out /= static_cast<Scalar>(count);
      if (accumulate) {
        out = state.values.row(i) + neighbor_weight * out;
        next_active[i] = out.sum() > Scalar(0) ? 1 : 0;
      } else if (state.is_active[i]) {
        out = own_weight * state.values.row(i) + neighbor_weight * out;
        next_active[i] = 1;
      } else {
        next_active[i] = 1;  // first activation: plain mean
      }
    }

    double max_delta = 0.0;
    std::size_t active = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      if (state.is_active[i] && next_active[i]) {
        const double d =
            static_cast<double>((next.row(i) - state.values.row(i)).cwiseAbs().maxCoeff());
        max_delta = std::max(max_delta, d);
      }
      active += next_active[i];
    }
    state.values.swap(next);
    state.is_active.swap(next_active);
    report.max_delta.push_back(max_delta);
    report.coverage_trace.push_back(double(active) / double(n));
  }
}

// f / (m + f), computed from whichever accumulator is smaller so that
// swapping the roles of m and f maps x to exactly 1 - x.
template <class Scalar>
Scalar normalize_pair(Scalar male, Scalar female) {
  const Scalar total = male + female;
  if (female <= male) return female / total;
  return Scalar(1) - male / total;
}

}  // namespace

template <class Scalar>
PropagationResult<Scalar> propagate(const Graph& g, const LabelState<Scalar>& seeds,
                                    const PropagationConfig& cfg) {
  check_inputs(g, seeds, cfg);
  PropagationResult<Scalar> result;

  if (cfg.strategy != Strategy::gamma) {
    LabelState<Scalar> state = seeds;
    for (std::size_t v = 0; v < state.size(); ++v) {
      if (!state.is_seed[v]) {
        state.is_active[v] = 0;
        state.values.row(v).setZero();
      }
    }
    run_supersteps(g, state, cfg, result);
    result.state = std::move(state);
    result.coverage = result.state.coverage();
    return result;
  }

  if (seeds.classes() != 1) throw ConfigError("gamma strategy requires binary (single-channel) seeds");
  LabelState<Scalar> acc(seeds.size(), 2);
  for (std::size_t v = 0; v < seeds.size(); ++v) {
    if (!seeds.is_seed[v]) continue;
    const Scalar y = seeds.values(v, 0);
    if (!(y >= Scalar(0) && y <= Scalar(1))) {
      throw ValidationError("gamma seed value outside [0, 1] at node " + g.name(NodeId(v)));
    }
    acc.set_seed(NodeId(v), typename LabelState<Scalar>::Row{{Scalar(1) - y, y}});
  }
  run_supersteps(g, acc, cfg, result);

  LabelState<Scalar> out(seeds.size(), 1);
  for (std::size_t v = 0; v < seeds.size(); ++v) {
    if (seeds.is_seed[v]) {
      out.set_seed(NodeId(v), seeds.values(v, 0));
    } else if (acc.is_active[v]) {
      out.values(v, 0) = normalize_pair(acc.values(v, 0), acc.values(v, 1));
      out.is_active[v] = 1;
    }
  }
  result.state = std::move(out);
  result.coverage = result.state.coverage();
  return result;
}

template <class Scalar>
PropagationResult<Scalar> propagate_beta(const Graph& g, const LabelState<Scalar>& seeds,
                                         double beta, int iterations, int workers) {
  PropagationConfig cfg;
  cfg.strategy = Strategy::beta;
  cfg.beta = beta;
  cfg.iterations = iterations;
  cfg.workers = workers;
  return propagate(g, seeds, cfg);
}

template <class Scalar>
PropagationResult<Scalar> propagate_gamma(const Graph& g, const LabelState<Scalar>& seeds,
                                          double gamma, int iterations, int workers) {
  PropagationConfig cfg;
  cfg.strategy = Strategy::gamma;
  cfg.gamma = gamma;
  cfg.iterations = iterations;
  cfg.workers = workers;
  return propagate(g, seeds, cfg);
}

LabelState<double> one_hot_seeds(std::span<const int> seed_classes, int classes) {
  LabelState<double> state(seed_classes.size(), classes);
  for (std::size_t v = 0; v < seed_classes.size(); ++v) {
    const int c = seed_classes[v];
    if (c == -1) continue;
    if (c < 0 || c >= classes) {
      throw ValidationError("class index " + std::to_string(c) + " outside [0, " +
                            std::to_string(classes) + ")");
    }
    state.values(Eigen::Index(v), c) = 1.0;
    state.is_seed[v] = state.is_active[v] = 1;
  }
  return state;
}

PropagationResult<double> propagate_multiclass(const Graph& g, std::span<const int> seed_classes,
                                               const PropagationConfig& cfg) {
  if (cfg.strategy == Strategy::gamma) {
    throw ConfigError("gamma strategy is defined for binary labels only");
  }
  return propagate(g, one_hot_seeds(seed_classes, kAgeBuckets), cfg);
}

int age_bucket(int age_years) {
  if (age_years < 0) throw ValidationError("negative age " + std::to_string(age_years));
  if (age_years <= 17) return 0;
  if (age_years <= 24) return 1;
  if (age_years <= 34) return 2;
  if (age_years <= 44) return 3;
  if (age_years <= 54) return 4;
  if (age_years <= 64) return 5;
  return 6;
}

#define DEMOGRAPH_INSTANTIATE(Scalar)                                                           \
  template PropagationResult<Scalar> propagate(const Graph&, const LabelState<Scalar>&,         \
                                               const PropagationConfig&);                       \
  template PropagationResult<Scalar> propagate_beta(const Graph&, const LabelState<Scalar>&,    \
                                                    double, int, int);                          \
  template PropagationResult<Scalar> propagate_gamma(const Graph&, const LabelState<Scalar>&,   \
                                                     double, int, int);

DEMOGRAPH_INSTANTIATE(float)
DEMOGRAPH_INSTANTIATE(double)

#undef DEMOGRAPH_INSTANTIATE

}  // namespace demograph
