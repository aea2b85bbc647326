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
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace demograph {

// Dense node index assigned at interning time.
using NodeId = std::uint32_t;

// ---------------------------------------------------------------------------
// Errors. Validation and configuration problems map to CLI exit code 1,
// everything else deriving from RuntimeError maps to exit code 2.
// ---------------------------------------------------------------------------

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : ValidationError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyGraphError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class JoinError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class TrainingError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class DivergenceError : public TrainingError {
 public:
  DivergenceError(int epoch, const std::string& what)
      : TrainingError("diverged in epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

class UndefinedMetricError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

// ---------------------------------------------------------------------------
// Hashing and randomness. Distribution helpers are written out here so that
// seeded outputs are identical across standard library implementations.
// ---------------------------------------------------------------------------

// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Seed for a named pipeline stage: splitmix64(root ^ fnv1a64(stage)).
std::uint64_t derive_seed(std::uint64_t root, std::string_view stage) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// 17 significant digits, enough to round-trip any double.
std::string format_real(double x);

}  // namespace demograph
