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

#include <cstdlib>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "demograph/common.hpp"

namespace demograph {
namespace {

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(DeriveSeed, StagesAreIndependent) {
  EXPECT_EQ(derive_seed(7, "embed"), derive_seed(7, "embed"));
  EXPECT_NE(derive_seed(7, "embed"), derive_seed(7, "split"));
  EXPECT_NE(derive_seed(7, "embed"), derive_seed(8, "embed"));
}

TEST(Rng, BelowStaysInRange) {
  Rng rng(3);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) ++hits[rng.below(7)];
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Rng, UniformAndNormalMoments) {
  Rng rng(11);
  double sum = 0, sq = 0, usum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    usum += u;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
  EXPECT_NEAR(usum / n, 0.5, 0.005);
}

TEST(Rng, ShuffleIsSeededPermutation) {
  std::vector<int> a{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, b = a;
  Rng r1(5), r2(5);
  r1.shuffle(a);
  r2.shuffle(b);
  EXPECT_EQ(a, b);
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}));
}

TEST(FormatReal, RoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 2.5e-300, 123456789.123456789}) {
    EXPECT_EQ(std::strtod(format_real(x).c_str(), nullptr), x);
  }
  EXPECT_EQ(format_real(0.5), "0.5");
}

TEST(Errors, ExitCodeFamilies) {
  // Validation-type errors derive from invalid_argument, runtime ones from
  // runtime_error; the CLI maps these to exit codes 1 and 2.
  EXPECT_THROW(throw ConfigError("x"), std::invalid_argument);
  EXPECT_THROW(throw ParseError("f", 3, "bad"), std::invalid_argument);
  EXPECT_THROW(throw EmptyGraphError("x"), std::invalid_argument);
  EXPECT_THROW(throw ShapeError("x"), std::runtime_error);
  EXPECT_THROW(throw DivergenceError(2, "nan"), std::runtime_error);
  EXPECT_THROW(throw UndefinedMetricError("x"), std::runtime_error);
  try {
    throw DivergenceError(4, "loss is nan");
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.epoch(), 4);
    EXPECT_NE(std::string(e.what()).find("epoch 4"), std::string::npos);
  }
}

}  // namespace
}  // namespace demograph
