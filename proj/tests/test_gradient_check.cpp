// Copyright 2026 The pairlab Authors.
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

#include "pairlab/gradient_check.hpp"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "pairlab/error.hpp"

namespace pairlab {
namespace {

TEST(GradientCheck, HalfSquaredNorm) {
  const DenseVector x{0.3, -1.2, 2.5, 4.0};
  auto f = [](std::span<const double> v) { return 0.5 * dot(v, v); };
  const auto result = gradient_check(f, x, x);
  EXPECT_LT(result.max_relative_error, 1e-8);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(result.numeric[i], x[i], 1e-8);
}

TEST(GradientCheck, ConstantFunction) {
  const DenseVector x{1.0, 2.0};
  const DenseVector zero{0.0, 0.0};
  auto f = [](std::span<const double>) { return 3.0; };
  const auto result = gradient_check(f, zero, x);
  EXPECT_EQ(result.max_relative_error, 0.0);
  EXPECT_EQ(result.numeric, zero);
}

TEST(GradientCheck, DetectsWrongGradient) {
  const DenseVector x{1.0, 2.0, 3.0};
  auto f = [](std::span<const double> v) { return v[0] * v[1] + v[2]; };
  const DenseVector wrong{2.0, 1.0, 0.0};  // last component should be 1
  const auto result = gradient_check(f, wrong, x);
  EXPECT_GT(result.max_relative_error, 0.4);
  EXPECT_EQ(result.worst_index, 2u);
}

TEST(GradientCheck, NonFiniteFunctionThrows) {
  const DenseVector x{0.0};
  auto f = [](std::span<const double> v) { return std::log(v[0]); };
  try {
    gradient_check(f, DenseVector{1.0}, x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteFunction);
  }
}

TEST(GradientCheck, EpsilonRange) {
  const DenseVector x{1.0};
  auto f = [](std::span<const double> v) { return v[0]; };
  EXPECT_THROW(gradient_check(f, x, x, 1e-9), Error);
  EXPECT_THROW(gradient_check(f, x, x, 1e-2), Error);
  EXPECT_NO_THROW(gradient_check(f, x, x, 1e-8));
  EXPECT_NO_THROW(gradient_check(f, x, x, 1e-3));
}

}  // namespace
}  // namespace pairlab
