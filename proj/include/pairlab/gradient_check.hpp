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

#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "pairlab/dense.hpp"

namespace pairlab {

using ScalarFunction = std::function<double(std::span<const double>)>;

struct GradientCheckResult {
  // max_i |analytic_i - numeric_i| / max(||analytic||_inf, ||numeric||_inf, 1e-12)
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  DenseVector numeric;
};

/// Central differences of `f` at `point`, one coordinate at a time.
/// Throws kNonFiniteFunction if f is not finite at any probe and
/// kInvalidArgument if eps is outside [1e-8, 1e-3].
DenseVector numeric_gradient(const ScalarFunction& f, std::span<const double> point, double eps = 1e-5);

/// Compares `analytic` against central differences of `f` at `point`.
GradientCheckResult gradient_check(const ScalarFunction& f, std::span<const double> analytic,
                                   std::span<const double> point, double eps = 1e-5);

}  // namespace pairlab
