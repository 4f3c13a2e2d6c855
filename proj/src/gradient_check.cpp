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

#include <algorithm>
#include <cmath>
#include <string>

#include "pairlab/error.hpp"

namespace pairlab {

namespace {

constexpr double kAbsoluteFloor = 1e-12;

double finite_or_throw(double value, std::size_t coordinate) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kNonFiniteFunction,
                "function is not finite near coordinate " + std::to_string(coordinate));
  }
  return value;
}

}  // namespace

DenseVector numeric_gradient(const ScalarFunction& f, std::span<const double> point, double eps) {
  if (!(eps >= 1e-8 && eps <= 1e-3)) throw Error(ErrorCode::kInvalidArgument, "eps must lie in [1e-8, 1e-3]");
  DenseVector x(point.begin(), point.end());
  finite_or_throw(f(x), 0);
  DenseVector grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + eps;
    const double plus = finite_or_throw(f(x), i);
    x[i] = saved - eps;
    const double minus = finite_or_throw(f(x), i);
    x[i] = saved;
    grad[i] = (plus - minus) / (2.0 * eps);
  }
  return grad;
}

GradientCheckResult gradient_check(const ScalarFunction& f, std::span<const double> analytic,
                                   std::span<const double> point, double eps) {
  if (analytic.size() != point.size()) throw Error(ErrorCode::kShapeMismatch, "gradient_check");
  GradientCheckResult result;
  result.numeric = numeric_gradient(f, point, eps);
  double scale = kAbsoluteFloor;
  for (std::size_t i = 0; i < point.size(); ++i) {
    scale = std::max({scale, std::abs(analytic[i]), std::abs(result.numeric[i])});
  }
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double err = std::abs(analytic[i] - result.numeric[i]) / scale;
    if (err > result.max_relative_error) {
      result.max_relative_error = err;
      result.worst_index = i;
    }
  }
  return result;
}

}  // namespace pairlab
