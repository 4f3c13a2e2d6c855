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

#include "pairlab/dense.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pairlab/error.hpp"

namespace pairlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNoCache: return "NoCache";
    case ErrorCode::kNonFiniteFunction: return "NonFiniteFunction";
    case ErrorCode::kZeroCapacity: return "ZeroCapacity";
    case ErrorCode::kUnnormalizedFeature: return "UnnormalizedFeature";
    case ErrorCode::kUnnormalizedInput: return "UnnormalizedInput";
    case ErrorCode::kEmptyBatch: return "EmptyBatch";
    case ErrorCode::kTrueClassNotSelected: return "TrueClassNotSelected";
    case ErrorCode::kGallerySizeTooSmall: return "GallerySizeTooSmall";
    case ErrorCode::kNoRelevantItem: return "NoRelevantItem";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

void DenseMatrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) {
    throw Error(ErrorCode::kShapeMismatch,
                "append_row: got " + std::to_string(values.size()) + " values for " +
                    std::to_string(cols_) + " columns");
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kShapeMismatch, "dot: length " + std::to_string(a.size()) +
                                               " vs " + std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::kShapeMismatch, "axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

DenseMatrix vstack(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.cols() != b.cols()) throw Error(ErrorCode::kShapeMismatch, "vstack: column mismatch");
  DenseMatrix out(a.rows() + b.rows(), a.cols());
  auto dst = out.values();
  std::copy(a.values().begin(), a.values().end(), dst.begin());
  std::copy(b.values().begin(), b.values().end(), dst.begin() + static_cast<std::ptrdiff_t>(a.size()));
  return out;
}

}  // namespace pairlab
