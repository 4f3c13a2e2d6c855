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
#include <random>
#include <span>
#include <vector>

#include "pairlab/dense.hpp"
#include "pairlab/embedding.hpp"
#include "pairlab/olp_loss.hpp"

namespace pairlab {

struct HepConfig {
  std::size_t num_selected = 100;     // M
  std::size_t hard_per_subgroup = 20;
  std::size_t num_classes_total = 201;  // C + 1, class 0 is background

  void validate() const;
};

/// Linear classifier over C+1 classes: logits = W x + b.
struct ClassifierHead {
  DenseLayer params;

  static ClassifierHead zeros(std::size_t num_classes, std::size_t embed_dim);
  static ClassifierHead random(std::size_t num_classes, std::size_t embed_dim, double scale,
                               std::mt19937_64& rng);

  std::size_t num_classes() const noexcept { return params.outputs(); }
  std::size_t embed_dim() const noexcept { return params.inputs(); }
  double logit(std::size_t cls, std::span<const double> feature) const {
    return params.bias[cls] + dot(params.weights.row(cls), feature);
  }
};

/// Duplicate-free ordered class list. The first `mandatory` entries came
/// from true labels and hard negatives; the rest are random fills.
struct SelectionPool {
  std::vector<std::size_t> classes;
  std::size_t mandatory = 0;

  std::size_t size() const noexcept { return classes.size(); }
  bool contains(std::size_t cls) const;
};

/// Proposals taking part in the classification loss (no unlabeled persons).
struct HepBatch {
  DenseMatrix features;
  std::vector<std::size_t> true_classes;

  std::size_t size() const noexcept { return true_classes.size(); }
};

/// Class indices of the `hard_per_subgroup` closest labeled negatives
/// (largest inner product; ties broken by negative order). Unlabeled
/// negatives are skipped before ranking.
std::vector<std::size_t> hard_negative_classes(std::span<const NegativeStat> stats,
                                               std::size_t hard_per_subgroup);

/// Pool = true classes, then hard-negative classes per subgroup, then uniform
/// random fills without repetition until the pool reaches M. Mandatory
/// entries are never dropped, so the pool may exceed M.
SelectionPool select_classes(std::span<const std::size_t> batch_true_classes,
                             std::span<const std::vector<NegativeStat>> per_subgroup_stats,
                             const HepConfig& config, std::mt19937_64& rng);

/// Every class 0..num_classes-1, i.e. an ordinary softmax.
SelectionPool full_pool(std::size_t num_classes);

/// Softmax cross entropy restricted to the pooled classes, averaged over the
/// batch. Throws kTrueClassNotSelected, kEmptyBatch, kShapeMismatch.
double hep_loss(const ClassifierHead& head, const HepBatch& batch, const SelectionPool& pool);

struct HepGradient {
  double loss = 0.0;
  DenseLayer head;        // zero outside pooled rows
  DenseMatrix features;   // d L / d feature, one row per batch row
};

HepGradient hep_gradient(const ClassifierHead& head, const HepBatch& batch, const SelectionPool& pool);

}  // namespace pairlab
