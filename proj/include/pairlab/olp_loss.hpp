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
#include <memory>
#include <span>
#include <vector>

#include "pairlab/dense.hpp"
#include "pairlab/feature_dictionary.hpp"

namespace pairlab {

/// Inner product of two unit vectors, clamped to [-1, 1].
/// Throws kUnnormalizedInput if either norm deviates from 1 by more than 1e-6.
double cosine_distance(std::span<const double> a, std::span<const double> b);

/// Negatives shared by every subgroup of one anchor identity. Rows of
/// `features` are copies of dictionary entries, oldest first.
struct NegativeSet {
  DenseMatrix features;
  std::vector<IdentityLabel> labels;

  std::size_t size() const noexcept { return labels.size(); }
};

/// Position of a proposal within a scene pair: image 0 or 1, row index.
struct ProposalRef {
  std::size_t image = 0;
  std::size_t index = 0;
  bool operator==(const ProposalRef&) const = default;
};

struct Subgroup {
  DenseVector anchor;
  DenseVector positive;
  std::shared_ptr<const NegativeSet> negatives;
  std::size_t anchor_identity = 0;
  ProposalRef anchor_ref;
  ProposalRef positive_ref;

  std::size_t k() const noexcept { return negatives ? negatives->size() : 0; }
};

struct OlpBatch {
  std::vector<Subgroup> subgroups;

  std::size_t size() const noexcept { return subgroups.size(); }
  bool empty() const noexcept { return subgroups.empty(); }
};

/// Labeled unit features of one image.
struct ImageFeatures {
  const DenseMatrix& features;
  std::span<const IdentityLabel> labels;
};

/// For every identity present in both images, pairs its proposals across the
/// images (row-major over image-0 x image-1 occurrences, at most
/// `max_pairs_per_identity` pairs) and emits both anchor directions. The
/// negatives of an identity are every dictionary entry with a different label.
OlpBatch form_subgroups(const ImageFeatures& image0, const ImageFeatures& image1,
                        const FeatureDictionary& dict, std::size_t max_pairs_per_identity = 2);

/// Softmax weights of one subgroup: `positive` is q, `negatives[l]` is q-hat_l.
struct PairingWeights {
  double positive = 1.0;
  DenseVector negatives;
};

PairingWeights pairing_weights(const Subgroup& subgroup);

/// -log q of a single subgroup.
double subgroup_loss(const Subgroup& subgroup);

/// Mean of subgroup losses. Throws kEmptyBatch when the batch is empty.
double olp_loss(const OlpBatch& batch);

struct NegativeStat {
  double distance;
  IdentityLabel label;
};

struct SubgroupGradient {
  // d L / d anchor, including the 1/m factor.
  DenseVector anchor;
  PairingWeights weights;
  // (distance to anchor, label) for each negative, in negative order.
  std::vector<NegativeStat> negative_stats;
};

struct OlpGradient {
  double loss = 0.0;
  std::vector<SubgroupGradient> subgroups;
};

/// Anchor-only gradients: (1/m) [(q - 1) x_p + sum_l q-hat_l x_n_l]. Positives
/// and negatives receive no gradient. Throws kEmptyBatch.
OlpGradient olp_gradient(const OlpBatch& batch);

}  // namespace pairlab
