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

#include "pairlab/olp_loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pairlab/error.hpp"

namespace pairlab {

namespace {

constexpr double kUnitTolerance = 1e-6;

// Logits of a subgroup: [d(a, p), d(a, n_1), ..., d(a, n_k)].
DenseVector subgroup_logits(const Subgroup& s) {
  DenseVector logits;
  logits.reserve(s.k() + 1);
  logits.push_back(dot(s.anchor, s.positive));
  for (std::size_t j = 0; j < s.k(); ++j) logits.push_back(dot(s.anchor, s.negatives->features.row(j)));
  return logits;
}

// Returns log(sum exp(x)) and leaves exp(x - max) in `shifted`.
double log_sum_exp(std::span<const double> x, DenseVector& shifted) {
  const double mx = *std::max_element(x.begin(), x.end());
  shifted.resize(x.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    shifted[i] = std::exp(x[i] - mx);
    sum += shifted[i];
  }
  return mx + std::log(sum);
}

std::vector<std::size_t> identities_in_order(std::span<const IdentityLabel> labels) {
  std::vector<std::size_t> ids;
  for (const auto& label : labels) {
    if (label.is_identity() &&
        std::find(ids.begin(), ids.end(), label.identity_index()) == ids.end()) {
      ids.push_back(label.identity_index());
    }
  }
  return ids;
}

std::vector<std::size_t> rows_with_identity(std::span<const IdentityLabel> labels, std::size_t id) {
  std::vector<std::size_t> rows;
  const auto target = IdentityLabel::identity(id);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == target) rows.push_back(i);
  }
  return rows;
}

}  // namespace

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  if (std::abs(norm(a) - 1.0) > kUnitTolerance || std::abs(norm(b) - 1.0) > kUnitTolerance) {
    throw Error(ErrorCode::kUnnormalizedInput, "cosine_distance expects unit vectors");
  }
  return std::clamp(dot(a, b), -1.0, 1.0);
}

OlpBatch form_subgroups(const ImageFeatures& image0, const ImageFeatures& image1,
                        const FeatureDictionary& dict, std::size_t max_pairs_per_identity) {
  if (image0.features.rows() != image0.labels.size() || image1.features.rows() != image1.labels.size()) {
    throw Error(ErrorCode::kShapeMismatch, "form_subgroups: one label per feature row required");
  }
  OlpBatch batch;
  for (std::size_t id : identities_in_order(image0.labels)) {
    const auto rows0 = rows_with_identity(image0.labels, id);
    const auto rows1 = rows_with_identity(image1.labels, id);
    if (rows1.empty()) continue;

    auto negatives = std::make_shared<NegativeSet>();
    for (const auto& n : dict.negatives_for(id)) {
      negatives->features.append_row(*n.feature);
      negatives->labels.push_back(n.label);
    }

    std::size_t pairs = 0;
    for (std::size_t r0 : rows0) {
      for (std::size_t r1 : rows1) {
        if (pairs == max_pairs_per_identity) break;
        ++pairs;
        const auto f0 = image0.features.row(r0);
        const auto f1 = image1.features.row(r1);
        batch.subgroups.push_back({DenseVector(f0.begin(), f0.end()), DenseVector(f1.begin(), f1.end()),
                                   negatives, id, ProposalRef{0, r0}, ProposalRef{1, r1}});
        batch.subgroups.push_back({DenseVector(f1.begin(), f1.end()), DenseVector(f0.begin(), f0.end()),
                                   negatives, id, ProposalRef{1, r1}, ProposalRef{0, r0}});
      }
    }
  }
  return batch;
}

PairingWeights pairing_weights(const Subgroup& subgroup) {
  const auto logits = subgroup_logits(subgroup);
  DenseVector shifted;
  const double lse = log_sum_exp(logits, shifted);
  PairingWeights w;
  w.positive = std::exp(logits[0] - lse);
  w.negatives.resize(subgroup.k());
  for (std::size_t l = 0; l < subgroup.k(); ++l) w.negatives[l] = std::exp(logits[l + 1] - lse);
  return w;
}

double subgroup_loss(const Subgroup& subgroup) {
  const auto logits = subgroup_logits(subgroup);
  DenseVector shifted;
  return log_sum_exp(logits, shifted) - logits[0];
}

double olp_loss(const OlpBatch& batch) {
  if (batch.empty()) throw Error(ErrorCode::kEmptyBatch, "OLP batch has no subgroups");
  double total = 0.0;
  for (const auto& s : batch.subgroups) total += subgroup_loss(s);
  return total / static_cast<double>(batch.size());
}

OlpGradient olp_gradient(const OlpBatch& batch) {
  if (batch.empty()) throw Error(ErrorCode::kEmptyBatch, "OLP batch has no subgroups");
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  OlpGradient out;
  out.subgroups.reserve(batch.size());
  for (const auto& s : batch.subgroups) {
    const auto logits = subgroup_logits(s);
    DenseVector shifted;
    const double lse = log_sum_exp(logits, shifted);
    out.loss += (lse - logits[0]) * inv_m;

    SubgroupGradient g;
    g.weights.positive = std::exp(logits[0] - lse);
    g.weights.negatives.resize(s.k());
    g.anchor.assign(s.anchor.size(), 0.0);
    axpy((g.weights.positive - 1.0) * inv_m, s.positive, g.anchor);
    g.negative_stats.reserve(s.k());
    for (std::size_t l = 0; l < s.k(); ++l) {
      const double q_hat = std::exp(logits[l + 1] - lse);
      g.weights.negatives[l] = q_hat;
      axpy(q_hat * inv_m, s.negatives->features.row(l), g.anchor);
      g.negative_stats.push_back({logits[l + 1], s.negatives->labels[l]});
    }
    out.subgroups.push_back(std::move(g));
  }
  return out;
}

}  // namespace pairlab
