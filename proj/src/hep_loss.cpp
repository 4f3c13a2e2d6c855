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

#include "pairlab/hep_loss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pairlab/error.hpp"

namespace pairlab {

namespace {

void add_unique(SelectionPool& pool, std::vector<char>& seen, std::size_t cls) {
  if (!seen[cls]) {
    seen[cls] = 1;
    pool.classes.push_back(cls);
  }
}

// Position of each true class inside the pool.
std::vector<std::size_t> true_positions(const HepBatch& batch, const SelectionPool& pool,
                                        std::size_t num_classes) {
  std::vector<std::ptrdiff_t> where(num_classes, -1);
  for (std::size_t j = 0; j < pool.size(); ++j) {
    if (pool.classes[j] >= num_classes) {
      throw Error(ErrorCode::kShapeMismatch, "pool class " + std::to_string(pool.classes[j]) +
                                                 " exceeds the classifier");
    }
    where[pool.classes[j]] = static_cast<std::ptrdiff_t>(j);
  }
  std::vector<std::size_t> pos(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const std::size_t cls = batch.true_classes[i];
    if (cls >= num_classes || where[cls] < 0) {
      throw Error(ErrorCode::kTrueClassNotSelected, "true class " + std::to_string(cls) + " not in pool");
    }
    pos[i] = static_cast<std::size_t>(where[cls]);
  }
  return pos;
}

void check_batch(const ClassifierHead& head, const HepBatch& batch) {
  if (batch.size() == 0) throw Error(ErrorCode::kEmptyBatch, "HEP batch is empty");
  if (batch.features.rows() != batch.size() || batch.features.cols() != head.embed_dim()) {
    throw Error(ErrorCode::kShapeMismatch, "HEP batch features do not match the classifier");
  }
}

// Softmax over pooled logits of row i; returns log-partition.
double pooled_softmax(const ClassifierHead& head, const SelectionPool& pool,
                      std::span<const double> feature, DenseVector& probs) {
  probs.resize(pool.size());
  double mx = -INFINITY;
  for (std::size_t j = 0; j < pool.size(); ++j) {
    probs[j] = head.logit(pool.classes[j], feature);
    mx = std::max(mx, probs[j]);
  }
  double sum = 0.0;
  for (double& p : probs) {
    p = std::exp(p - mx);
    sum += p;
  }
  for (double& p : probs) p /= sum;
  return mx + std::log(sum);
}

}  // namespace

void HepConfig::validate() const {
  if (num_classes_total < 1) throw Error(ErrorCode::kInvalidConfig, "num_classes_total must be >= 1");
  if (num_selected < 1) {
    throw Error(ErrorCode::kInvalidConfig, "num_selected must be >= 1");
  }
}

ClassifierHead ClassifierHead::zeros(std::size_t num_classes, std::size_t embed_dim) {
  return {DenseLayer::zeros(num_classes, embed_dim)};
}

ClassifierHead ClassifierHead::random(std::size_t num_classes, std::size_t embed_dim, double scale,
                                      std::mt19937_64& rng) {
  ClassifierHead head = zeros(num_classes, embed_dim);
  std::normal_distribution<double> normal(0.0, scale / std::sqrt(static_cast<double>(embed_dim)));
  for (double& w : head.params.weights.values()) w = normal(rng);
  return head;
}

bool SelectionPool::contains(std::size_t cls) const {
  return std::find(classes.begin(), classes.end(), cls) != classes.end();
}

std::vector<std::size_t> hard_negative_classes(std::span<const NegativeStat> stats,
                                               std::size_t hard_per_subgroup) {
  std::vector<std::size_t> order;
  order.reserve(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    if (!stats[i].label.is_unlabeled()) order.push_back(i);
  }
  const auto take = std::min(hard_per_subgroup, order.size());
  // (distance desc, position asc) is a strict total order, so the partial
  // sort agrees with a stable sort.
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (stats[a].distance != stats[b].distance) return stats[a].distance > stats[b].distance;
                      return a < b;
                    });
  std::vector<std::size_t> classes;
  classes.reserve(take);
  for (std::size_t i = 0; i < take; ++i) classes.push_back(*stats[order[i]].label.class_index());
  return classes;
}

SelectionPool select_classes(std::span<const std::size_t> batch_true_classes,
                             std::span<const std::vector<NegativeStat>> per_subgroup_stats,
                             const HepConfig& config, std::mt19937_64& rng) {
  config.validate();
  const std::size_t total = config.num_classes_total;
  SelectionPool pool;
  std::vector<char> seen(total, 0);
  auto check = [&](std::size_t cls) {
    if (cls >= total) throw Error(ErrorCode::kInvalidArgument, "class " + std::to_string(cls) + " out of range");
    return cls;
  };

  for (std::size_t cls : batch_true_classes) add_unique(pool, seen, check(cls));
  for (const auto& stats : per_subgroup_stats) {
    for (std::size_t cls : hard_negative_classes(stats, config.hard_per_subgroup)) {
      add_unique(pool, seen, check(cls));
    }
  }
  pool.mandatory = pool.size();

  // M larger than the class set just selects every class.
  const std::size_t target = std::min(config.num_selected, total);
  if (pool.size() < target) {
    std::vector<std::size_t> remaining;
    remaining.reserve(total - pool.size());
    for (std::size_t c = 0; c < total; ++c) {
      if (!seen[c]) remaining.push_back(c);
    }
    // Partial Fisher-Yates: the first `need` slots become the draws.
    const std::size_t need = target - pool.size();
    for (std::size_t i = 0; i < need; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, remaining.size() - 1);
      std::swap(remaining[i], remaining[pick(rng)]);
      pool.classes.push_back(remaining[i]);
    }
  }
  return pool;
}

SelectionPool full_pool(std::size_t num_classes) {
  SelectionPool pool;
  pool.classes.resize(num_classes);
  std::iota(pool.classes.begin(), pool.classes.end(), std::size_t{0});
  pool.mandatory = num_classes;
  return pool;
}

double hep_loss(const ClassifierHead& head, const HepBatch& batch, const SelectionPool& pool) {
  check_batch(head, batch);
  const auto pos = true_positions(batch, pool, head.num_classes());
  double total = 0.0;
  DenseVector probs;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto f = batch.features.row(i);
    const double log_z = pooled_softmax(head, pool, f, probs);
    total += log_z - head.logit(pool.classes[pos[i]], f);
  }
  return total / static_cast<double>(batch.size());
}

HepGradient hep_gradient(const ClassifierHead& head, const HepBatch& batch, const SelectionPool& pool) {
  check_batch(head, batch);
  const auto pos = true_positions(batch, pool, head.num_classes());
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  HepGradient out;
  out.head = DenseLayer::zeros(head.num_classes(), head.embed_dim());
  out.features = DenseMatrix(batch.size(), head.embed_dim());
  DenseVector probs;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto f = batch.features.row(i);
    const double log_z = pooled_softmax(head, pool, f, probs);
    out.loss += (log_z - head.logit(pool.classes[pos[i]], f)) * inv_n;
    probs[pos[i]] -= 1.0;
    auto df = out.features.row(i);
    for (std::size_t j = 0; j < pool.size(); ++j) {
      const double g = probs[j] * inv_n;
      const std::size_t cls = pool.classes[j];
      out.head.bias[cls] += g;
      axpy(g, f, out.head.weights.row(cls));
      axpy(g, head.params.weights.row(cls), df);
    }
  }
  return out;
}

}  // namespace pairlab
