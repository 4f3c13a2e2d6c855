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
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>

#include "pairlab/embedding.hpp"
#include "pairlab/feature_dictionary.hpp"
#include "pairlab/hep_loss.hpp"
#include "pairlab/proposal_sim.hpp"
#include "pairlab/retrieval_eval.hpp"
#include "pairlab/run_config.hpp"

namespace pairlab {

struct MetricsRow {
  std::uint64_t iteration = 0;
  double lr = 0.0;
  double olp_loss = 0.0;
  double hep_loss = 0.0;
  double total_loss = 0.0;
  std::size_t dict_size = 0;
  std::size_t pool_size = 0;
  std::size_t subgroup_count = 0;
  std::size_t inserted = 0;
};

/// The fixed held-out probe/gallery split of a run.
EvalSplit heldout_split(const RunConfig& config, const IdentityWorld& world);

void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const MetricsRow& row);

/// Owns the mutable state of one run: network, classifier head, feature
/// dictionary, optimizers and RNG streams.
class Trainer {
 public:
  // Throws kInvalidConfig listing every validation failure.
  explicit Trainer(RunConfig config);

  /// One Siamese iteration: forward both images through the shared network,
  /// OLP against the current dictionary, HEP over labeled proposals, a joint
  /// SGD step, then dictionary insertion. Throws kNumericalFailure on a
  /// non-finite loss.
  MetricsRow train_iteration();

  /// Metrics on the run's fixed held-out split.
  EvalReport evaluate() const;

  /// Loads network and head weights and continues numbering at `iteration`.
  /// The dictionary restarts empty.
  void resume(std::vector<DenseLayer> network, DenseLayer head, std::uint64_t iteration);

  bool finished() const noexcept { return iteration_ >= config_.total_iterations; }
  std::uint64_t iteration() const noexcept { return iteration_; }

  const RunConfig& config() const noexcept { return config_; }
  const IdentityWorld& world() const noexcept { return world_; }
  const EmbeddingNetwork& network() const noexcept { return net_; }
  const ClassifierHead& head() const noexcept { return head_; }
  const FeatureDictionary& dictionary() const noexcept { return dict_; }
  const EvalSplit& eval_split() const noexcept { return eval_split_; }

 private:
  RunConfig config_;
  IdentityWorld world_;
  EmbeddingNetwork net_;
  ClassifierHead head_;
  FeatureDictionary dict_;
  SgdOptimizer net_opt_;
  SgdOptimizer head_opt_;
  std::mt19937_64 scene_rng_;
  std::mt19937_64 select_rng_;
  EvalSplit eval_split_;
  std::uint64_t iteration_ = 0;
};

struct TrainingSummary {
  EvalReport initial;
  EvalReport final;
  std::uint64_t iterations_run = 0;
};

struct TrainOutputs {
  std::ostream* metrics = nullptr;   // metrics.csv
  std::ostream* progress = nullptr;  // periodic evaluation rows
};

/// Runs the trainer to completion, evaluating before the first iteration,
/// every eval_every iterations and at the end.
TrainingSummary run_training(Trainer& trainer, const TrainOutputs& outputs);

/// Writes metrics.csv, progress.csv, network.ckpt, head.ckpt and state.json
/// under `dir`. When `resume_dir` is set, weights and the iteration count
/// are read from there first.
TrainingSummary train_to_directory(const RunConfig& config, const std::filesystem::path& dir,
                                   const std::optional<std::filesystem::path>& resume_dir = std::nullopt);

}  // namespace pairlab
