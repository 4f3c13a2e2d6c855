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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pairlab/embedding.hpp"
#include "pairlab/hep_loss.hpp"
#include "pairlab/proposal_sim.hpp"

namespace pairlab {

enum class LossMode { kOlpOnly, kOlpSoftmax, kOlpHep };

std::string_view to_string(LossMode mode);
std::optional<LossMode> parse_loss_mode(std::string_view text);

/// Everything one training run needs. Serialized as a flat JSON object whose
/// keys are the field names below (nested configs are flattened).
struct RunConfig {
  EmbeddingConfig embedding;
  SgdConfig sgd;
  WorldConfig world;
  HepConfig hep;
  double head_init_scale = 1.0;
  // Classifier-head learning rate = network learning rate x this factor.
  double head_lr_multiplier = 10000.0;
  std::size_t dictionary_capacity_multiplier = 40;
  std::size_t max_pairs_per_identity = 2;
  LossMode loss_mode = LossMode::kOlpHep;
  std::uint64_t total_iterations = 5000;
  std::uint64_t eval_every = 1000;
  std::size_t gallery_size = 100;
  std::size_t num_queries = 100;
  std::vector<std::size_t> gallery_sizes = {50, 100, 200, 400, 800};
  std::vector<std::size_t> dict_multipliers = {20, 40, 80};
  std::optional<std::uint64_t> seed;
  std::string output_dir = "out";

  // Copies shared fields into the nested configs (input_dim, iteration
  // count, class count, world seed). Call after editing fields by hand.
  void sync();

  std::size_t dictionary_capacity() const;

  // Every violated constraint as "field: reason"; empty when valid.
  std::vector<std::string> validate() const;
};

struct ConfigParseResult {
  RunConfig config;
  std::vector<std::string> errors;
};

/// Starts from defaults and applies the keys present in `json_text`.
ConfigParseResult parse_run_config(const std::string& json_text);
ConfigParseResult load_run_config(const std::string& path);

std::string to_json(const RunConfig& config);

/// SplitMix64-derived seed for an independent stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace pairlab
