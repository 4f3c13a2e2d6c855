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
#include <string>
#include <vector>

#include "pairlab/retrieval_eval.hpp"
#include "pairlab/run_config.hpp"

namespace pairlab {

struct AblationRow {
  LossMode loss_mode;
  EvalReport report;
};

/// Trains every loss mode from the same seed and reports final metrics.
/// Per-run artifacts go to `dir/<mode>/` when `dir` is set.
std::vector<AblationRow> run_ablation(const RunConfig& config,
                                      const std::optional<std::filesystem::path>& dir = std::nullopt);
void write_ablation_csv(std::ostream& out, const std::vector<AblationRow>& rows);

struct DictSweepRow {
  LossMode loss_mode;
  std::size_t multiplier;
  std::size_t capacity;
  EvalReport report;
};

/// One run per (multiplier, mode) for modes {olp_only, olp_hep}.
std::vector<DictSweepRow> run_dict_sweep(const RunConfig& config,
                                         const std::optional<std::filesystem::path>& dir = std::nullopt);
void write_dictsweep_csv(std::ostream& out, const std::vector<DictSweepRow>& rows);

/// Gallery-size sweep of a network over the run's world.
std::vector<EvalReport> run_gallery_sweep(const RunConfig& config, const EmbeddingNetwork& net);

struct GradcheckSuite {
  std::string name;
  std::size_t cases = 0;
  double max_relative_error = 0.0;
};

inline constexpr double kGradcheckTolerance = 1e-6;

/// Finite-difference suites: normalization layer, OLP anchor gradients,
/// HEP head and feature gradients, full network backprop.
std::vector<GradcheckSuite> run_gradcheck_suites(std::uint64_t seed);

}  // namespace pairlab
