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
#include <random>
#include <vector>

#include "pairlab/dense.hpp"
#include "pairlab/feature_dictionary.hpp"

namespace pairlab {

struct WorldConfig {
  std::size_t num_train_identities = 200;
  std::size_t num_test_identities = 100;
  std::size_t latent_dim = 16;
  std::size_t input_dim = 64;
  double observation_noise_sigma = 0.15;
  std::size_t proposals_per_identity_min = 1;
  std::size_t proposals_per_identity_max = 2;
  std::size_t backgrounds_generated_per_image = 32;
  std::size_t backgrounds_stored_per_image = 5;
  std::size_t unlabeled_identities_per_image = 1;
  std::size_t identities_per_image = 4;
  std::size_t shared_identities_per_pair = 1;
  // Per-observation nuisance factors (pose, lighting) mixed into the input.
  std::size_t nuisance_dim = 16;
  double nuisance_scale = 1.0;
  // Background latents ~ N(offset * direction, spread^2 I).
  double background_offset = 4.0;
  double background_spread = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
  // Upper bound on proposals per image; the "mini-batch size" that sizes the
  // feature dictionary.
  std::size_t nominal_proposals_per_image() const;
};

struct Proposal {
  DenseVector input;
  IdentityLabel label = IdentityLabel::background();
  bool store_in_dictionary = false;
};

struct ScenePair {
  std::vector<Proposal> image0;
  std::vector<Proposal> image1;
  std::vector<std::size_t> shared_identities;
};

/// Immutable generative model of the proposal stream. Training identity c is
/// labeled Id(c) for c in [1, num_train]; test identities carry ids
/// num_train + 1 .. num_train + num_test and never appear in training scenes.
class IdentityWorld {
 public:
  explicit IdentityWorld(const WorldConfig& config);

  const WorldConfig& config() const noexcept { return config_; }
  // Row c-1 is the latent prototype of training identity c.
  const DenseMatrix& train_prototypes() const noexcept { return train_prototypes_; }
  const DenseMatrix& test_prototypes() const noexcept { return test_prototypes_; }
  const DenseMatrix& observation_map() const noexcept { return observation_map_; }
  const DenseVector& background_center() const noexcept { return background_center_; }

  std::size_t first_test_id() const noexcept { return config_.num_train_identities + 1; }
  // Latent prototype for any id (train or test).
  std::span<const double> prototype(std::size_t id) const;

  // Noisy input-space observation of a latent vector.
  DenseVector observe_latent(std::span<const double> latent, std::mt19937_64& rng) const;
  DenseVector observe_identity(std::size_t id, std::mt19937_64& rng) const;
  DenseVector observe_background(std::mt19937_64& rng) const;

 private:
  WorldConfig config_;
  DenseMatrix train_prototypes_;
  DenseMatrix test_prototypes_;
  DenseMatrix observation_map_;  // input_dim x latent_dim
  DenseMatrix nuisance_map_;     // input_dim x nuisance_dim
  DenseVector background_center_;
};

IdentityWorld build_world(const WorldConfig& config);

ScenePair sample_scene_pair(const IdentityWorld& world, std::mt19937_64& rng);

/// Probe / gallery inputs. The gallery lists one match per probe first (same
/// order as the probes), then distractors of non-probe test identities.
struct EvalSplit {
  DenseMatrix query_inputs;
  std::vector<std::size_t> query_ids;
  DenseMatrix gallery_inputs;
  std::vector<std::size_t> gallery_ids;

  std::size_t num_queries() const noexcept { return query_ids.size(); }
  std::size_t gallery_size() const noexcept { return gallery_ids.size(); }
  // Same probes, gallery truncated to the first `size` rows.
  EvalSplit with_gallery_prefix(std::size_t size) const;
};

/// Samples min(max_queries, gallery_size) probe identities from the test set.
/// Throws kGallerySizeTooSmall when gallery_size < 1.
EvalSplit build_eval_split(const IdentityWorld& world, std::size_t gallery_size, std::mt19937_64& rng,
                           std::size_t max_queries = 50);

}  // namespace pairlab
