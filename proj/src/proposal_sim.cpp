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

#include "pairlab/proposal_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pairlab/error.hpp"

namespace pairlab {

namespace {

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, double stddev, std::mt19937_64& rng) {
  DenseMatrix m(rows, cols);
  std::normal_distribution<double> normal(0.0, stddev);
  for (double& x : m.values()) x = normal(rng);
  return m;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kInvalidConfig, field + ": " + why);
}

}  // namespace

void WorldConfig::validate() const {
  if (num_train_identities < 1) invalid("num_train_identities", "must be >= 1");
  if (num_test_identities < 1) invalid("num_test_identities", "must be >= 1");
  if (latent_dim < 1) invalid("latent_dim", "must be >= 1");
  if (input_dim < 1) invalid("input_dim", "must be >= 1");
  if (!(observation_noise_sigma > 0.0)) invalid("observation_noise_sigma", "must be > 0");
  if (proposals_per_identity_min < 1 || proposals_per_identity_max < proposals_per_identity_min) {
    invalid("proposals_per_identity_max", "need 1 <= min <= max");
  }
  if (backgrounds_stored_per_image > backgrounds_generated_per_image) {
    invalid("backgrounds_stored_per_image", "must not exceed backgrounds_generated_per_image");
  }
  if (identities_per_image < 1) invalid("identities_per_image", "must be >= 1");
  if (shared_identities_per_pair < 1 || shared_identities_per_pair > identities_per_image) {
    invalid("shared_identities_per_pair", "need 1 <= shared <= identities_per_image");
  }
  if (2 * identities_per_image - shared_identities_per_pair > num_train_identities) {
    invalid("identities_per_image", "scene pair needs more distinct identities than exist");
  }
  if (nuisance_scale < 0.0) invalid("nuisance_scale", "must be >= 0");
  if (!(background_spread > 0.0)) invalid("background_spread", "must be > 0");
}

std::size_t WorldConfig::nominal_proposals_per_image() const {
  return backgrounds_generated_per_image +
         (identities_per_image + unlabeled_identities_per_image) * proposals_per_identity_max;
}

IdentityWorld::IdentityWorld(const WorldConfig& config) : config_(config) {
  config_.validate();
  std::mt19937_64 rng(config_.seed);
  const std::size_t d = config_.latent_dim;

  observation_map_ = gaussian_matrix(config_.input_dim, d, 1.0 / std::sqrt(static_cast<double>(d)), rng);
  if (config_.nuisance_dim > 0) {
    nuisance_map_ = gaussian_matrix(config_.input_dim, config_.nuisance_dim,
                                    1.0 / std::sqrt(static_cast<double>(config_.nuisance_dim)), rng);
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  DenseVector direction(d);
  for (double& x : direction) x = normal(rng);
  const double len = norm(direction);
  background_center_.resize(d);
  for (std::size_t i = 0; i < d; ++i) background_center_[i] = config_.background_offset * direction[i] / len;

  // No prototype may sit within two standard radii of the background cloud.
  const double guard = 2.0 * config_.background_spread * std::sqrt(static_cast<double>(d));
  auto draw_prototypes = [&](std::size_t count) {
    DenseMatrix protos(count, d);
    for (std::size_t r = 0; r < count; ++r) {
      auto p = protos.row(r);
      do {
        for (double& x : p) x = normal(rng);
      } while (distance(p, background_center_) < guard);
    }
    return protos;
  };
  train_prototypes_ = draw_prototypes(config_.num_train_identities);
  test_prototypes_ = draw_prototypes(config_.num_test_identities);
}

std::span<const double> IdentityWorld::prototype(std::size_t id) const {
  if (id >= 1 && id <= config_.num_train_identities) return train_prototypes_.row(id - 1);
  if (id >= first_test_id() && id < first_test_id() + config_.num_test_identities) {
    return test_prototypes_.row(id - first_test_id());
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown identity " + std::to_string(id));
}

DenseVector IdentityWorld::observe_latent(std::span<const double> latent, std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseVector x(config_.input_dim);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = dot(observation_map_.row(i), latent);
  if (config_.nuisance_dim > 0 && config_.nuisance_scale > 0.0) {
    DenseVector z(config_.nuisance_dim);
    for (double& v : z) v = config_.nuisance_scale * normal(rng);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dot(nuisance_map_.row(i), z);
  }
  for (double& v : x) v += config_.observation_noise_sigma * normal(rng);
  return x;
}

DenseVector IdentityWorld::observe_identity(std::size_t id, std::mt19937_64& rng) const {
  return observe_latent(prototype(id), rng);
}

DenseVector IdentityWorld::observe_background(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, config_.background_spread);
  DenseVector latent = background_center_;
  for (double& v : latent) v += normal(rng);
  return observe_latent(latent, rng);
}

IdentityWorld build_world(const WorldConfig& config) { return IdentityWorld(config); }

ScenePair sample_scene_pair(const IdentityWorld& world, std::mt19937_64& rng) {
  const WorldConfig& cfg = world.config();
  const std::size_t per_image = cfg.identities_per_image;
  const std::size_t shared = cfg.shared_identities_per_pair;

  // Draw shared + 2 * (per_image - shared) distinct training identities.
  std::vector<std::size_t> ids(cfg.num_train_identities);
  std::iota(ids.begin(), ids.end(), std::size_t{1});
  const std::size_t needed = shared + 2 * (per_image - shared);
  for (std::size_t i = 0; i < needed; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, ids.size() - 1);
    std::swap(ids[i], ids[pick(rng)]);
  }
  std::vector<std::size_t> present0(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(per_image));
  std::vector<std::size_t> present1(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(shared));
  present1.insert(present1.end(), ids.begin() + static_cast<std::ptrdiff_t>(per_image),
                  ids.begin() + static_cast<std::ptrdiff_t>(needed));

  std::uniform_int_distribution<std::size_t> count(cfg.proposals_per_identity_min, cfg.proposals_per_identity_max);
  auto fill_image = [&](const std::vector<std::size_t>& present) {
    std::vector<Proposal> props;
    for (std::size_t id : present) {
      const std::size_t n = count(rng);
      for (std::size_t j = 0; j < n; ++j) {
        props.push_back({world.observe_identity(id, rng), IdentityLabel::identity(id), true});
      }
    }
    for (std::size_t u = 0; u < cfg.unlabeled_identities_per_image; ++u) {
      DenseVector latent(cfg.latent_dim);
      std::normal_distribution<double> normal(0.0, 1.0);
      for (double& v : latent) v = normal(rng);
      const std::size_t n = count(rng);
      for (std::size_t j = 0; j < n; ++j) {
        props.push_back({world.observe_latent(latent, rng), IdentityLabel::unlabeled(), true});
      }
    }
    const std::size_t first_bg = props.size();
    for (std::size_t b = 0; b < cfg.backgrounds_generated_per_image; ++b) {
      props.push_back({world.observe_background(rng), IdentityLabel::background(), false});
    }
    // Store a uniformly random subset of the generated backgrounds.
    std::vector<std::size_t> bg(cfg.backgrounds_generated_per_image);
    std::iota(bg.begin(), bg.end(), first_bg);
    for (std::size_t i = 0; i < cfg.backgrounds_stored_per_image; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, bg.size() - 1);
      std::swap(bg[i], bg[pick(rng)]);
      props[bg[i]].store_in_dictionary = true;
    }
    return props;
  };

  ScenePair pair;
  pair.image0 = fill_image(present0);
  pair.image1 = fill_image(present1);
  for (std::size_t id : present0) {
    if (std::find(present1.begin(), present1.end(), id) != present1.end()) pair.shared_identities.push_back(id);
  }
  return pair;
}

EvalSplit EvalSplit::with_gallery_prefix(std::size_t size) const {
  if (size < num_queries() || size > gallery_size()) {
    throw Error(ErrorCode::kGallerySizeTooSmall, "prefix " + std::to_string(size) + " must lie in [" +
                                                     std::to_string(num_queries()) + ", " +
                                                     std::to_string(gallery_size()) + "]");
  }
  EvalSplit out;
  out.query_inputs = query_inputs;
  out.query_ids = query_ids;
  out.gallery_ids.assign(gallery_ids.begin(), gallery_ids.begin() + static_cast<std::ptrdiff_t>(size));
  for (std::size_t r = 0; r < size; ++r) out.gallery_inputs.append_row(gallery_inputs.row(r));
  return out;
}

EvalSplit build_eval_split(const IdentityWorld& world, std::size_t gallery_size, std::mt19937_64& rng,
                           std::size_t max_queries) {
  if (gallery_size < 1) throw Error(ErrorCode::kGallerySizeTooSmall, "gallery_size must be >= 1");
  if (max_queries < 1) throw Error(ErrorCode::kInvalidArgument, "max_queries must be >= 1");
  const std::size_t num_test = world.config().num_test_identities;
  const std::size_t nq = std::min({max_queries, gallery_size, num_test});

  std::vector<std::size_t> ids(num_test);
  std::iota(ids.begin(), ids.end(), world.first_test_id());
  std::shuffle(ids.begin(), ids.end(), rng);
  const std::vector<std::size_t> probes(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(nq));
  const std::vector<std::size_t> distractors(ids.begin() + static_cast<std::ptrdiff_t>(nq), ids.end());
  if (gallery_size > nq && distractors.empty()) {
    throw Error(ErrorCode::kGallerySizeTooSmall,
                "no distractor identities left; lower num_queries or the gallery size");
  }

  EvalSplit split;
  for (std::size_t id : probes) {
    split.query_inputs.append_row(world.observe_identity(id, rng));
    split.query_ids.push_back(id);
  }
  for (std::size_t id : probes) {
    split.gallery_inputs.append_row(world.observe_identity(id, rng));
    split.gallery_ids.push_back(id);
  }
  for (std::size_t i = 0; split.gallery_ids.size() < gallery_size; ++i) {
    const std::size_t id = distractors[i % distractors.size()];
    split.gallery_inputs.append_row(world.observe_identity(id, rng));
    split.gallery_ids.push_back(id);
  }
  return split;
}

}  // namespace pairlab
