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

#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "pairlab/error.hpp"

namespace pairlab {
namespace {

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

WorldConfig seeded(std::uint64_t seed) {
  WorldConfig cfg;
  cfg.seed = seed;
  return cfg;
}

TEST(BuildWorld, DeterministicUnderSeed) {
  const auto a = build_world(seeded(4));
  const auto b = build_world(seeded(4));
  const auto c = build_world(seeded(5));
  EXPECT_EQ(a.train_prototypes(), b.train_prototypes());
  EXPECT_EQ(a.observation_map(), b.observation_map());
  EXPECT_NE(a.train_prototypes(), c.train_prototypes());
  std::mt19937_64 r1(1);
  std::mt19937_64 r2(1);
  EXPECT_EQ(sample_scene_pair(a, r1).image0[0].input, sample_scene_pair(b, r2).image0[0].input);
}

TEST(BuildWorld, TrainAndTestIdsAreDisjoint) {
  const auto world = build_world(seeded(1));
  EXPECT_EQ(world.first_test_id(), 201u);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const auto pair = sample_scene_pair(world, rng);
    for (const auto* img : {&pair.image0, &pair.image1}) {
      for (const auto& p : *img) {
        if (p.label.is_identity()) EXPECT_LE(p.label.identity_index(), 200u);
      }
    }
  }
  const auto split = build_eval_split(world, 100, rng);
  for (std::size_t id : split.gallery_ids) EXPECT_GE(id, world.first_test_id());
}

TEST(BuildWorld, WithinIdentityCloserThanBetween) {
  const auto world = build_world(seeded(3));
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> pick(1, 200);
  double within = 0.0;
  double between = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t a = pick(rng);
    std::size_t b = pick(rng);
    while (b == a) b = pick(rng);
    const auto x = world.observe_identity(a, rng);
    within += distance(x, world.observe_identity(a, rng));
    between += distance(x, world.observe_identity(b, rng));
  }
  EXPECT_LT(within, between);
}

TEST(BuildWorld, BackgroundsAreSeparatedFromPrototypes) {
  const auto world = build_world(seeded(6));
  const double sigma = world.config().observation_noise_sigma;
  for (std::size_t c = 1; c <= 300; ++c) {
    EXPECT_GT(distance(world.prototype(c), world.background_center()), 2.0 * sigma);
  }
}

TEST(WorldConfig, Validation) {
  WorldConfig cfg;
  cfg.backgrounds_stored_per_image = 40;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = WorldConfig{};
  cfg.observation_noise_sigma = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = WorldConfig{};
  cfg.num_test_identities = 0;
  EXPECT_THROW(cfg.validate(), Error);
  EXPECT_EQ(WorldConfig{}.nominal_proposals_per_image(), 42u);
}

TEST(SampleScenePair, SharedIdentityAndStoredBackgrounds) {
  const auto world = build_world(seeded(7));
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    const auto pair = sample_scene_pair(world, rng);
    ASSERT_EQ(pair.shared_identities.size(), 1u);
    const auto id = IdentityLabel::identity(pair.shared_identities[0]);
    for (const auto* img : {&pair.image0, &pair.image1}) {
      std::size_t stored_bg = 0;
      std::size_t found = 0;
      for (const auto& p : *img) {
        if (p.label.is_background() && p.store_in_dictionary) ++stored_bg;
        if (p.label == id) ++found;
        if (!p.label.is_background()) EXPECT_TRUE(p.store_in_dictionary);
      }
      EXPECT_EQ(stored_bg, 5u);
      EXPECT_GE(found, 1u);
    }
  }
}

// Per image: 4 identities x U{1,2} proposals (mean 6, var 1), one unlabeled
// person x U{1,2} (mean 1.5, var 0.25), exactly 32 backgrounds.
TEST(SampleScenePair, LabelHistogramWithinThreeSigma) {
  const auto world = build_world(seeded(9));
  std::mt19937_64 rng(10);
  const int images = 2000;
  double ids = 0.0;
  double unlabeled = 0.0;
  double backgrounds = 0.0;
  for (int i = 0; i < images / 2; ++i) {
    const auto pair = sample_scene_pair(world, rng);
    for (const auto* img : {&pair.image0, &pair.image1}) {
      std::set<std::size_t> distinct;
      for (const auto& p : *img) {
        if (p.label.is_identity()) {
          ids += 1;
          distinct.insert(p.label.identity_index());
        }
        if (p.label.is_unlabeled()) unlabeled += 1;
        if (p.label.is_background()) backgrounds += 1;
      }
      EXPECT_EQ(distinct.size(), 4u);
    }
  }
  EXPECT_NEAR(ids, 6.0 * images, 3.0 * std::sqrt(1.0 * images));
  EXPECT_NEAR(unlabeled, 1.5 * images, 3.0 * std::sqrt(0.25 * images));
  EXPECT_EQ(backgrounds, 32.0 * images);
}

TEST(EvalSplit, SingleItemGallery) {
  const auto world = build_world(seeded(11));
  std::mt19937_64 rng(12);
  const auto split = build_eval_split(world, 1, rng);
  ASSERT_EQ(split.num_queries(), 1u);
  ASSERT_EQ(split.gallery_size(), 1u);
  EXPECT_EQ(split.gallery_ids[0], split.query_ids[0]);
  try {
    build_eval_split(world, 0, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGallerySizeTooSmall);
  }
}

TEST(EvalSplit, ExactlyOneMatchPerProbe) {
  const auto world = build_world(seeded(13));
  std::mt19937_64 rng(14);
  const auto split = build_eval_split(world, 100, rng, 30);
  EXPECT_EQ(split.num_queries(), 30u);
  EXPECT_EQ(split.gallery_size(), 100u);
  for (std::size_t q = 0; q < split.num_queries(); ++q) {
    EXPECT_EQ(std::count(split.gallery_ids.begin(), split.gallery_ids.end(), split.query_ids[q]), 1);
    EXPECT_EQ(split.gallery_ids[q], split.query_ids[q]);
  }
  const auto prefix = split.with_gallery_prefix(50);
  EXPECT_EQ(prefix.gallery_size(), 50u);
  EXPECT_EQ(prefix.query_ids, split.query_ids);
  EXPECT_EQ(prefix.gallery_inputs.row(49)[0], split.gallery_inputs.row(49)[0]);
}

}  // namespace
}  // namespace pairlab
