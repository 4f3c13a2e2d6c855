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

#include "pairlab/run_config.hpp"

#include <algorithm>

#include <gtest/gtest.h>

namespace pairlab {
namespace {

bool has_error(const std::vector<std::string>& errors, const std::string& prefix) {
  return std::any_of(errors.begin(), errors.end(), [&](const std::string& e) { return e.rfind(prefix, 0) == 0; });
}

TEST(RunConfig, DefaultsNeedOnlyASeed) {
  RunConfig cfg;
  EXPECT_TRUE(has_error(cfg.validate(), "seed"));
  cfg.seed = 1;
  cfg.sync();
  EXPECT_TRUE(cfg.validate().empty());
  EXPECT_EQ(cfg.hep.num_classes_total, 201u);
  EXPECT_EQ(cfg.sgd.total_iterations, 5000u);
  EXPECT_EQ(cfg.dictionary_capacity(), 40u * 42u);
  EXPECT_EQ(cfg.world.seed, derive_seed(1, 0));
}

TEST(RunConfig, ParsesFlatKeys) {
  const auto r = parse_run_config(R"({"seed": 9, "loss_mode": "olp_only", "total_iterations": 60,
                                      "num_train_identities": 30, "hidden_dims": [8, 4],
                                      "observation_noise_sigma": 0.3})");
  ASSERT_TRUE(r.errors.empty());
  EXPECT_EQ(r.config.seed, 9u);
  EXPECT_EQ(r.config.loss_mode, LossMode::kOlpOnly);
  EXPECT_EQ(r.config.sgd.total_iterations, 60u);
  EXPECT_EQ(r.config.hep.num_classes_total, 31u);
  EXPECT_EQ(r.config.embedding.hidden_dims, (std::vector<std::size_t>{8, 4}));
  EXPECT_EQ(r.config.world.observation_noise_sigma, 0.3);
}

TEST(RunConfig, ReportsEveryProblemWithFieldName) {
  const auto r = parse_run_config(R"({"seed": 1, "bogus": 3, "loss_mode": "triplet", "embed_dim": "wide"})");
  EXPECT_TRUE(has_error(r.errors, "bogus"));
  EXPECT_TRUE(has_error(r.errors, "loss_mode"));
  EXPECT_TRUE(has_error(r.errors, "embed_dim"));
  EXPECT_FALSE(parse_run_config("[1, 2]").errors.empty());
  EXPECT_FALSE(parse_run_config("{").errors.empty());
}

TEST(RunConfig, ValidationMessages) {
  auto r = parse_run_config(R"({"seed": 1, "dictionary_capacity_multiplier": 0, "gallery_sizes": [100, 50],
                                "backgrounds_stored_per_image": 99, "drop_lr": 0.5})");
  ASSERT_TRUE(r.errors.empty());
  const auto errors = r.config.validate();
  EXPECT_TRUE(has_error(errors, "dictionary_capacity_multiplier"));
  EXPECT_TRUE(has_error(errors, "gallery_sizes"));
  EXPECT_TRUE(has_error(errors, "world"));
  EXPECT_TRUE(has_error(errors, "sgd"));
}

TEST(RunConfig, JsonRoundTrip) {
  auto r = parse_run_config(R"({"seed": 5, "loss_mode": "olp_softmax", "eval_every": 7, "head_lr_multiplier": 3.5})");
  ASSERT_TRUE(r.errors.empty());
  const auto again = parse_run_config(to_json(r.config));
  ASSERT_TRUE(again.errors.empty());
  EXPECT_EQ(to_json(again.config), to_json(r.config));
  EXPECT_EQ(again.config.loss_mode, LossMode::kOlpSoftmax);
  EXPECT_EQ(again.config.head_lr_multiplier, 3.5);
}

TEST(LossMode, Names) {
  for (auto m : {LossMode::kOlpOnly, LossMode::kOlpSoftmax, LossMode::kOlpHep}) {
    EXPECT_EQ(parse_loss_mode(to_string(m)), m);
  }
  EXPECT_FALSE(parse_loss_mode("hep").has_value());
}

TEST(DeriveSeed, StreamsDiffer) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(3, 4), derive_seed(3, 4));
}

}  // namespace
}  // namespace pairlab
