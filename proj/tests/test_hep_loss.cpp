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
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "pairlab/error.hpp"
#include "pairlab/gradient_check.hpp"

namespace pairlab {
namespace {

DenseVector random_unit(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseVector v(dim);
  for (double& x : v) x = normal(rng);
  const double n = norm(v);
  for (double& x : v) x /= n;
  return v;
}

HepConfig small_config(std::size_t classes, std::size_t m) {
  HepConfig cfg;
  cfg.num_classes_total = classes;
  cfg.num_selected = m;
  return cfg;
}

// Naive softmax over exactly the pooled classes.
double reference_loss(const ClassifierHead& head, const HepBatch& batch, const SelectionPool& pool) {
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    double denom = 0.0;
    for (std::size_t c : pool.classes) denom += std::exp(head.logit(c, batch.features.row(i)));
    total -= std::log(std::exp(head.logit(batch.true_classes[i], batch.features.row(i))) / denom);
  }
  return total / static_cast<double>(batch.size());
}

TEST(HepLoss, UniformLogitsGiveLogPoolSize) {
  const auto head = ClassifierHead::zeros(150, 8);
  HepBatch batch;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 3; ++i) {
    batch.features.append_row(random_unit(8, rng));
    batch.true_classes.push_back(static_cast<std::size_t>(i));
  }
  SelectionPool pool;
  for (std::size_t c = 0; c < 100; ++c) pool.classes.push_back(c);
  EXPECT_NEAR(hep_loss(head, batch, pool), std::log(100.0), 1e-12);
}

TEST(HepLoss, SaturatedPrediction) {
  auto head = ClassifierHead::zeros(4, 2);
  head.params.bias[2] = 50.0;
  HepBatch batch{DenseMatrix(1, 2, 0.5), {2}};
  const auto g = hep_gradient(head, batch, full_pool(4));
  EXPECT_LT(g.loss, 1e-20);
  for (double x : g.head.bias) EXPECT_LT(std::abs(x), 1e-20);
}

TEST(HepLoss, ThreeClassWorkedValue) {
  auto head = ClassifierHead::zeros(5, 2);
  head.params.bias = {0.0, 1.0, 2.0, 3.0, 9.0};
  HepBatch batch{DenseMatrix(1, 2, 0.0), {3}};
  SelectionPool pool{{1, 2, 3}, 3};
  EXPECT_NEAR(hep_loss(head, batch, pool), 0.407605964444380, 1e-12);
}

TEST(HepLoss, TrueClassMustBeSelected) {
  const auto head = ClassifierHead::zeros(5, 2);
  HepBatch batch{DenseMatrix(1, 2, 0.0), {4}};
  try {
    hep_loss(head, batch, SelectionPool{{0, 1}, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTrueClassNotSelected);
  }
  try {
    hep_loss(head, HepBatch{}, full_pool(5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyBatch);
  }
}

TEST(HepLoss, MatchesNaiveSoftmaxOnSmallInstances) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto head = ClassifierHead::random(12, 6, 3.0, rng);
    SelectionPool pool;
    std::vector<std::size_t> all(12);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::shuffle(all.begin(), all.end(), rng);
    pool.classes.assign(all.begin(), all.begin() + 2 + trial % 9);
    HepBatch batch;
    for (int i = 0; i < 4; ++i) {
      batch.features.append_row(random_unit(6, rng));
      batch.true_classes.push_back(pool.classes[rng() % pool.size()]);
    }
    const double l = hep_loss(head, batch, pool);
    EXPECT_NEAR(l, reference_loss(head, batch, pool), 1e-12);
    EXPECT_GE(l, 0.0);
  }
}

TEST(HepGradient, UniformTwoClassPattern) {
  const auto head = ClassifierHead::zeros(4, 2);
  HepBatch batch{DenseMatrix(1, 2, 0.0), {3}};
  const auto g = hep_gradient(head, batch, SelectionPool{{1, 3}, 2});
  EXPECT_DOUBLE_EQ(g.head.bias[1], 0.5);
  EXPECT_DOUBLE_EQ(g.head.bias[3], -0.5);
  EXPECT_EQ(g.head.bias[0], 0.0);
  EXPECT_EQ(g.head.bias[2], 0.0);
}

TEST(HepGradient, UnselectedRowsGetExactlyZero) {
  std::mt19937_64 rng(3);
  const auto head = ClassifierHead::random(30, 5, 1.0, rng);
  HepBatch batch;
  for (int i = 0; i < 5; ++i) {
    batch.features.append_row(random_unit(5, rng));
    batch.true_classes.push_back(static_cast<std::size_t>(2 * i));
  }
  const SelectionPool pool{{0, 2, 4, 6, 8, 11, 17}, 5};
  const auto g = hep_gradient(head, batch, pool);
  for (std::size_t c = 0; c < 30; ++c) {
    if (pool.contains(c)) continue;
    EXPECT_EQ(g.head.bias[c], 0.0);
    for (double w : g.head.weights.row(c)) EXPECT_EQ(w, 0.0);
  }
}

TEST(HepGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t classes = 5 + trial;
    const std::size_t dim = 4;
    const auto head = ClassifierHead::random(classes, dim, 2.0, rng);
    SelectionPool pool;
    for (std::size_t c = 0; c < classes; c += 1 + trial % 2) pool.classes.push_back(c);
    HepBatch batch;
    for (int i = 0; i < 3; ++i) {
      batch.features.append_row(random_unit(dim, rng));
      batch.true_classes.push_back(pool.classes[rng() % pool.size()]);
    }
    const auto g = hep_gradient(head, batch, pool);

    const auto hw = head.params.weights.values();
    DenseVector params(hw.begin(), hw.end());
    params.insert(params.end(), head.params.bias.begin(), head.params.bias.end());
    const auto gw = g.head.weights.values();
    DenseVector analytic(gw.begin(), gw.end());
    analytic.insert(analytic.end(), g.head.bias.begin(), g.head.bias.end());
    auto f_head = [&](std::span<const double> p) {
      ClassifierHead h = head;
      std::copy(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(h.params.weights.size()),
                h.params.weights.values().begin());
      std::copy(p.begin() + static_cast<std::ptrdiff_t>(h.params.weights.size()), p.end(), h.params.bias.begin());
      return reference_loss(h, batch, pool);
    };
    EXPECT_LT(gradient_check(f_head, analytic, params).max_relative_error, 1e-6);

    auto f_feat = [&](std::span<const double> x) {
      HepBatch b = batch;
      std::copy(x.begin(), x.end(), b.features.values().begin());
      return reference_loss(head, b, pool);
    };
    EXPECT_LT(gradient_check(f_feat, g.features.values(), batch.features.values()).max_relative_error, 1e-6);
  }
}

TEST(HardNegatives, SkipsUnlabeledAndRanksByDistance) {
  std::vector<NegativeStat> stats{{0.9, IdentityLabel::unlabeled()},
                                  {0.5, IdentityLabel::identity(3)},
                                  {0.8, IdentityLabel::background()},
                                  {0.5, IdentityLabel::identity(2)},
                                  {-0.2, IdentityLabel::identity(7)}};
  EXPECT_EQ(hard_negative_classes(stats, 3), (std::vector<std::size_t>{0, 3, 2}));
  EXPECT_EQ(hard_negative_classes(stats, 20), (std::vector<std::size_t>{0, 3, 2, 7}));
}

TEST(SelectClasses, FillExhaustsClassSet) {
  std::mt19937_64 rng(5);
  const std::vector<std::size_t> truth{3, 4, 0};
  const auto pool = select_classes(truth, {}, small_config(5, 5), rng);
  EXPECT_EQ(pool.mandatory, 3u);
  EXPECT_EQ(std::set<std::size_t>(pool.classes.begin(), pool.classes.end()), (std::set<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(pool.classes[0], 3u);
  EXPECT_EQ(pool.classes[2], 0u);
}

TEST(SelectClasses, SelectionSizeLargerThanClassSet) {
  std::mt19937_64 rng(15);
  const std::vector<std::size_t> truth{2};
  EXPECT_EQ(select_classes(truth, {}, small_config(5, 100), rng).size(), 5u);
}

TEST(SelectClasses, TopTwentyOfTwentyFive) {
  std::mt19937_64 rng(6);
  std::vector<NegativeStat> stats;
  for (std::size_t c = 1; c <= 25; ++c) stats.push_back({static_cast<double>(c) / 30.0, IdentityLabel::identity(c)});
  std::shuffle(stats.begin(), stats.end(), rng);
  const std::vector<std::vector<NegativeStat>> per{stats};
  const std::vector<std::size_t> truth{100};
  const auto pool = select_classes(truth, per, small_config(201, 100), rng);
  EXPECT_EQ(pool.size(), 100u);
  EXPECT_EQ(pool.mandatory, 21u);
  for (std::size_t c = 6; c <= 25; ++c) {
    EXPECT_NE(std::find(pool.classes.begin(), pool.classes.begin() + 21, c), pool.classes.begin() + 21) << c;
  }
}

TEST(SelectClasses, MandatoryMayExceedM) {
  std::mt19937_64 rng(7);
  std::vector<std::size_t> truth(110);
  std::iota(truth.begin(), truth.end(), std::size_t{0});
  const auto pool = select_classes(truth, {}, small_config(201, 100), rng);
  EXPECT_EQ(pool.size(), 110u);
  EXPECT_EQ(pool.mandatory, 110u);
}

TEST(SelectClasses, DeterministicAndDuplicateFree) {
  const std::vector<std::size_t> truth{0, 5, 5, 9, 0};
  const std::vector<std::vector<NegativeStat>> per{{{0.3, IdentityLabel::identity(9)}, {0.2, IdentityLabel::identity(12)}}};
  std::mt19937_64 a(8);
  std::mt19937_64 b(8);
  const auto p1 = select_classes(truth, per, small_config(201, 100), a);
  const auto p2 = select_classes(truth, per, small_config(201, 100), b);
  EXPECT_EQ(p1.classes, p2.classes);
  EXPECT_EQ(p1.mandatory, 4u);
  EXPECT_EQ(std::set<std::size_t>(p1.classes.begin(), p1.classes.end()).size(), p1.size());
}

TEST(FullPool, ListsEveryClass) {
  const auto pool = full_pool(4);
  EXPECT_EQ(pool.classes, (std::vector<std::size_t>{0, 1, 2, 3}));
}

}  // namespace
}  // namespace pairlab
