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

#include "pairlab/feature_dictionary.hpp"

#include <deque>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "pairlab/error.hpp"

namespace pairlab {
namespace {

DenseVector unit(std::size_t dim, std::size_t axis) {
  DenseVector v(dim, 0.0);
  v[axis % dim] = 1.0;
  return v;
}

TEST(IdentityLabel, ClassIndices) {
  EXPECT_EQ(IdentityLabel::background().class_index(), 0u);
  EXPECT_EQ(IdentityLabel::identity(7).class_index(), 7u);
  EXPECT_FALSE(IdentityLabel::unlabeled().class_index().has_value());
  EXPECT_EQ(IdentityLabel::background().to_string(), "B");
  EXPECT_EQ(IdentityLabel::unlabeled().to_string(), "-1");
  EXPECT_EQ(IdentityLabel::identity(12).to_string(), "12");
  EXPECT_THROW(IdentityLabel::identity(0), Error);
}

TEST(FeatureDictionary, Capacity) {
  EXPECT_EQ(FeatureDictionary(5120).capacity(), 5120u);
  FeatureDictionary one(1);
  one.insert(unit(3, 0), IdentityLabel::identity(1));
  one.insert(unit(3, 1), IdentityLabel::identity(2));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.at(0).label, IdentityLabel::identity(2));
  try {
    FeatureDictionary zero(0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroCapacity);
  }
}

TEST(FeatureDictionary, EvictsOldestFirst) {
  FeatureDictionary dict(3);
  for (std::size_t c = 1; c <= 4; ++c) dict.insert(unit(4, c), IdentityLabel::identity(c));
  ASSERT_EQ(dict.size(), 3u);
  EXPECT_EQ(dict.at(0).label, IdentityLabel::identity(2));
  EXPECT_EQ(dict.at(1).label, IdentityLabel::identity(3));
  EXPECT_EQ(dict.at(2).label, IdentityLabel::identity(4));
  EXPECT_EQ(dict.at(0).insertion_counter, 1u);
  EXPECT_EQ(dict.next_counter(), 4u);
}

TEST(FeatureDictionary, BelowCapacityGrows) {
  FeatureDictionary dict(10);
  for (std::size_t i = 0; i < 4; ++i) {
    dict.insert(unit(2, i), IdentityLabel::background());
    EXPECT_EQ(dict.size(), i + 1);
  }
}

TEST(FeatureDictionary, RejectsUnnormalizedFeature) {
  FeatureDictionary dict(2);
  try {
    dict.insert(DenseVector{1.0, 1e-2}, IdentityLabel::background());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnnormalizedFeature);
  }
  EXPECT_NO_THROW(dict.insert(DenseVector{1.0 + 5e-7, 0.0}, IdentityLabel::background()));
}

TEST(FeatureDictionary, CopiesFeatures) {
  FeatureDictionary dict(2);
  DenseVector f = unit(3, 0);
  dict.insert(f, IdentityLabel::identity(1));
  f[0] = 0.0;
  EXPECT_EQ(dict.at(0).feature, unit(3, 0));
}

TEST(FeatureDictionary, ReplayOracle) {
  std::mt19937_64 rng(42);
  FeatureDictionary dict(640);
  std::deque<std::pair<std::size_t, std::uint64_t>> oracle;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const std::size_t c = 1 + rng() % 50;
    dict.insert(unit(8, c), IdentityLabel::identity(c));
    oracle.emplace_back(c, i);
    if (oracle.size() > 640) oracle.pop_front();
  }
  ASSERT_EQ(dict.size(), oracle.size());
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    EXPECT_EQ(dict.at(i).label.identity_index(), oracle[i].first);
    EXPECT_EQ(dict.at(i).insertion_counter, oracle[i].second);
  }
}

TEST(NegativesFor, ExcludesAnchorIdentityOnly) {
  FeatureDictionary dict(8);
  dict.insert(unit(4, 0), IdentityLabel::identity(5));
  dict.insert(unit(4, 1), IdentityLabel::background());
  dict.insert(unit(4, 2), IdentityLabel::unlabeled());
  dict.insert(unit(4, 3), IdentityLabel::identity(7));
  const auto neg = dict.negatives_for(5);
  ASSERT_EQ(neg.size(), 3u);
  EXPECT_EQ(neg[0].label, IdentityLabel::background());
  EXPECT_EQ(neg[1].label, IdentityLabel::unlabeled());
  EXPECT_EQ(neg[2].label, IdentityLabel::identity(7));
  EXPECT_EQ(*neg[2].feature, unit(4, 3));
  EXPECT_TRUE(FeatureDictionary(4).negatives_for(1).empty());
}

TEST(NegativesFor, CountOracle) {
  std::mt19937_64 rng(3);
  FeatureDictionary dict(5120);
  std::vector<IdentityLabel> labels;
  for (int i = 0; i < 6000; ++i) {
    const auto r = rng() % 12;
    const IdentityLabel label = r == 0   ? IdentityLabel::background()
                                : r == 1 ? IdentityLabel::unlabeled()
                                         : IdentityLabel::identity(r - 1);
    dict.insert(unit(4, i), label);
    labels.push_back(label);
  }
  for (std::size_t c = 1; c <= 10; ++c) {
    std::size_t same = 0;
    for (std::size_t i = labels.size() - 5120; i < labels.size(); ++i) {
      same += labels[i] == IdentityLabel::identity(c) ? 1 : 0;
    }
    const auto neg = dict.negatives_for(c);
    EXPECT_EQ(neg.size(), 5120 - same);
    for (const auto& n : neg) EXPECT_NE(n.label, IdentityLabel::identity(c));
  }
}

TEST(FeatureDictionary, SnapshotCsv) {
  FeatureDictionary dict(2);
  dict.insert(DenseVector{0.6, 0.8, 0.0, 0.0, 0.0}, IdentityLabel::identity(3));
  dict.insert(unit(5, 4), IdentityLabel::unlabeled());
  dict.insert(unit(5, 0), IdentityLabel::background());
  std::ostringstream out;
  dict.write_snapshot_csv(out);
  EXPECT_EQ(out.str(),
            "insertion_counter,label,f0,f1,f2,f3\n"
            "1,-1,0,0,0,0\n"
            "2,B,1,0,0,0\n");
}

}  // namespace
}  // namespace pairlab
