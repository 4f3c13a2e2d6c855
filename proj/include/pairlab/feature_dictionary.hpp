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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pairlab/dense.hpp"

namespace pairlab {

/// Proposal label: background, a person without identity annotation, or a
/// person of training identity c in [1, C]. Background is classifier class
/// 0; unlabeled persons have no classifier class.
class IdentityLabel {
 public:
  enum class Kind : std::uint8_t { kBackground, kUnlabeled, kIdentity };

  static constexpr IdentityLabel background() { return IdentityLabel(Kind::kBackground, 0); }
  static constexpr IdentityLabel unlabeled() { return IdentityLabel(Kind::kUnlabeled, 0); }
  // c must be >= 1.
  static IdentityLabel identity(std::size_t c);

  constexpr Kind kind() const noexcept { return kind_; }
  constexpr bool is_identity() const noexcept { return kind_ == Kind::kIdentity; }
  constexpr bool is_background() const noexcept { return kind_ == Kind::kBackground; }
  constexpr bool is_unlabeled() const noexcept { return kind_ == Kind::kUnlabeled; }
  // Identity index; only meaningful for kIdentity.
  constexpr std::size_t identity_index() const noexcept { return index_; }
  // Classifier class in the C+1 scheme, nullopt for unlabeled.
  std::optional<std::size_t> class_index() const noexcept;

  constexpr bool operator==(const IdentityLabel&) const = default;

  // "B", "-1" or the identity index.
  std::string to_string() const;

 private:
  constexpr IdentityLabel(Kind kind, std::size_t index) : kind_(kind), index_(index) {}

  Kind kind_;
  std::size_t index_;
};

struct DictEntry {
  DenseVector feature;
  IdentityLabel label;
  std::uint64_t insertion_counter = 0;
};

/// A dictionary negative as seen by the loss code.
struct LabeledFeature {
  const DenseVector* feature;
  IdentityLabel label;
};

/// Fixed-capacity FIFO of labeled unit features. When full, an insert
/// overwrites the entry with the smallest insertion counter.
class FeatureDictionary {
 public:
  // Throws kZeroCapacity when capacity == 0.
  explicit FeatureDictionary(std::size_t capacity);

  // Copies the feature. Throws kUnnormalizedFeature if | ||f|| - 1 | > 1e-6.
  void insert(std::span<const double> feature, IdentityLabel label);

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::uint64_t next_counter() const noexcept { return next_counter_; }

  // i-th oldest entry, i < size().
  const DictEntry& at(std::size_t i) const;

  // All entries not labeled Id(anchor_id), oldest first. Pointers stay valid
  // until the next insert.
  std::vector<LabeledFeature> negatives_for(std::size_t anchor_id) const;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) fn(at(i));
  }

  // CSV: insertion_counter,label,f0,f1,f2,f3 (oldest first).
  void write_snapshot_csv(std::ostream& out) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // index of the oldest entry once full
  std::uint64_t next_counter_ = 0;
  std::vector<DictEntry> entries_;
};

}  // namespace pairlab
