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

#include <cmath>
#include <cstdio>
#include <ostream>

#include "pairlab/error.hpp"

namespace pairlab {

IdentityLabel IdentityLabel::identity(std::size_t c) {
  if (c < 1) throw Error(ErrorCode::kInvalidArgument, "identity labels start at 1");
  return IdentityLabel(Kind::kIdentity, c);
}

std::optional<std::size_t> IdentityLabel::class_index() const noexcept {
  switch (kind_) {
    case Kind::kBackground: return 0;
    case Kind::kIdentity: return index_;
    case Kind::kUnlabeled: return std::nullopt;
  }
  return std::nullopt;
}

std::string IdentityLabel::to_string() const {
  switch (kind_) {
    case Kind::kBackground: return "B";
    case Kind::kUnlabeled: return "-1";
    case Kind::kIdentity: return std::to_string(index_);
  }
  return "?";
}

FeatureDictionary::FeatureDictionary(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw Error(ErrorCode::kZeroCapacity, "dictionary capacity must be >= 1");
  entries_.reserve(capacity);
}

void FeatureDictionary::insert(std::span<const double> feature, IdentityLabel label) {
  const double n = norm(feature);
  if (!(std::abs(n - 1.0) <= 1e-6)) {
    throw Error(ErrorCode::kUnnormalizedFeature, "dictionary feature has norm " + std::to_string(n));
  }
  DictEntry entry{DenseVector(feature.begin(), feature.end()), label, next_counter_++};
  if (entries_.size() < capacity_) {
    entries_.push_back(std::move(entry));
    return;
  }
  entries_[head_] = std::move(entry);
  head_ = (head_ + 1) % capacity_;
}

const DictEntry& FeatureDictionary::at(std::size_t i) const {
  if (i >= entries_.size()) throw Error(ErrorCode::kInvalidArgument, "dictionary index out of range");
  return entries_[(head_ + i) % entries_.size()];
}

std::vector<LabeledFeature> FeatureDictionary::negatives_for(std::size_t anchor_id) const {
  const auto anchor = IdentityLabel::identity(anchor_id);
  std::vector<LabeledFeature> out;
  out.reserve(entries_.size());
  for_each([&](const DictEntry& e) {
    if (e.label != anchor) out.push_back({&e.feature, e.label});
  });
  return out;
}

void FeatureDictionary::write_snapshot_csv(std::ostream& out) const {
  out << "insertion_counter,label,f0,f1,f2,f3\n";
  char buf[32];
  for_each([&](const DictEntry& e) {
    out << e.insertion_counter << ',' << e.label.to_string();
    for (std::size_t i = 0; i < 4; ++i) {
      out << ',';
      if (i < e.feature.size()) {
        std::snprintf(buf, sizeof(buf), "%.17g", e.feature[i]);
        out << buf;
      }
    }
    out << '\n';
  });
}

}  // namespace pairlab
