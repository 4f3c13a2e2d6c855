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
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "pairlab/dense.hpp"
#include "pairlab/embedding.hpp"
#include "pairlab/proposal_sim.hpp"

namespace pairlab {

struct EvalReport {
  double top1 = 0.0;
  double top5 = 0.0;
  double top10 = 0.0;
  double mean_ap = 0.0;
  std::size_t gallery_size = 0;
  std::size_t num_queries = 0;
  std::vector<double> per_query_ap;
};

/// Inference-mode unit embeddings, one row per input row.
DenseMatrix extract_embeddings(const EmbeddingNetwork& net, const DenseMatrix& inputs);

/// Average precision of one ranked relevance list.
double average_precision(const std::vector<bool>& ranked_relevance);

/// Ranks the gallery for every query by descending inner product (ties go to
/// the lower gallery index) and reports CMC top-1/5/10 and mAP. Throws
/// kNoRelevantItem if a query id has no gallery match.
EvalReport evaluate(const DenseMatrix& query_features, std::span<const std::size_t> query_ids,
                    const DenseMatrix& gallery_features, std::span<const std::size_t> gallery_ids);

EvalReport evaluate_split(const EmbeddingNetwork& net, const EvalSplit& split);

/// One report per size over nested galleries drawn from a single split:
/// the gallery of size s is the first s rows of the gallery of the largest
/// size. `sizes` must be ascending.
std::vector<EvalReport> gallery_sweep(const EmbeddingNetwork& net, const IdentityWorld& world,
                                      std::span<const std::size_t> sizes, std::mt19937_64& rng,
                                      std::size_t max_queries = 50);

// gallery_size,num_queries,top1,top5,top10,map
void write_eval_csv_header(std::ostream& out);
void write_eval_csv_row(std::ostream& out, const EvalReport& report);

}  // namespace pairlab
