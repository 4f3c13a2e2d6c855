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

#include "pairlab/retrieval_eval.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <string>

#include "pairlab/error.hpp"
#include "pairlab/format.hpp"

namespace pairlab {

DenseMatrix extract_embeddings(const EmbeddingNetwork& net, const DenseMatrix& inputs) {
  return net.infer(inputs).normalized;
}

double average_precision(const std::vector<bool>& ranked_relevance) {
  double hits = 0.0;
  double sum = 0.0;
  for (std::size_t r = 0; r < ranked_relevance.size(); ++r) {
    if (ranked_relevance[r]) {
      hits += 1.0;
      sum += hits / static_cast<double>(r + 1);
    }
  }
  if (hits == 0.0) throw Error(ErrorCode::kNoRelevantItem, "ranking has no relevant item");
  return sum / hits;
}

EvalReport evaluate(const DenseMatrix& query_features, std::span<const std::size_t> query_ids,
                    const DenseMatrix& gallery_features, std::span<const std::size_t> gallery_ids) {
  if (query_features.rows() != query_ids.size() || gallery_features.rows() != gallery_ids.size()) {
    throw Error(ErrorCode::kShapeMismatch, "evaluate: one id per feature row required");
  }
  if (query_ids.empty()) throw Error(ErrorCode::kInvalidArgument, "evaluate: no queries");
  if (query_features.cols() != gallery_features.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "evaluate: query and gallery dims differ");
  }

  EvalReport report;
  report.gallery_size = gallery_ids.size();
  report.num_queries = query_ids.size();
  std::size_t hit1 = 0, hit5 = 0, hit10 = 0;
  std::vector<double> scores(gallery_ids.size());
  std::vector<std::size_t> order(gallery_ids.size());

  for (std::size_t q = 0; q < query_ids.size(); ++q) {
    for (std::size_t g = 0; g < gallery_ids.size(); ++g) scores[g] = dot(query_features.row(q), gallery_features.row(g));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<bool> ranked(order.size());
    std::size_t first_hit = order.size();
    for (std::size_t r = 0; r < order.size(); ++r) {
      ranked[r] = gallery_ids[order[r]] == query_ids[q];
      if (ranked[r] && first_hit == order.size()) first_hit = r;
    }
    if (first_hit == order.size()) {
      throw Error(ErrorCode::kNoRelevantItem, "query " + std::to_string(q) + " (id " +
                                                  std::to_string(query_ids[q]) + ") has no gallery match");
    }
    hit1 += first_hit < 1;
    hit5 += first_hit < 5;
    hit10 += first_hit < 10;
    report.per_query_ap.push_back(average_precision(ranked));
  }
  const double n = static_cast<double>(query_ids.size());
  report.top1 = static_cast<double>(hit1) / n;
  report.top5 = static_cast<double>(hit5) / n;
  report.top10 = static_cast<double>(hit10) / n;
  report.mean_ap = std::accumulate(report.per_query_ap.begin(), report.per_query_ap.end(), 0.0) / n;
  return report;
}

EvalReport evaluate_split(const EmbeddingNetwork& net, const EvalSplit& split) {
  return evaluate(extract_embeddings(net, split.query_inputs), split.query_ids,
                  extract_embeddings(net, split.gallery_inputs), split.gallery_ids);
}

std::vector<EvalReport> gallery_sweep(const EmbeddingNetwork& net, const IdentityWorld& world,
                                      std::span<const std::size_t> sizes, std::mt19937_64& rng,
                                      std::size_t max_queries) {
  if (sizes.empty()) return {};
  if (!std::is_sorted(sizes.begin(), sizes.end())) {
    throw Error(ErrorCode::kInvalidArgument, "gallery sizes must be ascending");
  }
  if (sizes.front() < 1) throw Error(ErrorCode::kGallerySizeTooSmall, "gallery_size must be >= 1");
  const std::size_t nq = std::min(max_queries, sizes.front());
  const EvalSplit full = build_eval_split(world, sizes.back(), rng, nq);
  const DenseMatrix queries = extract_embeddings(net, full.query_inputs);
  const DenseMatrix gallery = extract_embeddings(net, full.gallery_inputs);

  std::vector<EvalReport> reports;
  for (std::size_t size : sizes) {
    DenseMatrix prefix;
    for (std::size_t r = 0; r < size; ++r) prefix.append_row(gallery.row(r));
    reports.push_back(evaluate(queries, full.query_ids, prefix,
                               std::span<const std::size_t>(full.gallery_ids).first(size)));
  }
  return reports;
}

void write_eval_csv_header(std::ostream& out) { out << "gallery_size,num_queries,top1,top5,top10,map\n"; }

void write_eval_csv_row(std::ostream& out, const EvalReport& report) {
  out << report.gallery_size << ',' << report.num_queries << ',' << fmt_double(report.top1) << ','
      << fmt_double(report.top5) << ',' << fmt_double(report.top10) << ',' << fmt_double(report.mean_ap) << '\n';
}

}  // namespace pairlab
