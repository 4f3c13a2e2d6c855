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

#include "pairlab/experiments.hpp"

#include <algorithm>
#include <ostream>
#include <random>

#include "pairlab/error.hpp"
#include "pairlab/format.hpp"
#include "pairlab/gradient_check.hpp"
#include "pairlab/hep_loss.hpp"
#include "pairlab/olp_loss.hpp"
#include "pairlab/training.hpp"

namespace pairlab {

namespace {

EvalReport train_cell(RunConfig config, const std::optional<std::filesystem::path>& dir) {
  if (dir) return train_to_directory(config, *dir).final;
  Trainer trainer(std::move(config));
  return run_training(trainer, {}).final;
}

void write_report_columns(std::ostream& out, const EvalReport& r) {
  out << fmt_double(r.top1) << ',' << fmt_double(r.top5) << ',' << fmt_double(r.top10) << ','
      << fmt_double(r.mean_ap);
}

DenseVector random_unit(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseVector v(dim);
  for (double& x : v) x = normal(rng);
  return l2_normalize(v);
}

double olp_suite(std::mt19937_64& rng) {
  double worst = 0.0;
  constexpr std::size_t kSizes[] = {1, 4, 16, 64};
  for (std::size_t trial = 0; trial < 100; ++trial) {
    const std::size_t k = kSizes[trial % 4];
    const std::size_t m = 1 + trial % 3;
    OlpBatch batch;
    for (std::size_t i = 0; i < m; ++i) {
      auto neg = std::make_shared<NegativeSet>();
      for (std::size_t j = 0; j < k; ++j) {
        neg->features.append_row(random_unit(32, rng));
        neg->labels.push_back(IdentityLabel::identity(2 + j));
      }
      batch.subgroups.push_back({random_unit(32, rng), random_unit(32, rng), neg, 1, {}, {}});
    }
    DenseVector point, analytic;
    const OlpGradient g = olp_gradient(batch);
    for (std::size_t i = 0; i < m; ++i) {
      point.insert(point.end(), batch.subgroups[i].anchor.begin(), batch.subgroups[i].anchor.end());
      analytic.insert(analytic.end(), g.subgroups[i].anchor.begin(), g.subgroups[i].anchor.end());
    }
    auto f = [&](std::span<const double> x) {
      OlpBatch b = batch;
      for (std::size_t i = 0; i < m; ++i) {
        std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(i * 32), 32, b.subgroups[i].anchor.begin());
      }
      return olp_loss(b);
    };
    worst = std::max(worst, gradient_check(f, analytic, point).max_relative_error);
  }
  return worst;
}

double hep_suite(std::mt19937_64& rng) {
  double worst = 0.0;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t trial = 0; trial < 50; ++trial) {
    const std::size_t classes = 5 + trial % 46;  // C + 1 <= 50
    const std::size_t dim = 8;
    const std::size_t n = 1 + trial % 6;
    ClassifierHead head = ClassifierHead::random(classes, dim, 2.0, rng);
    for (double& b : head.params.bias) b = 0.5 * normal(rng);

    HepBatch batch;
    std::uniform_int_distribution<std::size_t> cls(0, classes - 1);
    for (std::size_t i = 0; i < n; ++i) {
      batch.features.append_row(random_unit(dim, rng));
      batch.true_classes.push_back(cls(rng));
    }
    HepConfig cfg{std::min<std::size_t>(20, classes), 20, classes};
    const SelectionPool pool = select_classes(batch.true_classes, {}, cfg, rng);
    const HepGradient g = hep_gradient(head, batch, pool);

    // Parameters laid out as [W | b | features].
    DenseVector point, analytic;
    const auto append = [](DenseVector& dst, std::span<const double> src) { dst.insert(dst.end(), src.begin(), src.end()); };
    append(point, head.params.weights.values());
    append(point, head.params.bias);
    append(point, batch.features.values());
    append(analytic, g.head.weights.values());
    append(analytic, g.head.bias);
    append(analytic, g.features.values());
    const std::size_t nw = head.params.weights.size();
    const std::size_t nb = head.params.bias.size();
    auto f = [&](std::span<const double> x) {
      ClassifierHead h = head;
      HepBatch b = batch;
      std::copy_n(x.begin(), nw, h.params.weights.values().begin());
      std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(nw), nb, h.params.bias.begin());
      std::copy(x.begin() + static_cast<std::ptrdiff_t>(nw + nb), x.end(), b.features.values().begin());
      return hep_loss(h, b, pool);
    };
    worst = std::max(worst, gradient_check(f, analytic, point).max_relative_error);
  }
  return worst;
}

double normalization_suite(std::mt19937_64& rng) {
  double worst = 0.0;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t trial = 0; trial < 50; ++trial) {
    DenseVector v(16), c(16);
    for (double& x : v) x = 3.0 * normal(rng);
    for (double& x : c) x = normal(rng);
    auto f = [&](std::span<const double> x) { return dot(l2_normalize(x), c); };
    worst = std::max(worst, gradient_check(f, l2_normalize_backward(v, c), v).max_relative_error);
  }
  return worst;
}

double network_suite(std::mt19937_64& rng) {
  double worst = 0.0;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t trial = 0; trial < 10; ++trial) {
    EmbeddingConfig cfg;
    cfg.input_dim = 10;
    cfg.hidden_dims = {12, 8};
    cfg.embed_dim = 6;
    cfg.output_init_scale = 1.0;
    EmbeddingNetwork net(cfg, rng);
    for (auto& layer : net.mutable_layers()) {
      for (double& b : layer.bias) b = 0.1 * normal(rng);
    }
    DenseMatrix inputs(5, cfg.input_dim);
    for (double& x : inputs.values()) x = normal(rng);
    DenseMatrix weights(5, cfg.embed_dim);
    for (double& x : weights.values()) x = normal(rng);

    net.forward(inputs);
    const ParameterGradients grads = net.backward(weights);
    DenseVector point, analytic;
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
      const auto& p = net.layers()[l];
      point.insert(point.end(), p.weights.values().begin(), p.weights.values().end());
      point.insert(point.end(), p.bias.begin(), p.bias.end());
      const auto& g = grads.layers[l];
      analytic.insert(analytic.end(), g.weights.values().begin(), g.weights.values().end());
      analytic.insert(analytic.end(), g.bias.begin(), g.bias.end());
    }
    auto f = [&](std::span<const double> x) {
      EmbeddingNetwork copy = net;
      std::size_t off = 0;
      for (auto& layer : copy.mutable_layers()) {
        for (double& w : layer.weights.values()) w = x[off++];
        for (double& b : layer.bias) b = x[off++];
      }
      const DenseMatrix out = copy.infer(inputs).normalized;
      return dot(out.values(), weights.values());
    };
    worst = std::max(worst, gradient_check(f, analytic, point).max_relative_error);
  }
  return worst;
}

}  // namespace

std::vector<AblationRow> run_ablation(const RunConfig& config, const std::optional<std::filesystem::path>& dir) {
  std::vector<AblationRow> rows;
  for (LossMode mode : {LossMode::kOlpOnly, LossMode::kOlpSoftmax, LossMode::kOlpHep}) {
    RunConfig cell = config;
    cell.loss_mode = mode;
    std::optional<std::filesystem::path> cell_dir;
    if (dir) cell_dir = *dir / std::string(to_string(mode));
    rows.push_back({mode, train_cell(cell, cell_dir)});
  }
  return rows;
}

void write_ablation_csv(std::ostream& out, const std::vector<AblationRow>& rows) {
  out << "loss_mode,top1,top5,top10,map\n";
  for (const auto& row : rows) {
    out << to_string(row.loss_mode) << ',';
    write_report_columns(out, row.report);
    out << '\n';
  }
}

std::vector<DictSweepRow> run_dict_sweep(const RunConfig& config, const std::optional<std::filesystem::path>& dir) {
  std::vector<DictSweepRow> rows;
  for (LossMode mode : {LossMode::kOlpOnly, LossMode::kOlpHep}) {
    for (std::size_t multiplier : config.dict_multipliers) {
      RunConfig cell = config;
      cell.loss_mode = mode;
      cell.dictionary_capacity_multiplier = multiplier;
      std::optional<std::filesystem::path> cell_dir;
      if (dir) cell_dir = *dir / (std::string(to_string(mode)) + "_x" + std::to_string(multiplier));
      rows.push_back({mode, multiplier, cell.dictionary_capacity(), train_cell(cell, cell_dir)});
    }
  }
  return rows;
}

void write_dictsweep_csv(std::ostream& out, const std::vector<DictSweepRow>& rows) {
  out << "loss_mode,multiplier,capacity,top1,top5,top10,map\n";
  for (const auto& row : rows) {
    out << to_string(row.loss_mode) << ',' << row.multiplier << ',' << row.capacity << ',';
    write_report_columns(out, row.report);
    out << '\n';
  }
}

std::vector<EvalReport> run_gallery_sweep(const RunConfig& config, const EmbeddingNetwork& net) {
  RunConfig cfg = config;
  cfg.sync();
  if (!cfg.seed) throw Error(ErrorCode::kInvalidConfig, "seed: required");
  const IdentityWorld world(cfg.world);
  std::mt19937_64 rng(derive_seed(*cfg.seed, 6));
  return gallery_sweep(net, world, cfg.gallery_sizes, rng, cfg.num_queries);
}

std::vector<GradcheckSuite> run_gradcheck_suites(std::uint64_t seed) {
  std::vector<GradcheckSuite> suites;
  std::mt19937_64 rng(seed);
  suites.push_back({"l2_normalize", 50, normalization_suite(rng)});
  suites.push_back({"olp_anchor", 100, olp_suite(rng)});
  suites.push_back({"hep_head_and_features", 50, hep_suite(rng)});
  suites.push_back({"network_backprop", 10, network_suite(rng)});
  return suites;
}

}  // namespace pairlab
