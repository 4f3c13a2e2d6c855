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

#include "pairlab/training.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pairlab/checkpoint.hpp"
#include "pairlab/error.hpp"
#include "pairlab/format.hpp"
#include "pairlab/olp_loss.hpp"

namespace pairlab {

namespace {

enum Stream : std::uint64_t { kWorld = 0, kNetInit = 1, kHeadInit = 2, kScenes = 3, kSelection = 4, kEval = 5 };

SgdConfig head_sgd(const RunConfig& config) {
  SgdConfig sgd = config.sgd;
  sgd.base_lr *= config.head_lr_multiplier;
  sgd.drop_lr *= config.head_lr_multiplier;
  return sgd;
}

RunConfig checked(RunConfig config) {
  config.sync();
  const auto errors = config.validate();
  if (!errors.empty()) {
    std::string msg;
    for (const auto& e : errors) msg += "\n  " + e;
    throw Error(ErrorCode::kInvalidConfig, "invalid run config:" + msg);
  }
  return config;
}

std::mt19937_64 stream(const RunConfig& config, std::uint64_t id, std::uint64_t salt = 0) {
  return std::mt19937_64(derive_seed(*config.seed ^ (salt * 0xD1B54A32D192ED03ULL), id));
}

EmbeddingNetwork make_network(const RunConfig& config) {
  auto rng = stream(config, kNetInit);
  return EmbeddingNetwork(config.embedding, rng);
}

ClassifierHead make_head(const RunConfig& config) {
  if (config.head_init_scale == 0.0) {
    return ClassifierHead::zeros(config.hep.num_classes_total, config.embedding.embed_dim);
  }
  auto rng = stream(config, kHeadInit);
  return ClassifierHead::random(config.hep.num_classes_total, config.embedding.embed_dim,
                                config.head_init_scale, rng);
}

void require_finite(double value, const char* what, std::uint64_t iteration) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kNumericalFailure,
                std::string(what) + " is not finite at iteration " + std::to_string(iteration));
  }
}

void write_progress_header(std::ostream& out) { out << "iteration,gallery_size,num_queries,top1,top5,top10,map\n"; }

void write_progress_row(std::ostream& out, std::uint64_t iteration, const EvalReport& r) {
  out << iteration << ',';
  write_eval_csv_row(out, r);
}

}  // namespace

EvalSplit heldout_split(const RunConfig& config, const IdentityWorld& world) {
  if (!config.seed) throw Error(ErrorCode::kInvalidConfig, "seed: required");
  auto rng = stream(config, kEval);
  return build_eval_split(world, config.gallery_size, rng, config.num_queries);
}

void write_metrics_header(std::ostream& out) {
  out << "iteration,lr,olp_loss,hep_loss,total_loss,dict_size,pool_size,subgroup_count\n";
}

void write_metrics_row(std::ostream& out, const MetricsRow& row) {
  out << row.iteration << ',' << fmt_double(row.lr) << ',' << fmt_double(row.olp_loss) << ','
      << fmt_double(row.hep_loss) << ',' << fmt_double(row.total_loss) << ',' << row.dict_size << ','
      << row.pool_size << ',' << row.subgroup_count << '\n';
}

Trainer::Trainer(RunConfig config)
    : config_(checked(std::move(config))),
      world_(config_.world),
      net_(make_network(config_)),
      head_(make_head(config_)),
      dict_(config_.dictionary_capacity()),
      net_opt_(config_.sgd),
      head_opt_(head_sgd(config_)),
      scene_rng_(stream(config_, kScenes)),
      select_rng_(stream(config_, kSelection)),
      eval_split_(heldout_split(config_, world_)) {}

void Trainer::resume(std::vector<DenseLayer> network, DenseLayer head, std::uint64_t iteration) {
  EmbeddingNetwork net(std::move(network));
  if (net.input_dim() != config_.embedding.input_dim || net.embed_dim() != config_.embedding.embed_dim) {
    throw Error(ErrorCode::kShapeMismatch, "checkpoint does not match the configured network");
  }
  if (head.outputs() != head_.num_classes() || head.inputs() != head_.embed_dim()) {
    throw Error(ErrorCode::kShapeMismatch, "checkpoint head does not match the configured classes");
  }
  net_ = std::move(net);
  head_.params = std::move(head);
  iteration_ = iteration;
  net_opt_ = SgdOptimizer(config_.sgd);
  head_opt_ = SgdOptimizer(head_sgd(config_));
  scene_rng_ = stream(config_, kScenes, iteration);
  select_rng_ = stream(config_, kSelection, iteration);
}

MetricsRow Trainer::train_iteration() {
  if (finished()) throw Error(ErrorCode::kInvalidArgument, "training already finished");
  MetricsRow row;
  row.iteration = iteration_;

  const ScenePair pair = sample_scene_pair(world_, scene_rng_);
  const std::size_t n0 = pair.image0.size();
  const std::size_t n1 = pair.image1.size();

  DenseMatrix inputs;
  std::vector<IdentityLabel> labels0, labels1;
  for (const auto& p : pair.image0) {
    inputs.append_row(p.input);
    labels0.push_back(p.label);
  }
  for (const auto& p : pair.image1) {
    inputs.append_row(p.input);
    labels1.push_back(p.label);
  }
  const ForwardResult fwd = net_.forward(inputs);
  const DenseMatrix& features = fwd.normalized;
  const std::size_t d = features.cols();

  DenseMatrix feats0(n0, d), feats1(n1, d);
  std::copy(features.values().begin(), features.values().begin() + static_cast<std::ptrdiff_t>(n0 * d),
            feats0.values().begin());
  std::copy(features.values().begin() + static_cast<std::ptrdiff_t>(n0 * d), features.values().end(),
            feats1.values().begin());

  DenseMatrix grad(n0 + n1, d);
  auto global_row = [&](const ProposalRef& ref) { return ref.image == 0 ? ref.index : n0 + ref.index; };

  const OlpBatch batch = form_subgroups({feats0, labels0}, {feats1, labels1}, dict_, config_.max_pairs_per_identity);
  row.subgroup_count = batch.size();
  std::vector<std::vector<NegativeStat>> negative_stats;
  if (!batch.empty()) {
    OlpGradient olp = olp_gradient(batch);
    row.olp_loss = olp.loss;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      axpy(1.0, olp.subgroups[i].anchor, grad.row(global_row(batch.subgroups[i].anchor_ref)));
      negative_stats.push_back(std::move(olp.subgroups[i].negative_stats));
    }
  }
  require_finite(row.olp_loss, "olp_loss", iteration_);

  std::optional<HepGradient> hep;
  if (config_.loss_mode != LossMode::kOlpOnly) {
    HepBatch hep_batch;
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < n0 + n1; ++r) {
      const IdentityLabel& label = r < n0 ? labels0[r] : labels1[r - n0];
      if (auto cls = label.class_index()) {
        hep_batch.features.append_row(features.row(r));
        hep_batch.true_classes.push_back(*cls);
        rows.push_back(r);
      }
    }
    if (hep_batch.size() > 0) {
      const SelectionPool pool = config_.loss_mode == LossMode::kOlpSoftmax
                                     ? full_pool(config_.hep.num_classes_total)
                                     : select_classes(hep_batch.true_classes, negative_stats, config_.hep, select_rng_);
      row.pool_size = pool.size();
      hep = hep_gradient(head_, hep_batch, pool);
      row.hep_loss = hep->loss;
      for (std::size_t i = 0; i < rows.size(); ++i) axpy(1.0, hep->features.row(i), grad.row(rows[i]));
    }
  }
  require_finite(row.hep_loss, "hep_loss", iteration_);
  row.total_loss = row.olp_loss + row.hep_loss;

  const ParameterGradients net_grads = net_.backward(grad);
  row.lr = net_opt_.step(net_.mutable_layers(), net_grads.layers, iteration_);
  if (hep) head_opt_.step(std::span<DenseLayer>(&head_.params, 1), std::span<const DenseLayer>(&hep->head, 1), iteration_);
  for (const auto& layer : net_.layers()) {
    if (!all_finite(layer.weights.values()) || !all_finite(layer.bias)) {
      throw Error(ErrorCode::kNumericalFailure, "network parameters diverged at iteration " + std::to_string(iteration_));
    }
  }

  // Insert after the loss so a pair never meets its own features as negatives.
  auto store = [&](const std::vector<Proposal>& props, std::size_t offset) {
    for (std::size_t i = 0; i < props.size(); ++i) {
      const Proposal& p = props[i];
      if (p.label.is_background() && !p.store_in_dictionary) continue;
      dict_.insert(features.row(offset + i), p.label);
      ++row.inserted;
    }
  };
  store(pair.image0, 0);
  store(pair.image1, n0);
  row.dict_size = dict_.size();

  ++iteration_;
  return row;
}

EvalReport Trainer::evaluate() const { return evaluate_split(net_, eval_split_); }

TrainingSummary run_training(Trainer& trainer, const TrainOutputs& outputs) {
  const auto& config = trainer.config();
  if (outputs.metrics) write_metrics_header(*outputs.metrics);
  if (outputs.progress) write_progress_header(*outputs.progress);

  TrainingSummary summary;
  summary.initial = trainer.evaluate();
  if (outputs.progress) write_progress_row(*outputs.progress, trainer.iteration(), summary.initial);
  while (!trainer.finished()) {
    const MetricsRow row = trainer.train_iteration();
    ++summary.iterations_run;
    if (outputs.metrics) write_metrics_row(*outputs.metrics, row);
    const std::uint64_t done = trainer.iteration();
    if (outputs.progress && config.eval_every > 0 && done % config.eval_every == 0 && !trainer.finished()) {
      write_progress_row(*outputs.progress, done, trainer.evaluate());
    }
  }
  summary.final = trainer.evaluate();
  if (outputs.progress) write_progress_row(*outputs.progress, trainer.iteration(), summary.final);
  return summary;
}

TrainingSummary train_to_directory(const RunConfig& config, const std::filesystem::path& dir,
                                   const std::optional<std::filesystem::path>& resume_dir) {
  std::filesystem::create_directories(dir);
  Trainer trainer(config);
  if (resume_dir) {
    std::ifstream state_in(*resume_dir / "state.json");
    if (!state_in) throw Error(ErrorCode::kIo, "missing state.json in " + resume_dir->string());
    const auto state = nlohmann::json::parse(state_in);
    auto head_layers = load_checkpoint(*resume_dir / "head.ckpt");
    if (head_layers.size() != 1) throw Error(ErrorCode::kIo, "head checkpoint must hold one layer");
    trainer.resume(load_checkpoint(*resume_dir / "network.ckpt"), std::move(head_layers.front()),
                   state.at("iteration").get<std::uint64_t>());
  }

  std::ofstream metrics(dir / "metrics.csv", std::ios::trunc);
  std::ofstream progress(dir / "progress.csv", std::ios::trunc);
  if (!metrics || !progress) throw Error(ErrorCode::kIo, "cannot write outputs under " + dir.string());
  const TrainingSummary summary = run_training(trainer, {&metrics, &progress});

  save_checkpoint(dir / "network.ckpt", trainer.network().layers());
  save_checkpoint(dir / "head.ckpt", {trainer.head().params});
  std::ofstream state(dir / "state.json", std::ios::trunc);
  state << nlohmann::json{{"iteration", trainer.iteration()}, {"loss_mode", std::string(to_string(trainer.config().loss_mode))}}.dump(2)
        << '\n';
  std::ofstream cfg(dir / "config.json", std::ios::trunc);
  cfg << to_json(trainer.config()) << '\n';
  return summary;
}

}  // namespace pairlab
