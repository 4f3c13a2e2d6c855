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
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "pairlab/dense.hpp"

namespace pairlab {

/// Fully connected layer: `weights` is (outputs x inputs), `bias` has one
/// entry per output. Also used as the gradient container for a layer.
struct DenseLayer {
  DenseMatrix weights;
  DenseVector bias;

  std::size_t inputs() const noexcept { return weights.cols(); }
  std::size_t outputs() const noexcept { return weights.rows(); }
  std::size_t parameter_count() const noexcept { return weights.size() + bias.size(); }

  static DenseLayer zeros(std::size_t outputs, std::size_t inputs) {
    return {DenseMatrix(outputs, inputs), DenseVector(outputs, 0.0)};
  }

  bool operator==(const DenseLayer&) const = default;
};

struct EmbeddingConfig {
  std::size_t input_dim = 64;
  std::vector<std::size_t> hidden_dims = {64};
  std::size_t embed_dim = 32;
  // He-normal init multiplier for hidden layers.
  double hidden_init_scale = 1.0;
  // Init multiplier for the projection feeding the normalization layer.
  double output_init_scale = 0.1;

  // Throws Error(kInvalidConfig).
  void validate() const;
};

struct ParameterGradients {
  std::vector<DenseLayer> layers;
};

struct ForwardResult {
  DenseMatrix pre_norm;
  DenseMatrix normalized;
};

/// Returns v / ||v||. Throws Error(kZeroVector) when ||v|| < 1e-30.
DenseVector l2_normalize(std::span<const double> v);

/// Chain rule through v -> v/||v||: (g - (u.g) u) / ||v||.
DenseVector l2_normalize_backward(std::span<const double> v, std::span<const double> grad_out);

/// MLP with rectifier hidden activations followed by a linear projection and
/// row-wise L2 normalization. forward() caches activations for exactly one
/// backward().
class EmbeddingNetwork {
 public:
  EmbeddingNetwork(const EmbeddingConfig& config, std::mt19937_64& rng);
  explicit EmbeddingNetwork(std::vector<DenseLayer> layers);

  ForwardResult forward(const DenseMatrix& inputs);
  // Cache-free forward; safe to call concurrently on a shared instance.
  ForwardResult infer(const DenseMatrix& inputs) const;
  ParameterGradients backward(const DenseMatrix& grad_wrt_normalized);

  bool has_cache() const noexcept { return cache_.has_value(); }

  std::size_t input_dim() const noexcept { return layers_.front().inputs(); }
  std::size_t embed_dim() const noexcept { return layers_.back().outputs(); }
  std::size_t parameter_count() const noexcept;

  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::vector<DenseLayer>& mutable_layers() noexcept { return layers_; }

 private:
  struct Cache {
    std::vector<DenseMatrix> layer_inputs;  // input to each layer
    DenseMatrix pre_norm;
  };

  ForwardResult run(const DenseMatrix& inputs, Cache* cache) const;

  std::vector<DenseLayer> layers_;
  std::optional<Cache> cache_;
};

struct SgdConfig {
  double base_lr = 0.001;
  double drop_lr = 0.0001;
  double drop_fraction = 5.0 / 6.0;
  double momentum = 0.0;
  std::uint64_t total_iterations = 5000;

  void validate() const;
  // First iteration that runs at drop_lr: floor(drop_fraction * total_iterations).
  std::uint64_t drop_iteration() const;
};

/// Step schedule with a single drop.
double learning_rate(const SgdConfig& config, std::uint64_t iteration);

/// Plain or momentum SGD over a list of layers. Holds the velocity buffers,
/// so keep one instance per parameter set.
class SgdOptimizer {
 public:
  explicit SgdOptimizer(SgdConfig config);

  // Returns the learning rate used. Throws kInvalidArgument when
  // iteration >= total_iterations and kShapeMismatch on layer mismatch.
  double step(std::span<DenseLayer> params, std::span<const DenseLayer> grads,
              std::uint64_t iteration);

  const SgdConfig& config() const noexcept { return config_; }

 private:
  SgdConfig config_;
  std::vector<DenseLayer> velocity_;
};

/// One-shot step for a network; equivalent to SgdOptimizer with no history.
double sgd_step(EmbeddingNetwork& net, const ParameterGradients& grads, const SgdConfig& config,
                std::uint64_t iteration);

}  // namespace pairlab
