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

#include "pairlab/embedding.hpp"

#include <cmath>
#include <string>

#include "pairlab/error.hpp"

namespace pairlab {

namespace {

constexpr double kZeroNormThreshold = 1e-30;

// out(n x o) = in(n x i) * W^T + b
DenseMatrix affine(const DenseMatrix& in, const DenseLayer& layer) {
  DenseMatrix out(in.rows(), layer.outputs());
  for (std::size_t r = 0; r < in.rows(); ++r) {
    auto x = in.row(r);
    auto y = out.row(r);
    for (std::size_t o = 0; o < layer.outputs(); ++o) {
      y[o] = layer.bias[o] + dot(layer.weights.row(o), x);
    }
  }
  return out;
}

void check_layer_chain(const std::vector<DenseLayer>& layers) {
  if (layers.empty()) throw Error(ErrorCode::kInvalidArgument, "network needs at least one layer");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.outputs() == 0 || layer.inputs() == 0 || layer.bias.size() != layer.outputs()) {
      throw Error(ErrorCode::kShapeMismatch, "layer " + std::to_string(l) + " has inconsistent shape");
    }
    if (l > 0 && layers[l - 1].outputs() != layer.inputs()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "layer " + std::to_string(l) + " expects " + std::to_string(layer.inputs()) +
                      " inputs but previous layer emits " + std::to_string(layers[l - 1].outputs()));
    }
  }
  if (layers.back().outputs() < 2) throw Error(ErrorCode::kShapeMismatch, "embedding dim must be >= 2");
}

}  // namespace

void EmbeddingConfig::validate() const {
  if (input_dim < 1) throw Error(ErrorCode::kInvalidConfig, "input_dim must be >= 1");
  for (std::size_t h : hidden_dims) {
    if (h < 1) throw Error(ErrorCode::kInvalidConfig, "hidden_dims entries must be >= 1");
  }
  if (embed_dim < 2) throw Error(ErrorCode::kInvalidConfig, "embed_dim must be >= 2");
  if (!(hidden_init_scale > 0.0) || !(output_init_scale > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "init scales must be positive");
  }
}

DenseVector l2_normalize(std::span<const double> v) {
  const double n = norm(v);
  if (!(n >= kZeroNormThreshold)) throw Error(ErrorCode::kZeroVector, "cannot normalize a zero vector");
  DenseVector out(v.begin(), v.end());
  for (double& x : out) x /= n;
  return out;
}

DenseVector l2_normalize_backward(std::span<const double> v, std::span<const double> grad_out) {
  if (v.size() != grad_out.size()) throw Error(ErrorCode::kShapeMismatch, "l2_normalize_backward");
  const double n = norm(v);
  if (!(n >= kZeroNormThreshold)) throw Error(ErrorCode::kZeroVector, "cannot normalize a zero vector");
  const double radial = dot(v, grad_out) / n;  // u . g
  DenseVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (grad_out[i] - radial * v[i] / n) / n;
  return out;
}

EmbeddingNetwork::EmbeddingNetwork(const EmbeddingConfig& config, std::mt19937_64& rng) {
  config.validate();
  std::vector<std::size_t> dims;
  dims.push_back(config.input_dim);
  dims.insert(dims.end(), config.hidden_dims.begin(), config.hidden_dims.end());
  dims.push_back(config.embed_dim);

  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const bool last = l + 2 == dims.size();
    const double scale = (last ? config.output_init_scale : config.hidden_init_scale) *
                         std::sqrt(2.0 / static_cast<double>(dims[l]));
    DenseLayer layer = DenseLayer::zeros(dims[l + 1], dims[l]);
    for (double& w : layer.weights.values()) w = scale * normal(rng);
    layers_.push_back(std::move(layer));
  }
}

EmbeddingNetwork::EmbeddingNetwork(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  check_layer_chain(layers_);
}

std::size_t EmbeddingNetwork::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.parameter_count();
  return n;
}

ForwardResult EmbeddingNetwork::run(const DenseMatrix& inputs, Cache* cache) const {
  if (inputs.cols() != input_dim() || inputs.rows() == 0) {
    throw Error(ErrorCode::kShapeMismatch, "forward: expected " + std::to_string(input_dim()) +
                                               " input columns, got " + std::to_string(inputs.cols()));
  }
  DenseMatrix activation = inputs;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (cache) cache->layer_inputs.push_back(activation);
    activation = affine(activation, layers_[l]);
    if (l + 1 < layers_.size()) {
      for (double& x : activation.values()) x = x > 0.0 ? x : 0.0;
    }
  }
  ForwardResult result;
  result.normalized = DenseMatrix(activation.rows(), activation.cols());
  for (std::size_t r = 0; r < activation.rows(); ++r) {
    auto unit = l2_normalize(activation.row(r));
    std::copy(unit.begin(), unit.end(), result.normalized.row(r).begin());
  }
  result.pre_norm = std::move(activation);
  if (cache) cache->pre_norm = result.pre_norm;
  return result;
}

ForwardResult EmbeddingNetwork::forward(const DenseMatrix& inputs) {
  Cache cache;
  auto result = run(inputs, &cache);
  cache_ = std::move(cache);
  return result;
}

ForwardResult EmbeddingNetwork::infer(const DenseMatrix& inputs) const { return run(inputs, nullptr); }

ParameterGradients EmbeddingNetwork::backward(const DenseMatrix& grad_wrt_normalized) {
  if (!cache_) throw Error(ErrorCode::kNoCache, "backward called without a preceding forward");
  Cache cache = std::move(*cache_);
  cache_.reset();
  if (grad_wrt_normalized.rows() != cache.pre_norm.rows() ||
      grad_wrt_normalized.cols() != cache.pre_norm.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "backward: upstream gradient shape does not match forward");
  }

  DenseMatrix delta(cache.pre_norm.rows(), cache.pre_norm.cols());
  for (std::size_t r = 0; r < delta.rows(); ++r) {
    auto g = l2_normalize_backward(cache.pre_norm.row(r), grad_wrt_normalized.row(r));
    std::copy(g.begin(), g.end(), delta.row(r).begin());
  }

  ParameterGradients grads;
  grads.layers.resize(layers_.size());
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const DenseLayer& layer = layers_[l];
    const DenseMatrix& input = cache.layer_inputs[l];
    DenseLayer g = DenseLayer::zeros(layer.outputs(), layer.inputs());
    for (std::size_t r = 0; r < delta.rows(); ++r) {
      auto d = delta.row(r);
      auto x = input.row(r);
      for (std::size_t o = 0; o < layer.outputs(); ++o) {
        if (d[o] == 0.0) continue;
        g.bias[o] += d[o];
        axpy(d[o], x, g.weights.row(o));
      }
    }
    if (l > 0) {
      // input of layer l is relu(pre-activation of layer l-1); relu(z) > 0 iff z > 0
      DenseMatrix next(delta.rows(), layer.inputs());
      for (std::size_t r = 0; r < delta.rows(); ++r) {
        auto d = delta.row(r);
        auto out = next.row(r);
        for (std::size_t o = 0; o < layer.outputs(); ++o) {
          if (d[o] != 0.0) axpy(d[o], layer.weights.row(o), out);
        }
        auto x = input.row(r);
        for (std::size_t i = 0; i < out.size(); ++i) {
          if (!(x[i] > 0.0)) out[i] = 0.0;
        }
      }
      delta = std::move(next);
    }
    grads.layers[l] = std::move(g);
  }
  return grads;
}

void SgdConfig::validate() const {
  if (!(drop_lr > 0.0) || !(drop_lr <= base_lr)) {
    throw Error(ErrorCode::kInvalidConfig, "require 0 < drop_lr <= base_lr");
  }
  if (!(drop_fraction > 0.0) || !(drop_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "require 0 < drop_fraction <= 1");
  }
  if (!(momentum >= 0.0) || !(momentum < 1.0)) throw Error(ErrorCode::kInvalidConfig, "require 0 <= momentum < 1");
  if (total_iterations < 1) throw Error(ErrorCode::kInvalidConfig, "total_iterations must be >= 1");
}

std::uint64_t SgdConfig::drop_iteration() const {
  return static_cast<std::uint64_t>(std::floor(drop_fraction * static_cast<double>(total_iterations)));
}

double learning_rate(const SgdConfig& config, std::uint64_t iteration) {
  return iteration < config.drop_iteration() ? config.base_lr : config.drop_lr;
}

SgdOptimizer::SgdOptimizer(SgdConfig config) : config_(config) { config_.validate(); }

double SgdOptimizer::step(std::span<DenseLayer> params, std::span<const DenseLayer> grads,
                          std::uint64_t iteration) {
  if (iteration >= config_.total_iterations) {
    throw Error(ErrorCode::kInvalidArgument, "iteration " + std::to_string(iteration) +
                                                 " is past total_iterations");
  }
  if (params.size() != grads.size()) throw Error(ErrorCode::kShapeMismatch, "sgd: layer count mismatch");
  for (std::size_t l = 0; l < params.size(); ++l) {
    if (params[l].weights.rows() != grads[l].weights.rows() ||
        params[l].weights.cols() != grads[l].weights.cols() ||
        params[l].bias.size() != grads[l].bias.size()) {
      throw Error(ErrorCode::kShapeMismatch, "sgd: gradient shape mismatch at layer " + std::to_string(l));
    }
  }
  const double lr = learning_rate(config_, iteration);
  if (config_.momentum == 0.0) {
    for (std::size_t l = 0; l < params.size(); ++l) {
      axpy(-lr, grads[l].weights.values(), params[l].weights.values());
      axpy(-lr, grads[l].bias, params[l].bias);
    }
    return lr;
  }
  if (velocity_.size() != params.size()) {
    velocity_.clear();
    for (const auto& p : params) velocity_.push_back(DenseLayer::zeros(p.outputs(), p.inputs()));
  }
  for (std::size_t l = 0; l < params.size(); ++l) {
    auto update = [&](std::span<double> v, std::span<const double> g, std::span<double> p) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = config_.momentum * v[i] + g[i];
        p[i] -= lr * v[i];
      }
    };
    update(velocity_[l].weights.values(), grads[l].weights.values(), params[l].weights.values());
    update(velocity_[l].bias, grads[l].bias, params[l].bias);
  }
  return lr;
}

double sgd_step(EmbeddingNetwork& net, const ParameterGradients& grads, const SgdConfig& config,
                std::uint64_t iteration) {
  SgdOptimizer optimizer(config);
  return optimizer.step(net.mutable_layers(), grads.layers, iteration);
}

}  // namespace pairlab
