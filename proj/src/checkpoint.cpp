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

#include "pairlab/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "pairlab/error.hpp"

namespace pairlab {

namespace {

template <typename U>
void put_le(std::ostream& out, U value) {
  std::array<char, sizeof(U)> bytes;
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw Error(ErrorCode::kIo, "checkpoint truncated");
  }
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

std::uint32_t checked_u32(std::size_t n) {
  if (n > std::numeric_limits<std::uint32_t>::max()) throw Error(ErrorCode::kIo, "dimension overflows u32");
  return static_cast<std::uint32_t>(n);
}

}  // namespace

void write_layers(std::ostream& out, const std::vector<DenseLayer>& layers) {
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, checked_u32(layers.size()));
  for (const auto& layer : layers) {
    put_le<std::uint32_t>(out, checked_u32(layer.weights.rows()));
    put_le<std::uint32_t>(out, checked_u32(layer.weights.cols()));
  }
  for (const auto& layer : layers) {
    for (double w : layer.weights.values()) put_f64(out, w);
    for (double b : layer.bias) put_f64(out, b);
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing checkpoint");
}

std::vector<DenseLayer> read_layers(std::istream& in) {
  char magic[sizeof(kCheckpointMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw Error(ErrorCode::kIo, "bad checkpoint magic");
  }
  const auto version = get_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kIo, "unsupported checkpoint version " + std::to_string(version));
  }
  const auto count = get_le<std::uint32_t>(in);
  std::vector<DenseLayer> layers;
  layers.reserve(count);
  for (std::uint32_t l = 0; l < count; ++l) {
    const auto rows = get_le<std::uint32_t>(in);
    const auto cols = get_le<std::uint32_t>(in);
    layers.push_back(DenseLayer::zeros(rows, cols));
  }
  for (auto& layer : layers) {
    for (double& w : layer.weights.values()) w = get_f64(in);
    for (double& b : layer.bias) b = get_f64(in);
  }
  return layers;
}

void save_checkpoint(const std::filesystem::path& path, const std::vector<DenseLayer>& layers) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  write_layers(out, layers);
}

std::vector<DenseLayer> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_layers(in);
}

}  // namespace pairlab
