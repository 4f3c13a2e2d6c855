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

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "pairlab/embedding.hpp"

namespace pairlab {

// Binary layout, all integers and floats little-endian:
//   "INETCKPT" | u32 version (=1) | u32 layer_count
//   | layer_count x (u32 rows, u32 cols)
//   | per layer: rows*cols f64 weights (row-major), then rows f64 biases
inline constexpr char kCheckpointMagic[8] = {'I', 'N', 'E', 'T', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_layers(std::ostream& out, const std::vector<DenseLayer>& layers);
std::vector<DenseLayer> read_layers(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const std::vector<DenseLayer>& layers);
std::vector<DenseLayer> load_checkpoint(const std::filesystem::path& path);

}  // namespace pairlab
