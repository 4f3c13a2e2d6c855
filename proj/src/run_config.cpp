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

#include "pairlab/run_config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "pairlab/error.hpp"

namespace pairlab {

using nlohmann::json;

namespace {

// Binds a JSON key to a RunConfig field.
struct Field {
  std::function<void(RunConfig&, const json&)> read;
  std::function<json(const RunConfig&)> write;
};

template <typename T>
Field bind_field(T RunConfig::*member) {
  return {[member](RunConfig& c, const json& j) { c.*member = j.get<T>(); },
          [member](const RunConfig& c) { return json(c.*member); }};
}

template <typename Sub, typename T>
Field bind_field(Sub RunConfig::*sub, T Sub::*member) {
  return {[sub, member](RunConfig& c, const json& j) { (c.*sub).*member = j.get<T>(); },
          [sub, member](const RunConfig& c) { return json((c.*sub).*member); }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t;
    t["input_dim"] = bind_field(&RunConfig::world, &WorldConfig::input_dim);
    t["hidden_dims"] = bind_field(&RunConfig::embedding, &EmbeddingConfig::hidden_dims);
    t["embed_dim"] = bind_field(&RunConfig::embedding, &EmbeddingConfig::embed_dim);
    t["hidden_init_scale"] = bind_field(&RunConfig::embedding, &EmbeddingConfig::hidden_init_scale);
    t["output_init_scale"] = bind_field(&RunConfig::embedding, &EmbeddingConfig::output_init_scale);
    t["base_lr"] = bind_field(&RunConfig::sgd, &SgdConfig::base_lr);
    t["drop_lr"] = bind_field(&RunConfig::sgd, &SgdConfig::drop_lr);
    t["drop_fraction"] = bind_field(&RunConfig::sgd, &SgdConfig::drop_fraction);
    t["momentum"] = bind_field(&RunConfig::sgd, &SgdConfig::momentum);
    t["num_train_identities"] = bind_field(&RunConfig::world, &WorldConfig::num_train_identities);
    t["num_test_identities"] = bind_field(&RunConfig::world, &WorldConfig::num_test_identities);
    t["latent_dim"] = bind_field(&RunConfig::world, &WorldConfig::latent_dim);
    t["observation_noise_sigma"] = bind_field(&RunConfig::world, &WorldConfig::observation_noise_sigma);
    t["proposals_per_identity_min"] = bind_field(&RunConfig::world, &WorldConfig::proposals_per_identity_min);
    t["proposals_per_identity_max"] = bind_field(&RunConfig::world, &WorldConfig::proposals_per_identity_max);
    t["backgrounds_generated_per_image"] = bind_field(&RunConfig::world, &WorldConfig::backgrounds_generated_per_image);
    t["backgrounds_stored_per_image"] = bind_field(&RunConfig::world, &WorldConfig::backgrounds_stored_per_image);
    t["unlabeled_identities_per_image"] = bind_field(&RunConfig::world, &WorldConfig::unlabeled_identities_per_image);
    t["identities_per_image"] = bind_field(&RunConfig::world, &WorldConfig::identities_per_image);
    t["shared_identities_per_pair"] = bind_field(&RunConfig::world, &WorldConfig::shared_identities_per_pair);
    t["nuisance_dim"] = bind_field(&RunConfig::world, &WorldConfig::nuisance_dim);
    t["nuisance_scale"] = bind_field(&RunConfig::world, &WorldConfig::nuisance_scale);
    t["background_offset"] = bind_field(&RunConfig::world, &WorldConfig::background_offset);
    t["background_spread"] = bind_field(&RunConfig::world, &WorldConfig::background_spread);
    t["num_selected"] = bind_field(&RunConfig::hep, &HepConfig::num_selected);
    t["hard_per_subgroup"] = bind_field(&RunConfig::hep, &HepConfig::hard_per_subgroup);
    t["head_init_scale"] = bind_field(&RunConfig::head_init_scale);
    t["head_lr_multiplier"] = bind_field(&RunConfig::head_lr_multiplier);
    t["dictionary_capacity_multiplier"] = bind_field(&RunConfig::dictionary_capacity_multiplier);
    t["max_pairs_per_identity"] = bind_field(&RunConfig::max_pairs_per_identity);
    t["total_iterations"] = bind_field(&RunConfig::total_iterations);
    t["eval_every"] = bind_field(&RunConfig::eval_every);
    t["gallery_size"] = bind_field(&RunConfig::gallery_size);
    t["num_queries"] = bind_field(&RunConfig::num_queries);
    t["gallery_sizes"] = bind_field(&RunConfig::gallery_sizes);
    t["dict_multipliers"] = bind_field(&RunConfig::dict_multipliers);
    t["output_dir"] = bind_field(&RunConfig::output_dir);
    t["loss_mode"] = Field{
        [](RunConfig& c, const json& j) {
          auto mode = parse_loss_mode(j.get<std::string>());
          if (!mode) throw std::invalid_argument("expected olp_only, olp_softmax or olp_hep");
          c.loss_mode = *mode;
        },
        [](const RunConfig& c) { return json(std::string(to_string(c.loss_mode))); }};
    t["seed"] = Field{[](RunConfig& c, const json& j) { c.seed = j.get<std::uint64_t>(); },
                      [](const RunConfig& c) { return c.seed ? json(*c.seed) : json(nullptr); }};
    return t;
  }();
  return table;
}

template <typename Fn>
void collect(std::vector<std::string>& errors, const std::string& field, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    errors.push_back(field + ": " + e.what());
  }
}

}  // namespace

std::string_view to_string(LossMode mode) {
  switch (mode) {
    case LossMode::kOlpOnly: return "olp_only";
    case LossMode::kOlpSoftmax: return "olp_softmax";
    case LossMode::kOlpHep: return "olp_hep";
  }
  return "?";
}

std::optional<LossMode> parse_loss_mode(std::string_view text) {
  if (text == "olp_only") return LossMode::kOlpOnly;
  if (text == "olp_softmax") return LossMode::kOlpSoftmax;
  if (text == "olp_hep") return LossMode::kOlpHep;
  return std::nullopt;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void RunConfig::sync() {
  embedding.input_dim = world.input_dim;
  sgd.total_iterations = total_iterations;
  hep.num_classes_total = world.num_train_identities + 1;
  if (seed) world.seed = derive_seed(*seed, 0);
}

std::size_t RunConfig::dictionary_capacity() const {
  return dictionary_capacity_multiplier * world.nominal_proposals_per_image();
}

std::vector<std::string> RunConfig::validate() const {
  std::vector<std::string> errors;
  if (!seed) errors.push_back("seed: required (config key or --seed)");
  collect(errors, "embedding", [&] { embedding.validate(); });
  collect(errors, "sgd", [&] { sgd.validate(); });
  collect(errors, "world", [&] { world.validate(); });
  collect(errors, "hep", [&] { hep.validate(); });
  if (embedding.input_dim != world.input_dim) errors.push_back("input_dim: embedding and world disagree");
  if (dictionary_capacity_multiplier < 1) errors.push_back("dictionary_capacity_multiplier: must be >= 1");
  if (max_pairs_per_identity < 1) errors.push_back("max_pairs_per_identity: must be >= 1");
  if (total_iterations < 1) errors.push_back("total_iterations: must be >= 1");
  if (!(head_init_scale >= 0.0)) errors.push_back("head_init_scale: must be >= 0");
  if (!(head_lr_multiplier > 0.0)) errors.push_back("head_lr_multiplier: must be > 0");
  if (gallery_size < 1) errors.push_back("gallery_size: must be >= 1");
  if (num_queries < 1) errors.push_back("num_queries: must be >= 1");
  if (gallery_sizes.empty()) errors.push_back("gallery_sizes: must not be empty");
  for (std::size_t i = 0; i + 1 < gallery_sizes.size(); ++i) {
    if (gallery_sizes[i] >= gallery_sizes[i + 1]) {
      errors.push_back("gallery_sizes: must be strictly ascending");
      break;
    }
  }
  for (std::size_t m : dict_multipliers) {
    if (m < 1) errors.push_back("dict_multipliers: entries must be >= 1");
  }
  return errors;
}

ConfigParseResult parse_run_config(const std::string& json_text) {
  ConfigParseResult result;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    result.errors.push_back(std::string("<document>: ") + e.what());
    return result;
  }
  if (!doc.is_object()) {
    result.errors.push_back("<document>: expected a JSON object");
    return result;
  }
  const auto& table = fields();
  for (const auto& [key, value] : doc.items()) {
    auto it = table.find(key);
    if (it == table.end()) {
      result.errors.push_back(key + ": unknown field");
      continue;
    }
    try {
      it->second.read(result.config, value);
    } catch (const std::exception& e) {
      result.errors.push_back(key + ": " + e.what());
    }
  }
  result.config.sync();
  return result;
}

ConfigParseResult load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ConfigParseResult result;
    result.errors.push_back(path + ": cannot open");
    return result;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string to_json(const RunConfig& config) {
  json doc = json::object();
  for (const auto& [key, field] : fields()) doc[key] = field.write(config);
  return doc.dump(2);
}

}  // namespace pairlab
