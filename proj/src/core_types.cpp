// Copyright 2026 The CSCA Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "csca/core_types.hpp"

#include <cstdio>
#include <string>

#include "csca/error.hpp"

namespace csca {

namespace {

constexpr std::array<std::string_view, kNumContentLabels> kContentNames = {
    "object", "plant", "animal", "human", "other"};

constexpr std::array<std::string_view, 6> kSplitNames = {"train", "val", "test",
                                                          "rg1",   "rg2", "fg"};

}  // namespace

ContentLabel parse_content_label(std::string_view text) {
  for (int i = 0; i < kNumContentLabels; ++i) {
    if (kContentNames[i] == text) return static_cast<ContentLabel>(i);
  }
  throw ParseError("unknown content label '" + std::string(text) +
                   "' (expected one of object, plant, animal, human, other)");
}

std::string_view to_string(ContentLabel label) { return kContentNames.at(code(label)); }

CreativityLevel creativity_level(int index) {
  if (index < 0 || index >= kNumCreativityLevels) {
    throw DimensionError("creativity level index out of range: " + std::to_string(index));
  }
  return {kLevelPhrases[index], kLevelWeights[index]};
}

Split parse_split(std::string_view text) {
  for (std::size_t i = 0; i < kSplitNames.size(); ++i) {
    if (kSplitNames[i] == text) return static_cast<Split>(i);
  }
  throw ParseError("unknown split '" + std::string(text) + "'");
}

std::string_view to_string(Split split) { return kSplitNames.at(static_cast<int>(split)); }

void RunConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (!(lambda_cls >= 0.0 && lambda_cls <= 1.0)) throw ConfigError("lambda_cls must lie in [0,1]");
  if (!(temperature > 0.0)) throw ConfigError("temperature must be > 0");
  if (early_stop_patience < 0) throw ConfigError("early_stop_patience must be >= 0");
  if (tuner_hidden_dim < 1) throw ConfigError("tuner_hidden_dim must be >= 1");
  if (tokens_per_level < 0) throw ConfigError("tokens_per_level must be >= 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw ConfigError("adam betas must lie in [0,1)");
  }
  if (!(adam_epsilon > 0.0)) throw ConfigError("adam_epsilon must be > 0");
  if (weight_decay < 0.0) throw ConfigError("weight_decay must be >= 0");
  if (backbone != "toy" && backbone != "vit-l-14") {
    throw ConfigError("unknown backbone '" + backbone + "' (expected toy or vit-l-14)");
  }
  if (backbone == "toy" && toy_embed_dim < 8) throw ConfigError("toy_embed_dim must be >= 8");
}

nlohmann::json RunConfig::to_json() const {
  return nlohmann::json{
      {"batch_size", batch_size},
      {"learning_rate", learning_rate},
      {"max_epochs", max_epochs},
      {"lambda_cls", lambda_cls},
      {"temperature", temperature},
      {"seed", seed},
      {"use_lcr", ablation.use_lcr},
      {"use_sct", ablation.use_sct},
      {"use_cct", ablation.use_cct},
      {"early_stop_patience", early_stop_patience},
      {"tuner_hidden_dim", tuner_hidden_dim},
      {"tokens_per_level", tokens_per_level},
      {"adam_beta1", adam_beta1},
      {"adam_beta2", adam_beta2},
      {"adam_epsilon", adam_epsilon},
      {"weight_decay", weight_decay},
      {"score_with_modulated", score_with_modulated},
      {"renormalize_modulated", renormalize_modulated},
      {"use_classification", use_classification},
      {"backbone", backbone},
      {"toy_embed_dim", toy_embed_dim},
      {"backbone_seed", backbone_seed},
      {"weights_path", weights_path},
  };
}

namespace {

template <typename T>
void read_field(const nlohmann::json& j, const nlohmann::json& defaults, const char* key,
                bool required, T& out) {
  auto it = j.find(key);
  if (it == j.end()) {
    if (required) {
      throw ConfigError(std::string("missing config field '") + key +
                        "' (default: " + defaults.at(key).dump() + ")");
    }
    return;
  }
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type: " + e.what());
  }
}

RunConfig parse_config(const RunConfig& base, const nlohmann::json& j, bool required) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const nlohmann::json defaults = RunConfig{}.to_json();
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw ConfigError("unknown config field '" + key + "'");
  }
  RunConfig c = base;
  read_field(j, defaults, "batch_size", required, c.batch_size);
  read_field(j, defaults, "learning_rate", required, c.learning_rate);
  read_field(j, defaults, "max_epochs", required, c.max_epochs);
  read_field(j, defaults, "lambda_cls", required, c.lambda_cls);
  read_field(j, defaults, "temperature", required, c.temperature);
  read_field(j, defaults, "seed", required, c.seed);
  read_field(j, defaults, "use_lcr", required, c.ablation.use_lcr);
  read_field(j, defaults, "use_sct", required, c.ablation.use_sct);
  read_field(j, defaults, "use_cct", required, c.ablation.use_cct);
  read_field(j, defaults, "early_stop_patience", required, c.early_stop_patience);
  read_field(j, defaults, "tuner_hidden_dim", required, c.tuner_hidden_dim);
  read_field(j, defaults, "tokens_per_level", required, c.tokens_per_level);
  read_field(j, defaults, "adam_beta1", required, c.adam_beta1);
  read_field(j, defaults, "adam_beta2", required, c.adam_beta2);
  read_field(j, defaults, "adam_epsilon", required, c.adam_epsilon);
  read_field(j, defaults, "weight_decay", required, c.weight_decay);
  read_field(j, defaults, "score_with_modulated", required, c.score_with_modulated);
  read_field(j, defaults, "renormalize_modulated", required, c.renormalize_modulated);
  read_field(j, defaults, "use_classification", required, c.use_classification);
  read_field(j, defaults, "backbone", required, c.backbone);
  read_field(j, defaults, "toy_embed_dim", required, c.toy_embed_dim);
  read_field(j, defaults, "backbone_seed", required, c.backbone_seed);
  read_field(j, defaults, "weights_path", required, c.weights_path);
  c.validate();
  return c;
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) { return parse_config(RunConfig{}, j, true); }

RunConfig RunConfig::merge_json(const RunConfig& base, const nlohmann::json& j) {
  return parse_config(base, j, false);
}

std::string RunConfig::fingerprint() const {
  // weights_path is a location, not a setting.
  nlohmann::json j = to_json();
  j.erase("weights_path");
  return to_hex(fnv1a(j.dump()));
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace csca
