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

#ifndef CSCA_CORE_TYPES_HPP_
#define CSCA_CORE_TYPES_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace csca {

inline constexpr int kNumContentLabels = 5;
inline constexpr int kNumCreativityLevels = 5;

// Integer codes follow the content prompt order: object, plant, animal,
// human, other.
enum class ContentLabel : int {
  kObject = 0,
  kPlant = 1,
  kAnimal = 2,
  kHuman = 3,
  kOther = 4,
};

inline constexpr std::array<ContentLabel, kNumContentLabels> kAllContentLabels = {
    ContentLabel::kObject, ContentLabel::kPlant, ContentLabel::kAnimal,
    ContentLabel::kHuman, ContentLabel::kOther};

// Throws ParseError for anything outside the five lowercase names.
ContentLabel parse_content_label(std::string_view text);
std::string_view to_string(ContentLabel label);
inline int code(ContentLabel label) { return static_cast<int>(label); }

// Creativity levels, ordered from worst to best. Phrase i carries weight
// kLevelWeights[i].
inline constexpr std::array<std::string_view, kNumCreativityLevels> kLevelPhrases = {
    "bad", "poor", "fair", "good", "perfect"};
inline constexpr std::array<double, kNumCreativityLevels> kLevelWeights = {
    0.2, 0.4, 0.6, 0.8, 1.0};

struct CreativityLevel {
  std::string_view phrase;
  double weight;
};
CreativityLevel creativity_level(int index);

enum class Split : int { kTrain, kVal, kTest, kRg1, kRg2, kFg };

Split parse_split(std::string_view text);
std::string_view to_string(Split split);

// One drawing. Fields filled by later pipeline stages are optional until
// the stage has run.
struct DrawingRecord {
  std::string id;
  std::string image_path;
  std::optional<ContentLabel> content_label;
  double rating_raw = 0.0;
  std::optional<double> rating_norm;
  Split split = Split::kTrain;
  std::optional<double> style_scalar;

  friend bool operator==(const DrawingRecord&, const DrawingRecord&) = default;
};

struct AblationFlags {
  bool use_lcr = true;
  bool use_sct = true;
  bool use_cct = true;

  friend bool operator==(const AblationFlags&, const AblationFlags&) = default;
};

// Everything that determines a run. Serialized as JSON; every field must be
// present in a config file (see from_json).
struct RunConfig {
  int batch_size = 16;
  double learning_rate = 1e-5;
  int max_epochs = 136;
  double lambda_cls = 1e-3;
  double temperature = 0.01;
  std::uint64_t seed = 0;
  AblationFlags ablation;
  int early_stop_patience = 10;
  int tuner_hidden_dim = 64;
  // Number of trailing template tokens that are learnable per level; 0 means
  // the whole template.
  int tokens_per_level = 0;

  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double weight_decay = 0.0;

  // Score against the modulated embedding (true) or the raw image embedding.
  bool score_with_modulated = true;
  // L2-normalize the modulated embedding before similarity.
  bool renormalize_modulated = true;
  bool use_classification = true;

  std::string backbone = "toy";
  int toy_embed_dim = 64;
  std::uint64_t backbone_seed = 7;
  std::string weights_path;

  // Throws ConfigError when an invariant is violated.
  void validate() const;

  nlohmann::json to_json() const;
  // Every field is required; a missing field raises ConfigError naming the
  // field and its default value.
  static RunConfig from_json(const nlohmann::json& j);
  // Like from_json but fields absent from `j` keep the values of `base`.
  static RunConfig merge_json(const RunConfig& base, const nlohmann::json& j);

  // Stable 16-hex-digit hash of the canonical JSON form.
  std::string fingerprint() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string to_hex(std::uint64_t value);

}  // namespace csca

#endif  // CSCA_CORE_TYPES_HPP_
