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

#include <utility>

#include "csca/error.hpp"
#include "csca/model.hpp"
#include "csca/tensor_io.hpp"

namespace csca {

namespace {

constexpr std::string_view kCheckpointMagic = "CSCACKPT";
constexpr std::uint32_t kCheckpointVersion = 1;

Matrix as_column(const Vector& v) { return Matrix(v); }

Vector column_of(const Matrix& m, const std::string& name) {
  if (m.cols() != 1) throw ParseError("tensor '" + name + "' must be a column");
  return m.col(0);
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  nlohmann::json meta;
  meta["config"] = ckpt.config.to_json();
  meta["fingerprint"] = ckpt.config.fingerprint();
  meta["channel_mean"] = ckpt.stats.mean;
  meta["channel_std"] = ckpt.stats.std;
  meta["backbone_id"] = ckpt.backbone_id;
  meta["embed_dim"] = ckpt.embed_dim;
  meta["backbone_checksum"] = to_hex(ckpt.backbone_checksum);
  meta["best_epoch"] = ckpt.best_epoch;

  std::vector<std::pair<std::string, Matrix>> tensors;
  const auto& p = ckpt.params;
  for (int s = 0; s < kNumCreativityLevels; ++s) {
    tensors.emplace_back("rating_tokens." + std::string(kLevelPhrases[s]), p.rating_tokens[s]);
  }
  tensors.emplace_back("content.w1", p.content.w1);
  tensors.emplace_back("content.b1", as_column(p.content.b1));
  tensors.emplace_back("content.w2", p.content.w2);
  tensors.emplace_back("content.b2", as_column(p.content.b2));
  tensors.emplace_back("style.w1", as_column(p.style.w1));
  tensors.emplace_back("style.b1", as_column(p.style.b1));
  tensors.emplace_back("style.w2", p.style.w2);
  tensors.emplace_back("style.b2", as_column(p.style.b2));
  write_tensor_file(path, kCheckpointMagic, kCheckpointVersion, meta, tensors);
}

Checkpoint load_checkpoint(const std::string& path) {
  const TensorFile file = read_tensor_file(path, kCheckpointMagic, kCheckpointVersion);
  Checkpoint ckpt;
  try {
    const auto& meta = file.meta;
    ckpt.config = RunConfig::from_json(meta.at("config"));
    const auto stored = meta.at("fingerprint").get<std::string>();
    if (stored != ckpt.config.fingerprint()) {
      throw ParseError("config fingerprint mismatch (stored " + stored + ", computed " +
                       ckpt.config.fingerprint() + ")");
    }
    ckpt.stats.mean = meta.at("channel_mean").get<std::array<double, 3>>();
    ckpt.stats.std = meta.at("channel_std").get<std::array<double, 3>>();
    ckpt.backbone_id = meta.at("backbone_id").get<std::string>();
    ckpt.embed_dim = meta.at("embed_dim").get<int>();
    ckpt.backbone_checksum = std::stoull(meta.at("backbone_checksum").get<std::string>(), nullptr, 16);
    ckpt.best_epoch = meta.at("best_epoch").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("checkpoint '" + path + "': " + e.what());
  } catch (const ConfigError& e) {
    throw ParseError("checkpoint '" + path + "': " + e.what());
  } catch (const ParseError& e) {
    throw ParseError("checkpoint '" + path + "': " + e.what());
  }
  auto& p = ckpt.params;
  for (int s = 0; s < kNumCreativityLevels; ++s) {
    p.rating_tokens[s] = file.tensor("rating_tokens." + std::string(kLevelPhrases[s]));
  }
  p.content.w1 = file.tensor("content.w1");
  p.content.b1 = column_of(file.tensor("content.b1"), "content.b1");
  p.content.w2 = file.tensor("content.w2");
  p.content.b2 = column_of(file.tensor("content.b2"), "content.b2");
  p.style.w1 = column_of(file.tensor("style.w1"), "style.w1");
  p.style.b1 = column_of(file.tensor("style.b1"), "style.b1");
  p.style.w2 = file.tensor("style.w2");
  p.style.b2 = column_of(file.tensor("style.b2"), "style.b2");
  return ckpt;
}

CscaModel restore_model(const Checkpoint& ckpt, std::shared_ptr<const EncoderBundle> bundle) {
  if (!bundle) throw ConfigError("restore_model requires an encoder bundle");
  if (bundle->model_id() != ckpt.backbone_id) {
    throw ConfigError("checkpoint/backbone mismatch: checkpoint trained on '" + ckpt.backbone_id +
                      "', bundle is '" + bundle->model_id() + "'");
  }
  if (bundle->embed_dim() != ckpt.embed_dim) {
    throw ConfigError("checkpoint/backbone mismatch: embedding dimension " + std::to_string(ckpt.embed_dim) +
                      " vs " + std::to_string(bundle->embed_dim()));
  }
  if (bundle->parameter_checksum() != ckpt.backbone_checksum) {
    throw ConfigError("checkpoint/backbone mismatch: encoder weights differ from the ones used in training");
  }
  return CscaModel(std::move(bundle), ModelOptions::from_config(ckpt.config), ckpt.params);
}

}  // namespace csca
