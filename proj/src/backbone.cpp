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

#include "csca/backbone.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

#include "csca/core_types.hpp"
#include "csca/error.hpp"
#include "csca/tensor_io.hpp"

namespace csca {

namespace {

constexpr std::string_view kWeightsMagic = "CSCAWGT1";
constexpr std::uint32_t kWeightsVersion = 1;

std::uint64_t hash_matrix(const Matrix& m, std::uint64_t h) {
  const auto* bytes = reinterpret_cast<const char*>(m.data());
  return fnv1a(std::string_view(bytes, m.size() * sizeof(double)), h);
}

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

}  // namespace

Vector l2_normalize(const Vector& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw DegenerateInputError("cannot normalize a zero or non-finite vector");
  return v / n;
}

Vector l2_normalize_backward(const Vector& y, double norm, const Vector& grad_y) {
  return (grad_y - y * y.dot(grad_y)) / norm;
}

PooledLinearBundle::PooledLinearBundle(Weights weights) : weights_(std::move(weights)) {
  const auto& w = weights_;
  if (w.pool_grid < 1) throw DimensionError("pool_grid must be >= 1");
  if (w.token_table.rows() < 1 || w.token_table.cols() < 1) throw DimensionError("empty token table");
  if (w.image_projection.rows() < 1) throw DimensionError("empty image projection");
  if (w.image_projection.cols() != 3 * w.pool_grid * w.pool_grid) {
    throw DimensionError("image projection expects " + std::to_string(3 * w.pool_grid * w.pool_grid) +
                         " pooled inputs, has " + std::to_string(w.image_projection.cols()));
  }
  if (w.text_projection.rows() != w.image_projection.rows()) {
    throw DimensionError("image and text projections disagree on embedding dimension");
  }
  if (w.text_projection.cols() != w.token_table.cols()) {
    throw DimensionError("text projection width does not match token width");
  }
}

Vector PooledLinearBundle::pool_image(const ImageTensor& image) const {
  if (image.height < 1 || image.width < 1) throw ImageError("zero-area image");
  const int g = weights_.pool_grid;
  Vector pooled(3 * g * g);
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < g; ++i) {
      const int y0 = i * image.height / g;
      const int y1 = std::max(y0 + 1, ((i + 1) * image.height + g - 1) / g);
      for (int j = 0; j < g; ++j) {
        const int x0 = j * image.width / g;
        const int x1 = std::max(x0 + 1, ((j + 1) * image.width + g - 1) / g);
        double sum = 0.0;
        for (int y = y0; y < y1; ++y) {
          for (int x = x0; x < x1; ++x) sum += image.at(c, y, x);
        }
        pooled[(c * g + i) * g + j] = sum / ((y1 - y0) * (x1 - x0));
      }
    }
  }
  return pooled;
}

Vector PooledLinearBundle::encode_image(const ImageTensor& image) const {
  return l2_normalize(weights_.image_projection * pool_image(image));
}

std::vector<int> PooledLinearBundle::tokenize(std::string_view text) const {
  std::vector<int> ids;
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    ids.push_back(static_cast<int>(fnv1a(word) % static_cast<std::uint64_t>(vocab_size())));
    word.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      word.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return ids;
}

Matrix PooledLinearBundle::embed_tokens(const std::vector<int>& ids) const {
  Matrix out(static_cast<Eigen::Index>(ids.size()), token_dim());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= vocab_size()) throw DimensionError("token id out of range");
    out.row(static_cast<Eigen::Index>(i)) = weights_.token_table.row(ids[i]);
  }
  return out;
}

Vector PooledLinearBundle::encode_text(const Matrix& tokens) const {
  if (tokens.rows() < 1) throw DimensionError("empty token sequence");
  if (tokens.cols() != token_dim()) throw DimensionError("token width mismatch");
  const Vector mean = tokens.colwise().mean().transpose();
  return l2_normalize(weights_.text_projection * mean);
}

Matrix PooledLinearBundle::encode_text_backward(const Matrix& tokens, const Vector& grad_output) const {
  if (tokens.rows() < 1) throw DimensionError("empty token sequence");
  if (grad_output.size() != embed_dim()) throw DimensionError("gradient dimension mismatch");
  const Vector mean = tokens.colwise().mean().transpose();
  const Vector projected = weights_.text_projection * mean;
  const double norm = projected.norm();
  const Vector grad_projected = l2_normalize_backward(projected / norm, norm, grad_output);
  const Vector grad_mean = weights_.text_projection.transpose() * grad_projected;
  Matrix grad(tokens.rows(), tokens.cols());
  grad.rowwise() = (grad_mean / static_cast<double>(tokens.rows())).transpose();
  return grad;
}

std::uint64_t PooledLinearBundle::parameter_checksum() const {
  std::uint64_t h = fnv1a(weights_.model_id);
  h = fnv1a(std::to_string(weights_.pool_grid), h);
  h = hash_matrix(weights_.token_table, h);
  h = hash_matrix(weights_.image_projection, h);
  return hash_matrix(weights_.text_projection, h);
}

std::shared_ptr<const PooledLinearBundle> toy_bundle(int embed_dim, std::uint64_t seed) {
  if (embed_dim < 8) throw ConfigError("toy bundle requires embed_dim >= 8");
  std::mt19937_64 rng(seed);
  PooledLinearBundle::Weights w;
  w.model_id = "toy";
  w.pool_grid = 8;
  const int pooled = 3 * w.pool_grid * w.pool_grid;
  w.token_table = gaussian(kToyVocabSize, embed_dim, 1.0, rng);
  w.image_projection = gaussian(embed_dim, pooled, 1.0 / std::sqrt(pooled), rng);
  w.text_projection = gaussian(embed_dim, embed_dim, 1.0 / std::sqrt(embed_dim), rng);
  return std::make_shared<const PooledLinearBundle>(std::move(w));
}

std::shared_ptr<const PooledLinearBundle> pretrained_bundle(const std::string& model_id,
                                                            const std::string& weights_path,
                                                            int expected_dim) {
  if (model_id != "toy" && model_id != "vit-l-14") {
    throw ConfigError("unknown model_id '" + model_id + "' (expected toy or vit-l-14)");
  }
  TensorFile file;
  try {
    file = read_tensor_file(weights_path, kWeightsMagic, kWeightsVersion);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("cannot load encoder weights: ") + e.what());
  }
  PooledLinearBundle::Weights w;
  try {
    w.model_id = file.meta.at("model_id").get<std::string>();
    w.pool_grid = file.meta.at("pool_grid").get<int>();
    w.token_table = file.tensor("token_table");
    w.image_projection = file.tensor("image_projection");
    w.text_projection = file.tensor("text_projection");
  } catch (const std::exception& e) {
    throw ConfigError(std::string("corrupt encoder weights '") + weights_path + "': " + e.what());
  }
  if (w.model_id != model_id) {
    throw ConfigError("weights file '" + weights_path + "' holds model '" + w.model_id +
                      "', requested '" + model_id + "'");
  }
  auto bundle = std::make_shared<const PooledLinearBundle>(std::move(w));
  if (model_id == "vit-l-14" && bundle->embed_dim() != kVitL14EmbedDim) {
    throw DimensionError("vit-l-14 weights must have embedding dimension 768, found " +
                         std::to_string(bundle->embed_dim()));
  }
  if (expected_dim > 0 && bundle->embed_dim() != expected_dim) {
    throw DimensionError("encoder dimension " + std::to_string(bundle->embed_dim()) +
                         " does not match configured " + std::to_string(expected_dim));
  }
  return bundle;
}

void save_bundle_weights(const PooledLinearBundle& bundle, const std::string& path) {
  const auto& w = bundle.weights();
  write_tensor_file(path, kWeightsMagic, kWeightsVersion,
                    {{"model_id", w.model_id}, {"pool_grid", w.pool_grid}},
                    {{"token_table", w.token_table},
                     {"image_projection", w.image_projection},
                     {"text_projection", w.text_projection}});
}

}  // namespace csca
