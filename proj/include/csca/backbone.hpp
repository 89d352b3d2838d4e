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

#ifndef CSCA_BACKBONE_HPP_
#define CSCA_BACKBONE_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "csca/imaging.hpp"

namespace csca {

using Vector = Eigen::VectorXd;
// Row-major so that a token sequence is one row per token.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Frozen image/text encoder pair. Implementations never change their own
// parameters after construction; the only trainable quantities upstream of
// the text encoder are the token embeddings callers pass in.
class EncoderBundle {
 public:
  virtual ~EncoderBundle() = default;

  virtual std::string model_id() const = 0;
  // Dimension d of the joint embedding space.
  virtual int embed_dim() const = 0;
  // Width of one token embedding row.
  virtual int token_dim() const = 0;

  // Preprocessed 3-channel image -> unit-norm feature vector of size d.
  virtual Vector encode_image(const ImageTensor& image) const = 0;

  virtual std::vector<int> tokenize(std::string_view text) const = 0;
  // One row per token id.
  virtual Matrix embed_tokens(const std::vector<int>& ids) const = 0;

  // Token embedding sequence (L x token_dim) -> unit-norm vector of size d.
  virtual Vector encode_text(const Matrix& tokens) const = 0;
  // Vector-Jacobian product: gradient of a scalar loss w.r.t. `tokens`
  // given its gradient w.r.t. encode_text(tokens).
  virtual Matrix encode_text_backward(const Matrix& tokens, const Vector& grad_output) const = 0;

  // Hash of every encoder parameter; used to prove the encoders stay frozen.
  virtual std::uint64_t parameter_checksum() const = 0;

  Vector encode_prompt(std::string_view text) const { return encode_text(embed_tokens(tokenize(text))); }
};

// Encoder family used by both the toy test double and exported pretrained
// weights: the image path averages the input over a grid x grid layout per
// channel and applies a linear projection; the text path averages the token
// embeddings and applies a linear projection. Both outputs are
// L2-normalized.
class PooledLinearBundle final : public EncoderBundle {
 public:
  struct Weights {
    std::string model_id;
    int pool_grid = 8;
    Matrix token_table;        // vocab x token_dim
    Matrix image_projection;   // d x (3 * grid * grid)
    Matrix text_projection;    // d x token_dim
  };

  explicit PooledLinearBundle(Weights weights);

  std::string model_id() const override { return weights_.model_id; }
  int embed_dim() const override { return static_cast<int>(weights_.image_projection.rows()); }
  int token_dim() const override { return static_cast<int>(weights_.token_table.cols()); }
  int vocab_size() const { return static_cast<int>(weights_.token_table.rows()); }

  Vector encode_image(const ImageTensor& image) const override;
  std::vector<int> tokenize(std::string_view text) const override;
  Matrix embed_tokens(const std::vector<int>& ids) const override;
  Vector encode_text(const Matrix& tokens) const override;
  Matrix encode_text_backward(const Matrix& tokens, const Vector& grad_output) const override;
  std::uint64_t parameter_checksum() const override;

  // Average-pooled features before projection.
  Vector pool_image(const ImageTensor& image) const;

  const Weights& weights() const { return weights_; }

 private:
  Weights weights_;
};

inline constexpr int kToyVocabSize = 1024;
inline constexpr int kVitL14EmbedDim = 768;

// Deterministic seeded test double; d >= 8. Token width equals d.
std::shared_ptr<const PooledLinearBundle> toy_bundle(int embed_dim, std::uint64_t seed);

// Loads an encoder weights container written by save_bundle_weights. Known
// model ids are "toy" and "vit-l-14"; the latter must have d = 768.
// `expected_dim` (when > 0) must match the loaded dimension.
std::shared_ptr<const PooledLinearBundle> pretrained_bundle(const std::string& model_id,
                                                            const std::string& weights_path,
                                                            int expected_dim = 0);

void save_bundle_weights(const PooledLinearBundle& bundle, const std::string& path);

// Unit vector in the direction of v; throws DegenerateInputError for a zero
// vector.
Vector l2_normalize(const Vector& v);
// Gradient through x -> x / |x| given the output y = x / |x| and the norm.
Vector l2_normalize_backward(const Vector& y, double norm, const Vector& grad_y);

}  // namespace csca

#endif  // CSCA_BACKBONE_HPP_
