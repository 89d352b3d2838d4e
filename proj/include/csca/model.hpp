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

#ifndef CSCA_MODEL_HPP_
#define CSCA_MODEL_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "csca/backbone.hpp"
#include "csca/core_types.hpp"
#include "csca/imaging.hpp"

namespace csca {

using LevelArray = std::array<double, kNumCreativityLevels>;
using ContentArray = std::array<double, kNumContentLabels>;

inline constexpr std::string_view kRatingTemplate = "the creativity of the photo is ";
inline constexpr std::string_view kContentTemplate = "a photo of ";

std::string rating_prompt(int level);
std::string content_prompt(ContentLabel label);

// Two-layer network f_c: content probabilities (5) -> hidden (h) -> d.
struct ContentTuner {
  Matrix w1;  // h x 5
  Vector b1;  // h
  Matrix w2;  // d x h, zero at initialization
  Vector b2;  // d, zero at initialization
};

// f_s: t -> sigmoid -> linear(1 -> h) -> ReLU -> linear(h -> d).
struct StyleTuner {
  Vector w1;  // h
  Vector b1;  // h
  Matrix w2;  // d x h, zero at initialization
  Vector b2;  // d, zero at initialization
};

// Everything the optimizer touches. The same struct doubles as the gradient
// container.
struct CscaParameters {
  // Learnable rating token embeddings delta_s, one sequence per level
  // (tokens x token_dim).
  std::array<Matrix, kNumCreativityLevels> rating_tokens;
  ContentTuner content;
  StyleTuner style;
};

enum class ParameterGroup { kRatingTokens, kContentTuner, kStyleTuner };

struct TensorView {
  std::string name;
  ParameterGroup group;
  double* data;
  std::size_t size;
};

struct ConstTensorView {
  std::string name;
  ParameterGroup group;
  const double* data;
  std::size_t size;
};

// Flat views over every tensor in a fixed order.
std::vector<TensorView> tensor_views(CscaParameters& params);
std::vector<ConstTensorView> tensor_views(const CscaParameters& params);
CscaParameters zeros_like(const CscaParameters& params);

// Text embeddings F_{T_c} of the five content prompts, rows in ContentLabel
// code order. Fixed once built.
struct ContentPromptBank {
  Matrix embeddings;  // 5 x d
};

ContentPromptBank build_content_prompts(const EncoderBundle& bundle);

struct ScoreDistribution {
  LevelArray probs{};
  double score = 0.0;
};

// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);
LevelArray softmax(const LevelArray& logits);

double cosine_similarity(const Vector& a, const Vector& b);

// z_I: softmax over content prompts of cos(F_I, F_{T_c}) / temperature,
// always computed from the unmodulated image embedding.
ContentArray content_probs(const Vector& image_features, const ContentPromptBank& prompts,
                           double temperature);

// pi_c = W2 ReLU(W1 z + b1) + b2.
Vector content_modulation(const ContentArray& z, const ContentTuner& tuner);
// pi_s = W2 ReLU(w1 sigmoid(t) + b1) + b2.
Vector style_modulation(double style, const StyleTuner& tuner);

// F_I + pi_c + pi_s; throws DimensionError on mismatched sizes.
Vector modulate(const Vector& image_features, const Vector& content_mod, const Vector& style_mod);

// Probability-weighted sum of the level weights.
double expected_score(const LevelArray& probs);
ScoreDistribution distribution_from_logits(const LevelArray& logits);

// Softmax over levels of sim(embedding, F_{T_s}) / temperature. With
// `renormalize` the embedding is L2-normalized first so the dot product is a
// cosine; rating embeddings are assumed unit-norm.
ScoreDistribution creativity_distribution(const Vector& embedding, const Matrix& rating_embeddings,
                                          double temperature, bool renormalize = true);

struct ModelOptions {
  double temperature = 0.01;
  AblationFlags ablation;
  bool score_with_modulated = true;
  bool renormalize_modulated = true;
  int hidden_dim = 64;
  int tokens_per_level = 0;

  static ModelOptions from_config(const RunConfig& config);
};

// Intermediate values of one forward pass, kept for the backward pass.
struct ForwardTrace {
  Vector image_features;
  ContentArray content_probs{};
  Vector content_pre;  // W1 z + b1
  Vector content_mod;
  double style_gate = 0.0;  // sigmoid(t)
  Vector style_pre;         // w1 * gate + b1
  Vector style_mod;
  Vector modulated;
  Vector scoring_input;  // what is compared with the rating embeddings
  double scoring_norm = 1.0;
  LevelArray logits{};
  ScoreDistribution distribution;
};

class CscaModel {
 public:
  // Fresh parameters: rating tokens from the fixed template, tuner input
  // layers random (seeded), tuner output layers zero.
  CscaModel(std::shared_ptr<const EncoderBundle> bundle, ModelOptions options, std::uint64_t seed);
  // Restores previously trained parameters; shapes are validated.
  CscaModel(std::shared_ptr<const EncoderBundle> bundle, ModelOptions options, CscaParameters params);

  const EncoderBundle& bundle() const { return *bundle_; }
  std::shared_ptr<const EncoderBundle> bundle_ptr() const { return bundle_; }
  const ModelOptions& options() const { return options_; }
  void set_ablation(const AblationFlags& flags) { options_.ablation = flags; }
  void set_options(const ModelOptions& options);

  const CscaParameters& parameters() const { return params_; }
  CscaParameters& mutable_parameters() { return params_; }

  const ContentPromptBank& content_prompts() const { return content_prompts_; }
  // Fixed leading template tokens that precede delta_s (may be empty).
  const Matrix& rating_context(int level) const { return rating_context_[level]; }
  // Full token sequence [context; delta_s] for a level.
  Matrix rating_sequence(int level) const;
  // E_T of the unmodified template, used when LCR is disabled.
  const Matrix& template_rating_embeddings() const { return template_embeddings_; }

  // F_{T_s} for the current parameters (5 x d). Equals the template
  // embeddings when LCR is off.
  Matrix rating_embeddings() const;

  ForwardTrace forward(const Vector& image_features, double style, const Matrix& rating_embeddings) const;
  ScoreDistribution score(const Vector& image_features, double style) const;

  // Accumulates d(loss)/d(params) into `grads` for one sample given
  // d(loss)/d(score), and d(loss)/d(F_{T_s}) into `grad_rating_embeddings`.
  // `rating_embeddings` must be the matrix the trace was computed with.
  void backward(const ForwardTrace& trace, double grad_score, const Matrix& rating_embeddings,
                CscaParameters& grads, Matrix& grad_rating_embeddings) const;
  // Pushes d(loss)/d(F_{T_s}) through the frozen text encoder into the
  // rating token gradients. No-op when LCR is off.
  void backward_rating_embeddings(const Matrix& grad_rating_embeddings, CscaParameters& grads) const;

  // Whether a parameter group receives updates under the current flags.
  bool trainable(ParameterGroup group) const;

  // Human-readable description of the active forward graph.
  std::string graph_description() const;

 private:
  void build_prompts();
  void check_shapes() const;

  std::shared_ptr<const EncoderBundle> bundle_;
  ModelOptions options_;
  CscaParameters params_;
  ContentPromptBank content_prompts_;
  std::array<Matrix, kNumCreativityLevels> rating_context_;
  Matrix template_embeddings_;
};

struct EncodedImage {
  Vector features;       // F_I
  double ink = 0.0;      // t_I
};

// decode -> invert -> t_I -> preprocess -> encode.
EncodedImage encode_image_file(const std::string& image_path, const ChannelStats& stats,
                               const EncoderBundle& bundle);
EncodedImage encode_inverted(const ImageTensor& inverted, const ChannelStats& stats,
                             const EncoderBundle& bundle);

struct Prediction {
  double score = 0.0;
  LevelArray level_probs{};
  ContentArray content_probs{};
  double ink_intensity = 0.0;
};

Prediction predict(const std::string& image_path, const ChannelStats& stats, const CscaModel& model);
Prediction predict_encoded(const EncodedImage& encoded, const CscaModel& model);

// Checkpoint: rating tokens, tuner weights, channel statistics, run
// configuration and backbone identity.
struct Checkpoint {
  RunConfig config;
  ChannelStats stats;
  CscaParameters params;
  std::string backbone_id;
  int embed_dim = 0;
  std::uint64_t backbone_checksum = 0;
  int best_epoch = 0;
};

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
// Verifies the stored config fingerprint.
Checkpoint load_checkpoint(const std::string& path);
// Throws ConfigError when the bundle differs from the one the checkpoint was
// trained against.
CscaModel restore_model(const Checkpoint& checkpoint, std::shared_ptr<const EncoderBundle> bundle);

}  // namespace csca

#endif  // CSCA_MODEL_HPP_
