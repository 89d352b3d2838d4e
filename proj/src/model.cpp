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

#include "csca/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "csca/error.hpp"

namespace csca {

std::string rating_prompt(int level) {
  return std::string(kRatingTemplate) + std::string(creativity_level(level).phrase);
}

std::string content_prompt(ContentLabel label) {
  return std::string(kContentTemplate) + std::string(to_string(label));
}

std::vector<TensorView> tensor_views(CscaParameters& p) {
  std::vector<TensorView> views;
  auto add = [&](std::string name, ParameterGroup group, auto& t) {
    views.push_back({std::move(name), group, t.data(), static_cast<std::size_t>(t.size())});
  };
  for (int s = 0; s < kNumCreativityLevels; ++s) {
    add("rating_tokens." + std::string(kLevelPhrases[s]), ParameterGroup::kRatingTokens,
        p.rating_tokens[s]);
  }
  add("content.w1", ParameterGroup::kContentTuner, p.content.w1);
  add("content.b1", ParameterGroup::kContentTuner, p.content.b1);
  add("content.w2", ParameterGroup::kContentTuner, p.content.w2);
  add("content.b2", ParameterGroup::kContentTuner, p.content.b2);
  add("style.w1", ParameterGroup::kStyleTuner, p.style.w1);
  add("style.b1", ParameterGroup::kStyleTuner, p.style.b1);
  add("style.w2", ParameterGroup::kStyleTuner, p.style.w2);
  add("style.b2", ParameterGroup::kStyleTuner, p.style.b2);
  return views;
}

std::vector<ConstTensorView> tensor_views(const CscaParameters& p) {
  std::vector<ConstTensorView> out;
  for (auto& v : tensor_views(const_cast<CscaParameters&>(p))) {
    out.push_back({std::move(v.name), v.group, v.data, v.size});
  }
  return out;
}

CscaParameters zeros_like(const CscaParameters& p) {
  CscaParameters z;
  for (int s = 0; s < kNumCreativityLevels; ++s) {
    z.rating_tokens[s] = Matrix::Zero(p.rating_tokens[s].rows(), p.rating_tokens[s].cols());
  }
  z.content.w1 = Matrix::Zero(p.content.w1.rows(), p.content.w1.cols());
  z.content.b1 = Vector::Zero(p.content.b1.size());
  z.content.w2 = Matrix::Zero(p.content.w2.rows(), p.content.w2.cols());
  z.content.b2 = Vector::Zero(p.content.b2.size());
  z.style.w1 = Vector::Zero(p.style.w1.size());
  z.style.b1 = Vector::Zero(p.style.b1.size());
  z.style.w2 = Matrix::Zero(p.style.w2.rows(), p.style.w2.cols());
  z.style.b2 = Vector::Zero(p.style.b2.size());
  return z;
}

ContentPromptBank build_content_prompts(const EncoderBundle& bundle) {
  ContentPromptBank bank;
  bank.embeddings.resize(kNumContentLabels, bundle.embed_dim());
  for (ContentLabel label : kAllContentLabels) {
    bank.embeddings.row(code(label)) = bundle.encode_prompt(content_prompt(label)).transpose();
  }
  return bank;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double max = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

LevelArray softmax(const LevelArray& logits) {
  const auto v = softmax(std::span<const double>(logits));
  LevelArray out;
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

double cosine_similarity(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("cosine similarity of vectors with different sizes");
  const double denom = a.norm() * b.norm();
  if (!(denom > 0.0)) throw DegenerateInputError("cosine similarity with a zero vector");
  return a.dot(b) / denom;
}

ContentArray content_probs(const Vector& image_features, const ContentPromptBank& prompts,
                           double temperature) {
  if (prompts.embeddings.rows() != kNumContentLabels) throw DimensionError("content prompt bank must have 5 rows");
  ContentArray logits;
  for (int c = 0; c < kNumContentLabels; ++c) {
    logits[c] = cosine_similarity(image_features, prompts.embeddings.row(c).transpose()) / temperature;
  }
  return softmax(logits);
}

Vector content_modulation(const ContentArray& z, const ContentTuner& tuner) {
  const Eigen::Map<const Vector> input(z.data(), kNumContentLabels);
  const Vector hidden = (tuner.w1 * input + tuner.b1).cwiseMax(0.0);
  return tuner.w2 * hidden + tuner.b2;
}

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Vector style_modulation(double style, const StyleTuner& tuner) {
  const Vector hidden = (tuner.w1 * sigmoid(style) + tuner.b1).cwiseMax(0.0);
  return tuner.w2 * hidden + tuner.b2;
}

Vector modulate(const Vector& image_features, const Vector& content_mod, const Vector& style_mod) {
  if (content_mod.size() != image_features.size() || style_mod.size() != image_features.size()) {
    throw DimensionError("modulation vectors must match the image embedding dimension");
  }
  return image_features + content_mod + style_mod;
}

double expected_score(const LevelArray& probs) {
  // Weights are (s + 1) / 5; summing against the integer ranks and dividing
  // once keeps the uniform case at exactly 0.6.
  static_assert(kLevelWeights[0] == 0.2 && kLevelWeights[4] == 1.0);
  double q = 0.0;
  for (int s = 0; s < kNumCreativityLevels; ++s) q += probs[s] * (s + 1);
  return q / kNumCreativityLevels;
}

ScoreDistribution distribution_from_logits(const LevelArray& logits) {
  ScoreDistribution d;
  d.probs = softmax(logits);
  d.score = expected_score(d.probs);
  return d;
}

ScoreDistribution creativity_distribution(const Vector& embedding, const Matrix& rating_embeddings,
                                          double temperature, bool renormalize) {
  if (rating_embeddings.rows() != kNumCreativityLevels || rating_embeddings.cols() != embedding.size()) {
    throw DimensionError("rating embeddings must be 5 x d");
  }
  const Vector v = renormalize ? l2_normalize(embedding) : embedding;
  LevelArray logits;
  for (int s = 0; s < kNumCreativityLevels; ++s) {
    logits[s] = v.dot(rating_embeddings.row(s).transpose()) / temperature;
  }
  return distribution_from_logits(logits);
}

ModelOptions ModelOptions::from_config(const RunConfig& config) {
  ModelOptions o;
  o.temperature = config.temperature;
  o.ablation = config.ablation;
  o.score_with_modulated = config.score_with_modulated;
  o.renormalize_modulated = config.renormalize_modulated;
  o.hidden_dim = config.tuner_hidden_dim;
  o.tokens_per_level = config.tokens_per_level;
  return o;
}

CscaModel::CscaModel(std::shared_ptr<const EncoderBundle> bundle, ModelOptions options,
                     std::uint64_t seed)
    : bundle_(std::move(bundle)), options_(options) {
  if (!bundle_) throw ConfigError("model requires an encoder bundle");
  if (!(options_.temperature > 0.0)) throw ConfigError("temperature must be > 0");
  if (options_.hidden_dim < 1) throw ConfigError("tuner hidden dimension must be >= 1");
  build_prompts();

  const int d = bundle_->embed_dim();
  const int h = options_.hidden_dim;
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](Eigen::Index rows, Eigen::Index cols, double bound) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
    return m;
  };
  const double content_bound = 1.0 / std::sqrt(static_cast<double>(kNumContentLabels));
  params_.content.w1 = uniform(h, kNumContentLabels, content_bound);
  params_.content.b1 = uniform(h, 1, content_bound).col(0);
  params_.content.w2 = Matrix::Zero(d, h);
  params_.content.b2 = Vector::Zero(d);
  params_.style.w1 = uniform(h, 1, 1.0).col(0);
  params_.style.b1 = uniform(h, 1, 1.0).col(0);
  params_.style.w2 = Matrix::Zero(d, h);
  params_.style.b2 = Vector::Zero(d);
}

CscaModel::CscaModel(std::shared_ptr<const EncoderBundle> bundle, ModelOptions options,
                     CscaParameters params)
    : bundle_(std::move(bundle)), options_(options), params_(std::move(params)) {
  if (!bundle_) throw ConfigError("model requires an encoder bundle");
  if (!(options_.temperature > 0.0)) throw ConfigError("temperature must be > 0");
  CscaParameters learned = std::move(params_);
  build_prompts();
  for (int s = 0; s < kNumCreativityLevels; ++s) {
    if (learned.rating_tokens[s].rows() != params_.rating_tokens[s].rows() ||
        learned.rating_tokens[s].cols() != params_.rating_tokens[s].cols()) {
      throw DimensionError("rating token shape does not match the template for level '" +
                           std::string(kLevelPhrases[s]) + "'");
    }
  }
  params_ = std::move(learned);
  options_.hidden_dim = static_cast<int>(params_.content.w1.rows());
  check_shapes();
}

void CscaModel::set_options(const ModelOptions& options) {
  if (options.tokens_per_level != options_.tokens_per_level) {
    throw ConfigError("tokens_per_level cannot change after construction");
  }
  if (!(options.temperature > 0.0)) throw ConfigError("temperature must be > 0");
  const int hidden = options_.hidden_dim;
  options_ = options;
  options_.hidden_dim = hidden;
}

void CscaModel::build_prompts() {
  content_prompts_ = build_content_prompts(*bundle_);
  template_embeddings_.resize(kNumCreativityLevels, bundle_->embed_dim());
  for (int s = 0; s < kNumCreativityLevels; ++s) {
    const Matrix tokens = bundle_->embed_tokens(bundle_->tokenize(rating_prompt(s)));
    const Eigen::Index length = tokens.rows();
    if (length < 1) throw ConfigError("rating template tokenized to an empty sequence");
    Eigen::Index learnable = options_.tokens_per_level == 0
                                 ? length
                                 : std::min<Eigen::Index>(options_.tokens_per_level, length);
    rating_context_[s] = tokens.topRows(length - learnable);
    params_.rating_tokens[s] = tokens.bottomRows(learnable);
    template_embeddings_.row(s) = bundle_->encode_text(tokens).transpose();
  }
}

void CscaModel::check_shapes() const {
  const Eigen::Index d = bundle_->embed_dim();
  const Eigen::Index h = params_.content.w1.rows();
  const auto& c = params_.content;
  const auto& st = params_.style;
  const bool ok = h >= 1 && c.w1.cols() == kNumContentLabels && c.b1.size() == h && c.w2.rows() == d &&
                  c.w2.cols() == h && c.b2.size() == d && st.w1.size() == h && st.b1.size() == h &&
                  st.w2.rows() == d && st.w2.cols() == h && st.b2.size() == d;
  if (!ok) throw DimensionError("tuner parameter shapes do not match embedding dimension " + std::to_string(d));
}

Matrix CscaModel::rating_sequence(int level) const {
  const Matrix& context = rating_context_[level];
  const Matrix& delta = params_.rating_tokens[level];
  Matrix seq(context.rows() + delta.rows(), delta.cols());
  seq << context, delta;
  return seq;
}

Matrix CscaModel::rating_embeddings() const {
  if (!options_.ablation.use_lcr) return template_embeddings_;
  Matrix out(kNumCreativityLevels, bundle_->embed_dim());
  for (int s = 0; s < kNumCreativityLevels; ++s) {
    out.row(s) = bundle_->encode_text(rating_sequence(s)).transpose();
  }
  return out;
}

ForwardTrace CscaModel::forward(const Vector& image_features, double style,
                                const Matrix& rating_embeddings) const {
  const Eigen::Index d = bundle_->embed_dim();
  if (image_features.size() != d) throw DimensionError("image embedding dimension mismatch");
  if (rating_embeddings.rows() != kNumCreativityLevels || rating_embeddings.cols() != d) {
    throw DimensionError("rating embeddings must be 5 x d");
  }
  const auto& flags = options_.ablation;
  ForwardTrace t;
  t.image_features = image_features;
  t.content_probs = content_probs(image_features, content_prompts_, options_.temperature);

  t.modulated = image_features;
  if (flags.use_cct) {
    const Eigen::Map<const Vector> z(t.content_probs.data(), kNumContentLabels);
    t.content_pre = params_.content.w1 * z + params_.content.b1;
    t.content_mod = params_.content.w2 * t.content_pre.cwiseMax(0.0) + params_.content.b2;
    t.modulated += t.content_mod;
  }
  if (flags.use_sct) {
    t.style_gate = sigmoid(style);
    t.style_pre = params_.style.w1 * t.style_gate + params_.style.b1;
    t.style_mod = params_.style.w2 * t.style_pre.cwiseMax(0.0) + params_.style.b2;
    t.modulated += t.style_mod;
  }

  const Vector& base = options_.score_with_modulated ? t.modulated : t.image_features;
  if (options_.renormalize_modulated) {
    t.scoring_norm = base.norm();
    if (!(t.scoring_norm > 0.0)) throw DegenerateInputError("modulated embedding collapsed to zero");
    t.scoring_input = base / t.scoring_norm;
  } else {
    t.scoring_norm = 1.0;
    t.scoring_input = base;
  }
  for (int s = 0; s < kNumCreativityLevels; ++s) {
    t.logits[s] = t.scoring_input.dot(rating_embeddings.row(s).transpose()) / options_.temperature;
  }
  t.distribution = distribution_from_logits(t.logits);
  return t;
}

ScoreDistribution CscaModel::score(const Vector& image_features, double style) const {
  return forward(image_features, style, rating_embeddings()).distribution;
}

void CscaModel::backward(const ForwardTrace& t, double grad_score, const Matrix& rating,
                         CscaParameters& grads, Matrix& grad_rating_embeddings) const {
  const double tau = options_.temperature;
  const auto& p = t.distribution.probs;
  const double q = t.distribution.score;

  Vector grad_input = Vector::Zero(t.scoring_input.size());
  for (int s = 0; s < kNumCreativityLevels; ++s) {
    const double grad_logit = grad_score * p[s] * (kLevelWeights[s] - q) / tau;
    grad_input += grad_logit * rating.row(s).transpose();
    grad_rating_embeddings.row(s) += grad_logit * t.scoring_input.transpose();
  }
  if (!options_.score_with_modulated) return;

  const Vector grad_modulated = options_.renormalize_modulated
                                    ? l2_normalize_backward(t.scoring_input, t.scoring_norm, grad_input)
                                    : grad_input;
  const auto& flags = options_.ablation;
  if (flags.use_cct) {
    const Vector hidden = t.content_pre.cwiseMax(0.0);
    grads.content.w2 += grad_modulated * hidden.transpose();
    grads.content.b2 += grad_modulated;
    const Vector grad_pre =
        (params_.content.w2.transpose() * grad_modulated).cwiseProduct((t.content_pre.array() > 0.0).cast<double>().matrix());
    const Eigen::Map<const Vector> z(t.content_probs.data(), kNumContentLabels);
    grads.content.w1 += grad_pre * z.transpose();
    grads.content.b1 += grad_pre;
  }
  if (flags.use_sct) {
    const Vector hidden = t.style_pre.cwiseMax(0.0);
    grads.style.w2 += grad_modulated * hidden.transpose();
    grads.style.b2 += grad_modulated;
    const Vector grad_pre =
        (params_.style.w2.transpose() * grad_modulated).cwiseProduct((t.style_pre.array() > 0.0).cast<double>().matrix());
    grads.style.w1 += grad_pre * t.style_gate;
    grads.style.b1 += grad_pre;
  }
}

void CscaModel::backward_rating_embeddings(const Matrix& grad_rating_embeddings,
                                           CscaParameters& grads) const {
  if (!options_.ablation.use_lcr) return;
  for (int s = 0; s < kNumCreativityLevels; ++s) {
    const Matrix seq = rating_sequence(s);
    const Matrix g = bundle_->encode_text_backward(seq, grad_rating_embeddings.row(s).transpose());
    grads.rating_tokens[s] += g.bottomRows(params_.rating_tokens[s].rows());
  }
}

bool CscaModel::trainable(ParameterGroup group) const {
  const auto& f = options_.ablation;
  switch (group) {
    case ParameterGroup::kRatingTokens:
      return f.use_lcr;
    case ParameterGroup::kContentTuner:
      return f.use_cct && options_.score_with_modulated;
    case ParameterGroup::kStyleTuner:
      return f.use_sct && options_.score_with_modulated;
  }
  return false;
}

std::string CscaModel::graph_description() const {
  const auto& f = options_.ablation;
  std::string g = "F_I";
  if (options_.score_with_modulated) {
    if (f.use_cct) g += " + f_c(softmax(sim(F_I,F_Tc)/tau))";
    if (f.use_sct) g += " + f_s(t_I)";
  }
  if (options_.renormalize_modulated) g = "l2norm(" + g + ")";
  g += " . ";
  g += f.use_lcr ? "E_T([ctx;delta_s])" : "E_T(template_s)";
  g += " / tau -> softmax -> sum p_s w_s";
  return g;
}

EncodedImage encode_inverted(const ImageTensor& inverted, const ChannelStats& stats,
                             const EncoderBundle& bundle) {
  EncodedImage e;
  e.ink = ink_intensity(inverted);
  e.features = bundle.encode_image(preprocess(inverted, stats));
  return e;
}

EncodedImage encode_image_file(const std::string& image_path, const ChannelStats& stats,
                               const EncoderBundle& bundle) {
  return encode_inverted(decode_and_invert(image_path), stats, bundle);
}

Prediction predict_encoded(const EncodedImage& encoded, const CscaModel& model) {
  const ForwardTrace t = model.forward(encoded.features, encoded.ink, model.rating_embeddings());
  Prediction p;
  p.score = t.distribution.score;
  p.level_probs = t.distribution.probs;
  p.content_probs = t.content_probs;
  p.ink_intensity = encoded.ink;
  return p;
}

Prediction predict(const std::string& image_path, const ChannelStats& stats, const CscaModel& model) {
  return predict_encoded(encode_image_file(image_path, stats, model.bundle()), model);
}

}  // namespace csca
