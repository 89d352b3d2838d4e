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

#include "csca/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "csca/csv.hpp"
#include "csca/error.hpp"
#include "csca/log.hpp"

namespace csca {

LossBreakdown combine_losses(double l_reg, double l_cls, double lambda) {
  LossBreakdown b;
  b.l_reg = l_reg;
  b.l_cls = l_cls;
  b.total = l_reg + lambda * l_cls;
  return b;
}

double regression_loss(std::span<const double> predicted, std::span<const double> target) {
  if (predicted.size() != target.size()) throw DimensionError("regression_loss: length mismatch");
  if (predicted.empty()) throw DegenerateInputError("regression_loss: empty batch");
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double r = target[i] - predicted[i];
    sum += r * r;
  }
  return sum / static_cast<double>(predicted.size());
}

double classification_loss(std::span<const ContentArray> probs, std::span<const ContentLabel> labels) {
  if (probs.size() != labels.size()) throw DimensionError("classification_loss: length mismatch");
  if (probs.empty()) throw DegenerateInputError("classification_loss: empty batch");
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    sum += std::log(std::max(probs[i][code(labels[i])], kProbabilityFloor));
  }
  return -sum / static_cast<double>(probs.size());
}

std::vector<TrainingSample> encode_samples(std::span<const DrawingRecord> records,
                                           const ChannelStats& stats, const EncoderBundle& bundle) {
  std::vector<TrainingSample> samples;
  samples.reserve(records.size());
  for (const auto& r : records) {
    if (!r.rating_norm) throw ConfigError("record '" + r.id + "' has no normalized rating");
    const ImageTensor inverted = decode_and_invert(r.image_path);
    TrainingSample s;
    s.id = r.id;
    s.features = bundle.encode_image(preprocess(inverted, stats));
    s.ink = r.style_scalar ? *r.style_scalar : ink_intensity(inverted);
    s.target = *r.rating_norm;
    s.label = r.content_label;
    samples.push_back(std::move(s));
  }
  return samples;
}

namespace {

LossBreakdown run_batch(std::span<const TrainingSample> batch, const CscaModel& model, double lambda,
                        bool use_classification, CscaParameters* grads) {
  if (batch.empty()) throw DegenerateInputError("empty batch");
  const Matrix rating = model.rating_embeddings();
  Matrix grad_rating;
  if (grads) grad_rating = Matrix::Zero(rating.rows(), rating.cols());

  const double n = static_cast<double>(batch.size());
  std::vector<double> predicted, target;
  std::vector<ContentArray> probs;
  std::vector<ContentLabel> labels;
  predicted.reserve(batch.size());
  target.reserve(batch.size());
  for (const auto& sample : batch) {
    const ForwardTrace trace = model.forward(sample.features, sample.ink, rating);
    predicted.push_back(trace.distribution.score);
    target.push_back(sample.target);
    if (use_classification && sample.label) {
      probs.push_back(trace.content_probs);
      labels.push_back(*sample.label);
    }
    if (grads) {
      // Content probabilities depend only on frozen quantities, so only the
      // regression term contributes a gradient.
      const double grad_score = 2.0 * (trace.distribution.score - sample.target) / n;
      model.backward(trace, grad_score, rating, *grads, grad_rating);
    }
  }
  if (grads) model.backward_rating_embeddings(grad_rating, *grads);

  const double l_reg = regression_loss(predicted, target);
  const double l_cls = labels.empty() ? 0.0 : classification_loss(probs, labels);
  LossBreakdown b = combine_losses(l_reg, l_cls, lambda);
  b.n_reg = batch.size();
  b.n_cls = labels.size();
  return b;
}

}  // namespace

LossBreakdown total_loss(std::span<const TrainingSample> batch, const CscaModel& model, double lambda,
                         bool use_classification) {
  return run_batch(batch, model, lambda, use_classification, nullptr);
}

LossBreakdown loss_and_gradients(std::span<const TrainingSample> batch, const CscaModel& model,
                                 double lambda, bool use_classification, CscaParameters& grads) {
  return run_batch(batch, model, lambda, use_classification, &grads);
}

AdamOptimizer::AdamOptimizer(double learning_rate, double beta1, double beta2, double epsilon,
                             double weight_decay)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon), weight_decay_(weight_decay) {}

void AdamOptimizer::step(CscaModel& model, const CscaParameters& grads) {
  CscaParameters& params = model.mutable_parameters();
  if (!first_moment_) {
    first_moment_ = zeros_like(params);
    second_moment_ = zeros_like(params);
  }
  ++steps_;
  const double bias1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double bias2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));

  auto p_views = tensor_views(params);
  auto g_views = tensor_views(grads);
  auto m_views = tensor_views(*first_moment_);
  auto v_views = tensor_views(*second_moment_);
  for (std::size_t t = 0; t < p_views.size(); ++t) {
    if (!model.trainable(p_views[t].group)) continue;
    if (g_views[t].size != p_views[t].size) throw DimensionError("gradient shape mismatch for " + p_views[t].name);
    double* p = p_views[t].data;
    const double* g = g_views[t].data;
    double* m = m_views[t].data;
    double* v = v_views[t].data;
    for (std::size_t i = 0; i < p_views[t].size; ++i) {
      const double grad = g[i] + weight_decay_ * p[i];
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * grad;
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * grad * grad;
      const double m_hat = m[i] / bias1;
      const double v_hat = v[i] / bias2;
      p[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
    }
  }
}

TrainResult train(CscaModel& model, std::span<const TrainingSample> train_set,
                  std::span<const TrainingSample> val_set, const RunConfig& config) {
  config.validate();
  if (train_set.empty()) throw DegenerateInputError("training split is empty");
  if (val_set.empty()) throw DegenerateInputError("validation split is empty");

  bool use_cls = config.use_classification;
  if (use_cls) {
    const auto labeled = std::count_if(train_set.begin(), train_set.end(),
                                       [](const TrainingSample& s) { return s.label.has_value(); });
    if (labeled == 0) {
      log::warning("no training record carries a content label; classification loss disabled");
      use_cls = false;
    } else if (static_cast<std::size_t>(labeled) < train_set.size()) {
      log::warning(std::to_string(train_set.size() - labeled) +
                   " training records lack content labels and are excluded from the classification loss");
    }
  }
  const auto [min_it, max_it] = std::minmax_element(
      train_set.begin(), train_set.end(),
      [](const TrainingSample& a, const TrainingSample& b) { return a.target < b.target; });
  if (min_it->target == max_it->target) {
    log::warning("all training targets are identical; training proceeds on degenerate data");
  }

  TrainResult result;
  result.best_params = model.parameters();
  result.best_val_metric = std::numeric_limits<double>::infinity();

  TrainState state;
  state.rng_seed = config.seed;
  std::mt19937_64 rng(state.rng_seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  AdamOptimizer optimizer(config.learning_rate, config.adam_beta1, config.adam_beta2, config.adam_epsilon,
                          config.weight_decay);
  std::vector<TrainingSample> batch;
  batch.reserve(config.batch_size);

  for (state.epoch = 1; state.epoch <= config.max_epochs; ++state.epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double sum_reg = 0.0, sum_cls = 0.0;
    std::size_t n_reg = 0, n_cls = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(train_set[order[i]]);
      CscaParameters grads = zeros_like(model.parameters());
      const LossBreakdown b = loss_and_gradients(batch, model, config.lambda_cls, use_cls, grads);
      optimizer.step(model, grads);
      sum_reg += b.l_reg * static_cast<double>(b.n_reg);
      sum_cls += b.l_cls * static_cast<double>(b.n_cls);
      n_reg += b.n_reg;
      n_cls += b.n_cls;
    }
    const LossBreakdown epoch_loss = combine_losses(
        sum_reg / static_cast<double>(n_reg), n_cls ? sum_cls / static_cast<double>(n_cls) : 0.0,
        config.lambda_cls);
    const LossBreakdown val = total_loss(val_set, model, config.lambda_cls, use_cls);

    result.history.push_back({state.epoch, epoch_loss.l_reg, epoch_loss.l_cls, epoch_loss.total, val.total});
    if (val.total < result.best_val_metric) {
      result.best_val_metric = val.total;
      result.best_epoch = state.epoch;
      result.best_params = model.parameters();
      state.epochs_since_best = 0;
    } else {
      ++state.epochs_since_best;
    }
    state.best_val_metric = result.best_val_metric;
    log::debug("epoch " + std::to_string(state.epoch) + " train " + csv::format_double(epoch_loss.total) +
               " val " + csv::format_double(val.total));
    if (state.epochs_since_best > config.early_stop_patience) {
      result.stopped_early = true;
      break;
    }
  }
  model.mutable_parameters() = result.best_params;
  return result;
}

std::string format_history(std::span<const EpochRecord> history) {
  std::string out = "epoch,l_reg,l_cls,total,val_total\n";
  for (const auto& e : history) {
    out += std::to_string(e.epoch) + "," + csv::format_double(e.l_reg) + "," + csv::format_double(e.l_cls) +
           "," + csv::format_double(e.total) + "," + csv::format_double(e.val_total) + "\n";
  }
  return out;
}

std::array<RunConfig, 5> ablation_configs(const RunConfig& base) {
  constexpr std::array<AblationFlags, 5> rows = {{
      {false, false, false},
      {true, false, false},
      {true, true, false},
      {true, false, true},
      {true, true, true},
  }};
  std::array<RunConfig, 5> configs;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    configs[i] = base;
    configs[i].ablation = rows[i];
  }
  return configs;
}

std::string_view ablation_row_name(int row) {
  switch (row) {
    case 1:
      return "fixed-template baseline";
    case 2:
      return "LCR";
    case 3:
      return "LCR+SCT";
    case 4:
      return "LCR+CCT";
    case 5:
      return "LCR+SCT+CCT";
    default:
      throw ConfigError("ablation row must be in 1..5, got " + std::to_string(row));
  }
}

int ablation_row(const AblationFlags& flags) {
  const auto configs = ablation_configs();
  for (int i = 0; i < 5; ++i) {
    if (configs[i].ablation == flags) return i + 1;
  }
  return 0;
}

}  // namespace csca
