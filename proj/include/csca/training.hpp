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

#ifndef CSCA_TRAINING_HPP_
#define CSCA_TRAINING_HPP_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csca/core_types.hpp"
#include "csca/model.hpp"

namespace csca {

inline constexpr double kProbabilityFloor = 1e-12;

struct LossBreakdown {
  double l_reg = 0.0;
  double l_cls = 0.0;
  double total = 0.0;  // l_reg + lambda * l_cls
  std::size_t n_reg = 0;
  std::size_t n_cls = 0;
};

LossBreakdown combine_losses(double l_reg, double l_cls, double lambda);

// Mean squared error (1/N) sum (target - predicted)^2.
double regression_loss(std::span<const double> predicted, std::span<const double> target);

// -(1/N) sum log z_i[label_i], probabilities floored at kProbabilityFloor.
double classification_loss(std::span<const ContentArray> probs, std::span<const ContentLabel> labels);

// A drawing after the frozen encoders ran: everything the head needs.
struct TrainingSample {
  std::string id;
  Vector features;
  double ink = 0.0;
  double target = 0.0;
  std::optional<ContentLabel> label;
};

// Records must carry rating_norm. Missing style_scalar values are taken from
// the decoded image.
std::vector<TrainingSample> encode_samples(std::span<const DrawingRecord> records,
                                           const ChannelStats& stats, const EncoderBundle& bundle);

// Forward pass over a batch. Unlabeled samples are left out of l_cls; with
// no labeled sample (or classification disabled) l_cls is 0.
LossBreakdown total_loss(std::span<const TrainingSample> batch, const CscaModel& model, double lambda,
                         bool use_classification = true);

// total_loss plus gradients of the total w.r.t. every trainable tensor,
// accumulated into `grads` (which must be shaped like the parameters).
LossBreakdown loss_and_gradients(std::span<const TrainingSample> batch, const CscaModel& model,
                                 double lambda, bool use_classification, CscaParameters& grads);

struct EpochRecord {
  int epoch = 0;
  double l_reg = 0.0;
  double l_cls = 0.0;
  double total = 0.0;
  double val_total = 0.0;
};

struct TrainState {
  int epoch = 0;
  double best_val_metric = 0.0;
  int epochs_since_best = 0;
  std::uint64_t rng_seed = 0;
};

struct TrainResult {
  CscaParameters best_params;
  int best_epoch = 0;
  double best_val_metric = 0.0;
  bool stopped_early = false;
  std::vector<EpochRecord> history;
};

// Adaptive moment estimation over the trainable parameter groups.
class AdamOptimizer {
 public:
  AdamOptimizer(double learning_rate, double beta1, double beta2, double epsilon, double weight_decay);

  void step(CscaModel& model, const CscaParameters& grads);
  long steps() const { return steps_; }

 private:
  double lr_, beta1_, beta2_, eps_, weight_decay_;
  long steps_ = 0;
  std::optional<CscaParameters> first_moment_;
  std::optional<CscaParameters> second_moment_;
};

// Minibatch training with seeded per-epoch shuffling and early stopping on
// the validation total loss. On return the model holds the best-validation
// parameters.
TrainResult train(CscaModel& model, std::span<const TrainingSample> train_set,
                  std::span<const TrainingSample> val_set, const RunConfig& config);

std::string format_history(std::span<const EpochRecord> history);

// The five ablation rows: (1) fixed-template baseline, (2) LCR,
// (3) LCR+SCT, (4) LCR+CCT, (5) full model. Other fields copy `base`.
std::array<RunConfig, 5> ablation_configs(const RunConfig& base = RunConfig{});
std::string_view ablation_row_name(int row);
// Row index 1..5 matching the flags, or 0 when the triple is not a row.
int ablation_row(const AblationFlags& flags);

}  // namespace csca

#endif  // CSCA_TRAINING_HPP_
