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

#include <gtest/gtest.h>

#include <cmath>

#include "csca/error.hpp"
#include "csca/log.hpp"
#include "csca/training.hpp"
#include "test_util.hpp"

namespace csca {
namespace {

ModelOptions options_for(AblationFlags flags, double tau) {
  ModelOptions o;
  o.temperature = tau;
  o.ablation = flags;
  o.hidden_dim = 6;
  return o;
}

TEST(Losses, RegressionOracle) {
  const std::vector<double> pred = {0.2, 0.5, 1.0};
  const std::vector<double> target = {0.0, 0.5, 0.4};
  EXPECT_NEAR(regression_loss(pred, target), (0.04 + 0.0 + 0.36) / 3.0, 1e-15);
  EXPECT_THROW(regression_loss(pred, std::vector<double>{1.0}), DimensionError);
  EXPECT_THROW(regression_loss(std::vector<double>{}, std::vector<double>{}), DegenerateInputError);
}

TEST(Losses, ClassificationOracleWithFloor) {
  const std::vector<ContentArray> probs = {{0.5, 0.25, 0.25, 0.0, 0.0}, {0.1, 0.1, 0.1, 0.0, 0.7}};
  const std::vector<ContentLabel> labels = {ContentLabel::kPlant, ContentLabel::kOther};
  EXPECT_NEAR(classification_loss(probs, labels), -(std::log(0.25) + std::log(0.7)) / 2.0, 1e-15);
  const std::vector<ContentLabel> zero = {ContentLabel::kHuman, ContentLabel::kOther};
  EXPECT_NEAR(classification_loss(probs, zero), -(std::log(1e-12) + std::log(0.7)) / 2.0, 1e-12);
}

TEST(Losses, CombineUsesLambda) {
  const LossBreakdown b = combine_losses(0.5, 2.0, 1e-3);
  EXPECT_DOUBLE_EQ(b.total, 0.502);
}

TEST(TotalLoss, ExcludesUnlabeledFromClassification) {
  const auto bundle = testing::small_bundle();
  const CscaModel model(bundle, options_for({true, true, true}, 0.01), 1);
  std::mt19937_64 rng(1);
  auto batch = testing::random_samples(rng, 6, 16);
  const LossBreakdown all = total_loss(batch, model, 1e-3);
  EXPECT_EQ(all.n_cls, 6u);
  batch[0].label.reset();
  batch[3].label.reset();
  const LossBreakdown some = total_loss(batch, model, 1e-3);
  EXPECT_EQ(some.n_reg, 6u);
  EXPECT_EQ(some.n_cls, 4u);
  EXPECT_EQ(some.l_reg, all.l_reg);
  for (auto& s : batch) s.label.reset();
  const LossBreakdown none = total_loss(batch, model, 1e-3);
  EXPECT_EQ(none.l_cls, 0.0);
  EXPECT_EQ(none.total, none.l_reg);
  EXPECT_EQ(total_loss(batch, model, 1e-3, false).n_cls, 0u);
}

TEST(Gradients, MatchFiniteDifferences) {
  const auto bundle = testing::small_bundle();
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 2; ++trial) {
    const double tau = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    CscaModel model(bundle, options_for({true, true, true}, tau), 100 + trial);
    testing::randomize(model.mutable_parameters(), rng, 0.4);
    const auto batch = testing::random_samples(rng, 5, 16);
    const auto check = testing::check_gradients(model, batch, 1e-3);
    EXPECT_LT(check.max_relative_error, 1e-4) << check.worst_tensor << " tau=" << tau;
    EXPECT_GT(check.checked, 500u);
  }
}

TEST(Gradients, ClassificationTermContributesNothing) {
  const auto bundle = testing::small_bundle();
  std::mt19937_64 rng(3);
  CscaModel model(bundle, options_for({true, true, true}, 0.1), 1);
  testing::randomize(model.mutable_parameters(), rng, 0.3);
  const auto batch = testing::random_samples(rng, 4, 16);
  CscaParameters with = zeros_like(model.parameters());
  CscaParameters without = zeros_like(model.parameters());
  loss_and_gradients(batch, model, 0.9, true, with);
  loss_and_gradients(batch, model, 0.9, false, without);
  const auto a = tensor_views(std::as_const(with));
  const auto b = tensor_views(std::as_const(without));
  for (std::size_t t = 0; t < a.size(); ++t) {
    for (std::size_t i = 0; i < a[t].size; ++i) EXPECT_EQ(a[t].data[i], b[t].data[i]);
  }
}

TEST(Adam, FirstStepMovesTrainableParamsByLearningRate) {
  const auto bundle = testing::small_bundle();
  CscaModel model(bundle, options_for({true, false, true}, 0.01), 1);
  std::mt19937_64 rng(5);
  const CscaParameters before = model.parameters();
  CscaParameters grads = zeros_like(before);
  testing::randomize(grads, rng, 1.0);
  AdamOptimizer adam(1e-3, 0.9, 0.999, 1e-8, 0.0);
  adam.step(model, grads);
  const auto p0 = tensor_views(before);
  const auto p1 = tensor_views(std::as_const(model.parameters()));
  const auto g = tensor_views(std::as_const(grads));
  for (std::size_t t = 0; t < p0.size(); ++t) {
    const bool trainable = model.trainable(p0[t].group);
    for (std::size_t i = 0; i < p0[t].size; ++i) {
      const double delta = p1[t].data[i] - p0[t].data[i];
      if (!trainable) {
        EXPECT_EQ(delta, 0.0) << p0[t].name;
      } else if (std::abs(g[t].data[i]) > 1e-3) {
        EXPECT_NEAR(delta, -1e-3 * (g[t].data[i] > 0 ? 1.0 : -1.0), 1e-8) << p0[t].name;
      }
    }
  }
  EXPECT_EQ(adam.steps(), 1);
}

RunConfig quick_config() {
  RunConfig c;
  c.toy_embed_dim = 16;
  c.backbone_seed = 3;
  c.tuner_hidden_dim = 6;
  c.learning_rate = 1e-3;
  c.batch_size = 4;
  c.max_epochs = 30;
  return c;
}

TEST(Train, PatienceZeroStopsAfterFirstNonImprovement) {
  const auto bundle = testing::small_bundle();
  RunConfig config = quick_config();
  config.ablation = {false, false, false};
  config.early_stop_patience = 0;
  CscaModel model(bundle, ModelOptions::from_config(config), 1);
  std::mt19937_64 rng(6);
  const auto train_set = testing::random_samples(rng, 12, 16);
  const auto val_set = testing::random_samples(rng, 4, 16);
  const TrainResult result = train(model, train_set, val_set, config);
  EXPECT_TRUE(result.stopped_early);
  EXPECT_EQ(result.history.size(), 2u);
  EXPECT_EQ(result.best_epoch, 1);
}

TEST(Train, KeepsEncodersFrozenAndIsDeterministic) {
  const auto bundle = testing::small_bundle();
  const std::uint64_t checksum = bundle->parameter_checksum();
  const RunConfig config = quick_config();
  std::mt19937_64 rng(7);
  const auto train_set = testing::random_samples(rng, 16, 16);
  const auto val_set = testing::random_samples(rng, 4, 16);
  CscaModel a(bundle, ModelOptions::from_config(config), 1);
  CscaModel b(bundle, ModelOptions::from_config(config), 1);
  const TrainResult ra = train(a, train_set, val_set, config);
  const TrainResult rb = train(b, train_set, val_set, config);
  EXPECT_EQ(bundle->parameter_checksum(), checksum);
  EXPECT_EQ(ra.best_epoch, rb.best_epoch);
  EXPECT_TRUE(a.parameters().style.w2 == b.parameters().style.w2);
  EXPECT_TRUE(a.parameters().rating_tokens[2] == b.parameters().rating_tokens[2]);
  // The returned model holds the best-validation parameters.
  EXPECT_NEAR(total_loss(val_set, a, config.lambda_cls).total, ra.best_val_metric, 1e-12);
}

TEST(Train, ReducesTrainingLoss) {
  const auto bundle = testing::small_bundle();
  RunConfig config = quick_config();
  config.max_epochs = 40;
  config.early_stop_patience = 40;
  std::mt19937_64 rng(8);
  auto train_set = testing::random_samples(rng, 24, 16);
  for (auto& s : train_set) s.target = s.ink;
  CscaModel model(bundle, ModelOptions::from_config(config), 1);
  const double before = total_loss(train_set, model, config.lambda_cls).l_reg;
  train(model, train_set, train_set, config);
  const double after = total_loss(train_set, model, config.lambda_cls).l_reg;
  EXPECT_LT(after, 0.75 * before) << "before " << before << " after " << after;
}

TEST(Train, WarnsWhenNoLabelsAndRejectsEmptySplits) {
  std::vector<std::string> warnings;
  log::set_sink([&](log::Level level, std::string_view msg) {
    if (level == log::Level::kWarning) warnings.emplace_back(msg);
  });
  const auto bundle = testing::small_bundle();
  RunConfig config = quick_config();
  config.max_epochs = 1;
  std::mt19937_64 rng(9);
  auto train_set = testing::random_samples(rng, 8, 16);
  for (auto& s : train_set) s.label.reset();
  CscaModel model(bundle, ModelOptions::from_config(config), 1);
  train(model, train_set, train_set, config);
  log::reset_sink();
  ASSERT_FALSE(warnings.empty());
  EXPECT_NE(warnings[0].find("classification"), std::string::npos);
  EXPECT_THROW(train(model, {}, train_set, config), DegenerateInputError);
  EXPECT_THROW(train(model, train_set, {}, config), DegenerateInputError);
}

TEST(Ablation, RowsAndNames) {
  const auto rows = ablation_configs();
  EXPECT_EQ(rows[0].ablation, (AblationFlags{false, false, false}));
  EXPECT_EQ(rows[1].ablation, (AblationFlags{true, false, false}));
  EXPECT_EQ(rows[2].ablation, (AblationFlags{true, true, false}));
  EXPECT_EQ(rows[3].ablation, (AblationFlags{true, false, true}));
  EXPECT_EQ(rows[4].ablation, (AblationFlags{true, true, true}));
  for (int r = 1; r <= 5; ++r) EXPECT_EQ(ablation_row(rows[r - 1].ablation), r);
  EXPECT_EQ(ablation_row({false, true, true}), 0);
  EXPECT_THROW(ablation_row_name(6), ConfigError);
}

TEST(History, FormatsOneRowPerEpoch) {
  const std::vector<EpochRecord> h = {{1, 0.5, 1.5, 0.5015, 0.6}, {2, 0.25, 1.5, 0.2515, 0.55}};
  EXPECT_EQ(format_history(h), "epoch,l_reg,l_cls,total,val_total\n1,0.5,1.5,0.5015,0.6\n2,0.25,1.5,0.2515,0.55\n");
}

}  // namespace
}  // namespace csca
