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

#include <algorithm>
#include <cmath>

#include "csca/error.hpp"
#include "csca/evaluation.hpp"
#include "test_util.hpp"

namespace csca {
namespace {

TEST(Ranks, AverageTies) {
  const std::vector<double> x = {1, 2, 2, 3};
  EXPECT_EQ(average_ranks(x), (std::vector<double>{1, 2.5, 2.5, 4}));
  const std::vector<double> y = {5, 5, 5};
  EXPECT_EQ(average_ranks(y), (std::vector<double>{2, 2, 2}));
  const std::vector<double> z = {3, 1, 2};
  EXPECT_EQ(average_ranks(z), (std::vector<double>{3, 1, 2}));
}

TEST(Srcc, HandComputedWithTies) {
  const std::vector<double> x = {1, 2, 2, 3};
  const std::vector<double> y = {1, 3, 2, 4};
  EXPECT_NEAR(srcc(x, y), 4.5 / std::sqrt(22.5), 1e-15);
}

TEST(Plcc, PerfectAndAnti) {
  const std::vector<double> x = {1, 2, 3, 4};
  const std::vector<double> up = {3, 5, 7, 9};
  const std::vector<double> down = {-1, -2, -3, -4};
  EXPECT_NEAR(plcc(x, up), 1.0, 1e-15);
  EXPECT_NEAR(plcc(x, down), -1.0, 1e-15);
  EXPECT_LE(plcc(x, up), 1.0);
}

TEST(Correlation, DegenerateInputs) {
  const std::vector<double> two = {1, 2};
  EXPECT_THROW(plcc(two, two), DegenerateInputError);
  EXPECT_THROW(srcc(two, two), DegenerateInputError);
  const std::vector<double> flat = {1, 1, 1};
  const std::vector<double> ok = {1, 2, 3};
  EXPECT_THROW(plcc(flat, ok), DegenerateInputError);
  EXPECT_THROW(srcc(ok, flat), DegenerateInputError);
  const std::vector<double> four = {1, 2, 3, 4};
  EXPECT_THROW(srcc(ok, four), DimensionError);
}

TEST(Srcc, MonotoneInvariance) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<double> x(40), y(40);
  for (int i = 0; i < 40; ++i) {
    x[i] = g(rng);
    y[i] = x[i] + g(rng);
  }
  std::vector<double> tx(40);
  std::transform(x.begin(), x.end(), tx.begin(), [](double v) { return std::exp(3 * v) + 2; });
  EXPECT_NEAR(srcc(x, y), srcc(tx, y), 1e-12);
  std::vector<double> ax(40);
  std::transform(x.begin(), x.end(), ax.begin(), [](double v) { return 2.5 * v - 7; });
  EXPECT_NEAR(plcc(x, y), plcc(ax, y), 1e-12);
}

TEST(Subsets, ParseAndMap) {
  EXPECT_EQ(parse_subset("primary_test"), Subset::kPrimaryTest);
  EXPECT_EQ(parse_subset("fg"), Subset::kFg);
  EXPECT_EQ(split_of(Subset::kRg2), Split::kRg2);
  EXPECT_EQ(split_of(Subset::kPrimaryTest), Split::kTest);
  EXPECT_THROW(parse_subset("train"), ParseError);
}

TEST(Evaluate, PerfectScoresGiveUnitCorrelation) {
  const auto bundle = testing::small_bundle();
  ModelOptions o;
  o.hidden_dim = 4;
  const CscaModel model(bundle, o, 1);
  std::mt19937_64 rng(3);
  auto samples = testing::random_samples(rng, 10, 16);
  for (auto& s : samples) s.target = model.score(s.features, s.ink).score;
  const SubsetResult r = evaluate_samples(samples, model, Subset::kRg1);
  EXPECT_NEAR(r.srcc, 1.0, 1e-12);
  EXPECT_NEAR(r.plcc, 1.0, 1e-12);
  EXPECT_EQ(r.n, 10u);
  samples.resize(2);
  EXPECT_THROW(evaluate_samples(samples, model, Subset::kRg1), DegenerateInputError);
}

TEST(EvalReport, EmbedsFingerprint) {
  EvalReport report;
  report.fingerprint = "0123456789abcdef";
  report.timestamp = "2026-01-01T00:00:00Z";
  report.ablation = "(5)";
  report.entries.push_back({Subset::kFg, 0.5, 0.25, 12});
  EXPECT_NE(report.format_table().find("0123456789abcdef"), std::string::npos);
  const auto j = report.to_json();
  EXPECT_EQ(j.at("fingerprint"), "0123456789abcdef");
  EXPECT_EQ(j.at("subsets")[0].at("subset"), "fg");
  EXPECT_EQ(j.at("subsets")[0].at("n"), 12);
  EXPECT_EQ(utc_timestamp().size(), 20u);
}

}  // namespace
}  // namespace csca
