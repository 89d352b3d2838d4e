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

#include "csca/analysis.hpp"
#include "csca/error.hpp"
#include "csca/evaluation.hpp"
#include "test_util.hpp"

namespace csca {
namespace {

std::vector<DrawingRecord> monotone_records(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<DrawingRecord> out;
  for (int i = 0; i < n; ++i) {
    DrawingRecord r;
    r.id = "r" + std::to_string(i);
    r.style_scalar = 0.1 + 0.5 * u(rng);
    r.rating_norm = (*r.style_scalar - 0.1) / 0.5;
    r.rating_raw = 1.0 + 4.0 * *r.rating_norm;
    r.content_label = kAllContentLabels[static_cast<std::size_t>(i % 5)];
    out.push_back(r);
  }
  return out;
}

TEST(Analysis, IdentityRatingsGiveUnitSrccEverywhere) {
  std::mt19937_64 rng(1);
  const auto records = monotone_records(100, rng);
  const CorrelationTable t = style_rating_correlation(std::span<const DrawingRecord>(records));
  ASSERT_EQ(t.categories.size(), 5u);
  std::size_t total = 0;
  for (const auto& row : t.categories) {
    ASSERT_TRUE(row.srcc.has_value()) << row.category;
    EXPECT_NEAR(*row.srcc, 1.0, 1e-12);
    total += row.n;
  }
  EXPECT_EQ(total, t.combined.n);
  EXPECT_NEAR(*t.combined.srcc, 1.0, 1e-12);
}

TEST(Analysis, CategoriesPartitionCombinedAndDropIncomplete) {
  std::mt19937_64 rng(2);
  auto records = monotone_records(53, rng);
  records[0].content_label.reset();
  records[1].style_scalar.reset();
  const auto points = analysis_points(records);
  EXPECT_EQ(points.size(), 51u);
  const auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                            [](const auto& a, const auto& b) { return a.ink < b.ink; });
  EXPECT_EQ(lo->ink, 0.0);
  EXPECT_EQ(hi->ink, 1.0);
  const CorrelationTable t = style_rating_correlation(std::span<const AnalysisPoint>(points));
  std::size_t sum = 0;
  for (const auto& row : t.categories) sum += row.n;
  EXPECT_EQ(sum, t.combined.n);
  EXPECT_EQ(t.combined.n, 51u);
}

TEST(Analysis, SmallCategoriesAreSkipped) {
  std::mt19937_64 rng(3);
  auto records = monotone_records(20, rng);
  for (auto& r : records) r.content_label = ContentLabel::kAnimal;
  records[0].content_label = ContentLabel::kHuman;
  records[1].content_label = ContentLabel::kHuman;
  const CorrelationTable t = style_rating_correlation(std::span<const DrawingRecord>(records));
  EXPECT_FALSE(t.categories[code(ContentLabel::kHuman)].srcc.has_value());
  EXPECT_EQ(t.categories[code(ContentLabel::kHuman)].n, 2u);
  EXPECT_EQ(t.categories[code(ContentLabel::kPlant)].n, 0u);
  EXPECT_TRUE(t.categories[code(ContentLabel::kAnimal)].srcc.has_value());
  const std::string csv = t.format_csv();
  EXPECT_NE(csv.find("human,,,2"), std::string::npos) << csv;
}

TEST(Analysis, PermutedRatingsStayWithinNull) {
  std::mt19937_64 rng(4);
  const int n = 500;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> ink(n), rating(n);
  for (int i = 0; i < n; ++i) {
    ink[i] = u(rng);
    rating[i] = ink[i];
  }
  std::shuffle(rating.begin(), rating.end(), rng);
  const double observed = std::abs(srcc(ink, rating));
  std::vector<double> null;
  for (int k = 0; k < 400; ++k) {
    std::vector<double> p = rating;
    std::shuffle(p.begin(), p.end(), rng);
    null.push_back(std::abs(srcc(ink, p)));
  }
  std::sort(null.begin(), null.end());
  const double q95 = null[static_cast<std::size_t>(0.95 * null.size())];
  EXPECT_LT(q95, 0.2);
  EXPECT_LT(observed, q95);
}

TEST(Analysis, SpearmanPValueMatchesStudentT) {
  EXPECT_NEAR(spearman_p_value(0.6, 10), 0.066688, 1e-6);
  EXPECT_NEAR(spearman_p_value(0.3, 50), 0.03428618003292995, 1e-9);
  EXPECT_NEAR(spearman_p_value(-0.3, 50), 0.03428618003292995, 1e-9);
  EXPECT_EQ(spearman_p_value(0.0, 30), 1.0);
  EXPECT_EQ(spearman_p_value(1.0, 30), 0.0);
  EXPECT_THROW(spearman_p_value(0.5, 2), DegenerateInputError);
}

TEST(Bins, BoundariesCoverUnitInterval) {
  EXPECT_EQ(ink_bin(0.0, 5), 0);
  EXPECT_EQ(ink_bin(0.2, 5), 1);
  EXPECT_EQ(ink_bin(0.1999, 5), 0);
  EXPECT_EQ(ink_bin(1.0, 5), 4);
  EXPECT_THROW(ink_bin(0.5, 1), ConfigError);
  std::mt19937_64 rng(5);
  auto records = monotone_records(300, rng);
  const auto cells = binned_rating_means(std::span<const DrawingRecord>(records), 5);
  ASSERT_EQ(cells.size(), 25u);
  std::size_t total = 0;
  for (const auto& c : cells) total += c.n;
  EXPECT_EQ(total, 300u);
  EXPECT_EQ(cells.front().lower, 0.0);
  EXPECT_EQ(cells.back().upper, 1.0);
}

TEST(Bins, MonotoneDataGivesIncreasingMeans) {
  std::mt19937_64 rng(6);
  auto records = monotone_records(500, rng);
  const auto cells = binned_rating_means(std::span<const DrawingRecord>(records), 5);
  for (ContentLabel label : kAllContentLabels) {
    double prev = -1.0;
    for (const auto& c : cells) {
      if (c.category != label) continue;
      ASSERT_TRUE(c.mean_rating_norm.has_value());
      EXPECT_GT(*c.mean_rating_norm, prev);
      prev = *c.mean_rating_norm;
    }
  }
}

TEST(Bins, SingleBinWhenInkIsConstant) {
  std::vector<AnalysisPoint> points;
  for (int i = 0; i < 6; ++i) points.push_back({"p", 0.0, 0.1 * i, 1.0, ContentLabel::kObject});
  const auto cells = binned_rating_means(points, 4);
  std::size_t populated = 0;
  for (const auto& c : cells) {
    if (c.n) {
      ++populated;
      EXPECT_EQ(c.bin, 0);
    } else {
      EXPECT_FALSE(c.mean_rating_norm.has_value());
    }
  }
  EXPECT_EQ(populated, 1u);
  const std::string csv = format_bins_csv(cells);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "ink_bin,lower,upper,category,mean_rating_norm,mean_rating_raw,n");
}

TEST(PlotSpec, HasSeriesPerCategory) {
  std::mt19937_64 rng(7);
  auto records = monotone_records(25, rng);
  const auto points = analysis_points(records);
  const auto cells = binned_rating_means(std::span<const AnalysisPoint>(points), 5);
  const auto spec = plot_spec(points, cells);
  EXPECT_EQ(spec.at("ink_vs_rating").at("series").size(), 5u);
  EXPECT_EQ(spec.at("binned_means").at("series")[0].at("x").size(), 5u);
  EXPECT_EQ(spec.at("ink_vs_rating").at("series")[0].at("x").size(), 5u);
}

}  // namespace
}  // namespace csca
