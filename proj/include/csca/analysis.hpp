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

#ifndef CSCA_ANALYSIS_HPP_
#define CSCA_ANALYSIS_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "csca/core_types.hpp"

namespace csca {

// One analyzed drawing: normalized ink, normalized and raw rating, label.
struct AnalysisPoint {
  std::string id;
  double ink = 0.0;  // min-max normalized over the analyzed set
  double rating_norm = 0.0;
  double rating_raw = 0.0;
  ContentLabel label = ContentLabel::kOther;
};

// Keeps records carrying style_scalar, rating_norm and content_label (others
// are dropped with a warning) and min-max normalizes the ink values over the
// kept set.
std::vector<AnalysisPoint> analysis_points(std::span<const DrawingRecord> records);

struct CorrelationRow {
  std::string category;  // a content label name, or "combined"
  std::size_t n = 0;
  // Unset when n < 3 or either column is constant.
  std::optional<double> srcc;
  std::optional<double> p_value;
};

struct CorrelationTable {
  std::vector<CorrelationRow> categories;  // one per content label, code order
  CorrelationRow combined;

  std::string format_csv() const;
};

// Two-sided p-value of a Spearman coefficient via the t approximation with
// n - 2 degrees of freedom.
double spearman_p_value(double rho, std::size_t n);

CorrelationTable style_rating_correlation(std::span<const AnalysisPoint> points);
CorrelationTable style_rating_correlation(std::span<const DrawingRecord> records);

struct BinCell {
  int bin = 0;
  double lower = 0.0;
  double upper = 0.0;
  ContentLabel category = ContentLabel::kOther;
  std::size_t n = 0;
  std::optional<double> mean_rating_norm;
  std::optional<double> mean_rating_raw;
};

// Equal-width bins over [0,1]; bin k covers [k/n, (k+1)/n) and the last bin
// is closed on the right.
int ink_bin(double normalized_ink, int n_bins);

// Every (bin, category) cell, bins outer, categories in code order; empty
// cells have n = 0.
std::vector<BinCell> binned_rating_means(std::span<const AnalysisPoint> points, int n_bins = 5);
std::vector<BinCell> binned_rating_means(std::span<const DrawingRecord> records, int n_bins = 5);
std::string format_bins_csv(std::span<const BinCell> cells);

// Plot-ready series: per-category scatter of (ink, rating) and the binned
// means.
nlohmann::json plot_spec(std::span<const AnalysisPoint> points, std::span<const BinCell> cells);

}  // namespace csca

#endif  // CSCA_ANALYSIS_HPP_
