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

#include "csca/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "csca/csv.hpp"
#include "csca/error.hpp"
#include "csca/evaluation.hpp"
#include "csca/log.hpp"

namespace csca {

std::vector<AnalysisPoint> analysis_points(std::span<const DrawingRecord> records) {
  std::vector<AnalysisPoint> points;
  std::size_t dropped = 0;
  for (const auto& r : records) {
    if (!r.style_scalar || !r.rating_norm || !r.content_label) {
      ++dropped;
      continue;
    }
    points.push_back({r.id, *r.style_scalar, *r.rating_norm, r.rating_raw, *r.content_label});
  }
  if (dropped) {
    log::warning(std::to_string(dropped) + " records lack ink, rating or content label and are not analyzed");
  }
  if (points.empty()) return points;
  const auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                            [](const auto& a, const auto& b) { return a.ink < b.ink; });
  const double min = lo->ink;
  const double span = hi->ink - lo->ink;
  for (auto& p : points) p.ink = span > 0.0 ? std::clamp((p.ink - min) / span, 0.0, 1.0) : 0.0;
  if (!(span > 0.0)) log::warning("all analyzed drawings have the same ink intensity");
  return points;
}

double spearman_p_value(double rho, std::size_t n) {
  if (n < 3) throw DegenerateInputError("p-value needs at least 3 samples");
  const double r = std::clamp(rho, -1.0, 1.0);
  if (std::abs(r) == 1.0) return 0.0;
  const double dof = static_cast<double>(n) - 2.0;
  const double t = std::abs(r) * std::sqrt(dof / (1.0 - r * r));
  const boost::math::students_t dist(dof);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
}

namespace {

CorrelationRow correlate(std::string category, const std::vector<double>& ink, const std::vector<double>& rating) {
  CorrelationRow row;
  row.category = std::move(category);
  row.n = ink.size();
  if (row.n < kMinCorrelationSamples) {
    if (row.n > 0) log::warning("category '" + row.category + "' has fewer than 3 drawings; skipped");
    return row;
  }
  try {
    row.srcc = srcc(ink, rating);
    row.p_value = spearman_p_value(*row.srcc, row.n);
  } catch (const DegenerateInputError&) {
    log::warning("category '" + row.category + "' has constant ink or rating; skipped");
  }
  return row;
}

std::string optional_text(const std::optional<double>& v) {
  return v ? csv::format_double(*v) : std::string();
}

}  // namespace

CorrelationTable style_rating_correlation(std::span<const AnalysisPoint> points) {
  CorrelationTable table;
  std::vector<double> all_ink, all_rating;
  for (ContentLabel label : kAllContentLabels) {
    std::vector<double> ink, rating;
    for (const auto& p : points) {
      if (p.label != label) continue;
      ink.push_back(p.ink);
      rating.push_back(p.rating_norm);
    }
    all_ink.insert(all_ink.end(), ink.begin(), ink.end());
    all_rating.insert(all_rating.end(), rating.begin(), rating.end());
    table.categories.push_back(correlate(std::string(to_string(label)), ink, rating));
  }
  table.combined = correlate("combined", all_ink, all_rating);
  return table;
}

CorrelationTable style_rating_correlation(std::span<const DrawingRecord> records) {
  const auto points = analysis_points(records);
  return style_rating_correlation(points);
}

std::string CorrelationTable::format_csv() const {
  std::string out = "category,srcc,p_value,n\n";
  auto emit = [&out](const CorrelationRow& r) {
    out += csv::join({r.category, optional_text(r.srcc), optional_text(r.p_value), std::to_string(r.n)});
    out.push_back('\n');
  };
  for (const auto& r : categories) emit(r);
  emit(combined);
  return out;
}

int ink_bin(double normalized_ink, int n_bins) {
  if (n_bins < 2) throw ConfigError("n_bins must be >= 2");
  const double t = std::clamp(normalized_ink, 0.0, 1.0);
  return std::min(static_cast<int>(std::floor(t * n_bins)), n_bins - 1);
}

std::vector<BinCell> binned_rating_means(std::span<const AnalysisPoint> points, int n_bins) {
  if (n_bins < 2) throw ConfigError("n_bins must be >= 2");
  std::vector<BinCell> cells;
  cells.reserve(static_cast<std::size_t>(n_bins) * kNumContentLabels);
  for (int b = 0; b < n_bins; ++b) {
    for (ContentLabel label : kAllContentLabels) {
      BinCell cell;
      cell.bin = b;
      cell.lower = static_cast<double>(b) / n_bins;
      cell.upper = static_cast<double>(b + 1) / n_bins;
      cell.category = label;
      cells.push_back(cell);
    }
  }
  std::vector<double> sum_norm(cells.size(), 0.0), sum_raw(cells.size(), 0.0);
  for (const auto& p : points) {
    const std::size_t idx = static_cast<std::size_t>(ink_bin(p.ink, n_bins)) * kNumContentLabels + code(p.label);
    ++cells[idx].n;
    sum_norm[idx] += p.rating_norm;
    sum_raw[idx] += p.rating_raw;
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].n == 0) continue;
    cells[i].mean_rating_norm = sum_norm[i] / static_cast<double>(cells[i].n);
    cells[i].mean_rating_raw = sum_raw[i] / static_cast<double>(cells[i].n);
  }
  return cells;
}

std::vector<BinCell> binned_rating_means(std::span<const DrawingRecord> records, int n_bins) {
  const auto points = analysis_points(records);
  return binned_rating_means(points, n_bins);
}

std::string format_bins_csv(std::span<const BinCell> cells) {
  std::string out = "ink_bin,lower,upper,category,mean_rating_norm,mean_rating_raw,n\n";
  for (const auto& c : cells) {
    out += csv::join({std::to_string(c.bin), csv::format_double(c.lower), csv::format_double(c.upper),
                      std::string(to_string(c.category)), optional_text(c.mean_rating_norm),
                      optional_text(c.mean_rating_raw), std::to_string(c.n)});
    out.push_back('\n');
  }
  return out;
}

nlohmann::json plot_spec(std::span<const AnalysisPoint> points, std::span<const BinCell> cells) {
  nlohmann::json scatter = nlohmann::json::array();
  for (ContentLabel label : kAllContentLabels) {
    nlohmann::json x = nlohmann::json::array(), y = nlohmann::json::array();
    for (const auto& p : points) {
      if (p.label != label) continue;
      x.push_back(p.ink);
      y.push_back(p.rating_norm);
    }
    scatter.push_back({{"category", to_string(label)}, {"x", x}, {"y", y}});
  }
  nlohmann::json bars = nlohmann::json::array();
  for (ContentLabel label : kAllContentLabels) {
    nlohmann::json x = nlohmann::json::array(), y = nlohmann::json::array(), n = nlohmann::json::array();
    for (const auto& c : cells) {
      if (c.category != label) continue;
      x.push_back(c.bin);
      y.push_back(c.mean_rating_norm ? nlohmann::json(*c.mean_rating_norm) : nlohmann::json(nullptr));
      n.push_back(c.n);
    }
    bars.push_back({{"category", to_string(label)}, {"x", x}, {"y", y}, {"n", n}});
  }
  return {
      {"ink_vs_rating", {{"x_label", "normalized ink intensity"}, {"y_label", "normalized rating"}, {"series", scatter}}},
      {"binned_means", {{"x_label", "ink intensity bin"}, {"y_label", "mean normalized rating"}, {"series", bars}}},
  };
}

}  // namespace csca
