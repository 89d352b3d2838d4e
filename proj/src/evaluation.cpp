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

#include "csca/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <numeric>

#include "csca/dataset.hpp"
#include "csca/error.hpp"

namespace csca {

double plcc(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("plcc: length mismatch");
  if (x.size() < kMinCorrelationSamples) throw DegenerateInputError("plcc: need at least 3 samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw DegenerateInputError("plcc: correlation undefined for constant input");
  return std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 hold ranks i+1..j.
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double srcc(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("srcc: length mismatch");
  if (x.size() < kMinCorrelationSamples) throw DegenerateInputError("srcc: need at least 3 samples");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  try {
    return plcc(rx, ry);
  } catch (const DegenerateInputError&) {
    throw DegenerateInputError("srcc: correlation undefined for constant input");
  }
}

namespace {

constexpr std::array<std::string_view, 4> kSubsetNames = {"primary_test", "rg1", "rg2", "fg"};

}  // namespace

Subset parse_subset(std::string_view text) {
  for (std::size_t i = 0; i < kSubsetNames.size(); ++i) {
    if (kSubsetNames[i] == text) return static_cast<Subset>(i);
  }
  if (text == "test" || text == "primary") return Subset::kPrimaryTest;
  throw ParseError("unknown subset '" + std::string(text) + "' (expected primary_test, rg1, rg2, fg)");
}

std::string_view to_string(Subset subset) { return kSubsetNames.at(static_cast<int>(subset)); }

Split split_of(Subset subset) {
  switch (subset) {
    case Subset::kPrimaryTest:
      return Split::kTest;
    case Subset::kRg1:
      return Split::kRg1;
    case Subset::kRg2:
      return Split::kRg2;
    case Subset::kFg:
      return Split::kFg;
  }
  return Split::kTest;
}

SubsetResult evaluate_samples(std::span<const TrainingSample> samples, const CscaModel& model, Subset subset) {
  if (samples.size() < kMinCorrelationSamples) {
    throw DegenerateInputError("subset '" + std::string(to_string(subset)) + "' has fewer than 3 records");
  }
  const Matrix rating = model.rating_embeddings();
  std::vector<double> predicted, target;
  predicted.reserve(samples.size());
  target.reserve(samples.size());
  for (const auto& s : samples) {
    predicted.push_back(model.forward(s.features, s.ink, rating).distribution.score);
    target.push_back(s.target);
  }
  SubsetResult r;
  r.subset = subset;
  r.n = samples.size();
  r.srcc = srcc(predicted, target);
  r.plcc = plcc(predicted, target);
  return r;
}

SubsetResult evaluate(const Checkpoint& checkpoint, std::span<const DrawingRecord> records,
                      std::shared_ptr<const EncoderBundle> bundle, Subset subset) {
  const CscaModel model = restore_model(checkpoint, bundle);
  const auto selected = filter_split(records, split_of(subset));
  if (selected.empty()) {
    throw DegenerateInputError("subset '" + std::string(to_string(subset)) + "' is empty");
  }
  const auto samples = encode_samples(selected, checkpoint.stats, *bundle);
  return evaluate_samples(samples, model, subset);
}

std::string EvalReport::format_table() const {
  std::string out = "# fingerprint=" + fingerprint + " ablation=" + ablation + " timestamp=" + timestamp + "\n";
  char line[128];
  std::snprintf(line, sizeof(line), "%-14s %8s %8s %8s\n", "subset", "SRCC", "PLCC", "n");
  out += line;
  for (const auto& e : entries) {
    std::snprintf(line, sizeof(line), "%-14s %8.4f %8.4f %8zu\n", std::string(to_string(e.subset)).c_str(), e.srcc,
                  e.plcc, e.n);
    out += line;
  }
  return out;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["fingerprint"] = fingerprint;
  j["timestamp"] = timestamp;
  j["ablation"] = ablation;
  j["subsets"] = nlohmann::json::array();
  for (const auto& e : entries) {
    j["subsets"].push_back({{"subset", to_string(e.subset)}, {"srcc", e.srcc}, {"plcc", e.plcc}, {"n", e.n}});
  }
  return j;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace csca
