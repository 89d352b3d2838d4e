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

#ifndef CSCA_EVALUATION_HPP_
#define CSCA_EVALUATION_HPP_

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "csca/core_types.hpp"
#include "csca/model.hpp"
#include "csca/training.hpp"

namespace csca {

inline constexpr std::size_t kMinCorrelationSamples = 3;

// Pearson linear correlation. Requires n >= 3 and non-constant inputs;
// throws DegenerateInputError otherwise.
double plcc(std::span<const double> x, std::span<const double> y);

// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

// Spearman rank correlation: Pearson correlation of average ranks.
double srcc(std::span<const double> x, std::span<const double> y);

enum class Subset { kPrimaryTest, kRg1, kRg2, kFg };

Subset parse_subset(std::string_view text);
std::string_view to_string(Subset subset);
Split split_of(Subset subset);

struct SubsetResult {
  Subset subset = Subset::kPrimaryTest;
  double srcc = 0.0;
  double plcc = 0.0;
  std::size_t n = 0;
};

struct EvalReport {
  std::vector<SubsetResult> entries;
  std::string fingerprint;
  std::string timestamp;  // ISO-8601 UTC
  std::string ablation;

  std::string format_table() const;
  nlohmann::json to_json() const;
};

// Scores every sample with the model and correlates with the targets.
// Throws DegenerateInputError for fewer than kMinCorrelationSamples samples.
SubsetResult evaluate_samples(std::span<const TrainingSample> samples, const CscaModel& model,
                              Subset subset);

// Records of the subset's split, preprocessed with the training-split
// channel statistics stored in the checkpoint.
SubsetResult evaluate(const Checkpoint& checkpoint, std::span<const DrawingRecord> records,
                      std::shared_ptr<const EncoderBundle> bundle, Subset subset);

std::string utc_timestamp();

}  // namespace csca

#endif  // CSCA_EVALUATION_HPP_
