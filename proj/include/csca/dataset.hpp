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

#ifndef CSCA_DATASET_HPP_
#define CSCA_DATASET_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "csca/core_types.hpp"

namespace csca {

// Manifest schema: header `id,image_path,rating_raw,split`. Records come back
// sorted by id with rating_norm unset. Relative image paths are kept as
// written; use resolve_image_path to anchor them.
std::vector<DrawingRecord> load_dataset(const std::string& manifest_path);
void save_dataset(const std::string& manifest_path, std::span<const DrawingRecord> records);
std::string format_manifest(std::span<const DrawingRecord> records);
std::vector<DrawingRecord> parse_manifest(std::string_view text);

// Relative paths are taken relative to the directory holding `anchor_file`.
std::string resolve_image_path(const std::string& image_path, const std::string& anchor_file);

struct MergeResult {
  std::vector<DrawingRecord> records;
  std::vector<std::string> unannotated_ids;  // records that received no label
  std::vector<std::string> unknown_ids;      // annotation rows with no matching record
};

// Annotation schema: header `id,content_label`.
MergeResult merge_annotations(std::span<const DrawingRecord> records,
                              const std::string& annotations_path);
MergeResult merge_annotations(std::span<const DrawingRecord> records,
                              const std::map<std::string, ContentLabel>& labels);
std::map<std::string, ContentLabel> load_annotations(const std::string& annotations_path);

struct RatingRange {
  double min = 0.0;
  double max = 1.0;
};

// Min/max of rating_raw over records of `stats_source`. Throws
// DegenerateInputError when the split is empty or all ratings are equal.
RatingRange rating_range(std::span<const DrawingRecord> records, Split stats_source);

// rating_norm = clamp((raw - min) / (max - min), 0, 1) with min/max taken
// from `stats_source` only.
std::vector<DrawingRecord> normalize_ratings(std::span<const DrawingRecord> records,
                                             Split stats_source = Split::kTrain);
std::vector<DrawingRecord> normalize_ratings(std::span<const DrawingRecord> records,
                                             const RatingRange& range);

// Reassigns the records currently in primary splits (train/val/test) to
// train/val/test in 70/10/20 proportions with a seeded shuffle. Generalization
// subsets are untouched.
std::vector<DrawingRecord> assign_primary_splits(std::span<const DrawingRecord> records,
                                                 std::uint64_t seed);

std::vector<DrawingRecord> filter_split(std::span<const DrawingRecord> records, Split split);

// Consolidated record store written by `csca ingest`: every field of
// DrawingRecord plus a fingerprint comment line.
void save_store(const std::string& path, std::span<const DrawingRecord> records,
                const std::string& fingerprint);
std::string format_store(std::span<const DrawingRecord> records, const std::string& fingerprint);
std::vector<DrawingRecord> load_store(const std::string& path, std::string* fingerprint = nullptr);

// `id,style_scalar` cache of ink intensities.
std::map<std::string, double> load_style_cache(const std::string& path);
void save_style_cache(const std::string& path, const std::map<std::string, double>& values);

}  // namespace csca

#endif  // CSCA_DATASET_HPP_
