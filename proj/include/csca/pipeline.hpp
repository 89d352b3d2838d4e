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

#ifndef CSCA_PIPELINE_HPP_
#define CSCA_PIPELINE_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csca/backbone.hpp"
#include "csca/core_types.hpp"
#include "csca/evaluation.hpp"
#include "csca/imaging.hpp"
#include "csca/model.hpp"
#include "csca/training.hpp"

namespace csca {

// Directory from CSCA_CACHE_DIR, or empty when unset.
std::string cache_dir_from_env();

struct IngestResult {
  std::vector<DrawingRecord> records;
  std::vector<std::string> unannotated_ids;
  std::vector<std::string> unknown_annotation_ids;
  bool annotated = false;
};

// load_dataset -> merge_annotations (when a file is given and exists) ->
// normalize_ratings over the training split -> ink intensity per record.
// Image paths become absolute. Ink values are read from and written to
// `<cache_dir>/style_cache.csv` when cache_dir is non-empty.
IngestResult ingest(const std::string& manifest_path, const std::string& annotations_path,
                    const std::string& cache_dir);

// Builds the encoder bundle named by the config.
std::shared_ptr<const EncoderBundle> make_bundle(const RunConfig& config);

// Channel statistics over the training-split images.
ChannelStats training_channel_stats(std::span<const DrawingRecord> records);

// encode_samples with an optional on-disk embedding cache keyed by encoder
// checksum and channel statistics.
std::vector<TrainingSample> encode_samples_cached(std::span<const DrawingRecord> records,
                                                  const ChannelStats& stats, const EncoderBundle& bundle,
                                                  const std::string& cache_dir);

// "(5) LCR+SCT+CCT" for a named ablation row, "custom" otherwise.
std::string ablation_label(const AblationFlags& flags);

struct TrainedRun {
  Checkpoint checkpoint;
  TrainResult result;
};

// Channel statistics and encoding over the train/val splits of `records`,
// then training; the checkpoint holds the best-validation parameters.
TrainedRun train_on_records(std::span<const DrawingRecord> records, const RunConfig& config,
                            std::shared_ptr<const EncoderBundle> bundle, const std::string& cache_dir);

// Evaluates each subset. Empty subsets throw when `skip_empty` is false and
// are left out of the report otherwise.
EvalReport evaluate_subsets(const Checkpoint& checkpoint, std::span<const DrawingRecord> records,
                            std::shared_ptr<const EncoderBundle> bundle, std::span<const Subset> subsets,
                            bool skip_empty, const std::string& cache_dir);

struct SyntheticSpec {
  int n_train = 64;
  int n_val = 16;
  int n_test = 16;
  int image_size = 64;
  std::uint64_t seed = 1;
};

struct SyntheticPaths {
  std::string manifest;
  std::string annotations;
};

// Drawings of randomly scattered black pixels on white whose raw rating is
// the exact inked fraction. The training split spans fractions 0..1, so the
// normalized rating equals the ink fraction.
SyntheticPaths write_synthetic_dataset(const std::string& directory, const SyntheticSpec& spec);

// Exclusive advisory lock on a directory via an O_EXCL lock file.
class DirectoryLock {
 public:
  explicit DirectoryLock(const std::string& directory);
  ~DirectoryLock();
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  std::string path_;
};

}  // namespace csca

#endif  // CSCA_PIPELINE_HPP_
