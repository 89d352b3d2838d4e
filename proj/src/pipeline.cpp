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

#include "csca/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <map>
#include <numeric>
#include <random>

#include "csca/csv.hpp"
#include "csca/dataset.hpp"
#include "csca/error.hpp"
#include "csca/log.hpp"
#include "csca/tensor_io.hpp"

namespace csca {

namespace fs = std::filesystem;

std::string cache_dir_from_env() {
  const char* dir = std::getenv("CSCA_CACHE_DIR");
  return dir ? std::string(dir) : std::string();
}

IngestResult ingest(const std::string& manifest_path, const std::string& annotations_path,
                    const std::string& cache_dir) {
  IngestResult result;
  auto records = load_dataset(manifest_path);
  for (auto& r : records) {
    r.image_path = fs::absolute(resolve_image_path(r.image_path, manifest_path)).lexically_normal().string();
  }
  if (!annotations_path.empty() && fs::exists(annotations_path)) {
    MergeResult merged = merge_annotations(records, annotations_path);
    records = std::move(merged.records);
    result.unannotated_ids = std::move(merged.unannotated_ids);
    result.unknown_annotation_ids = std::move(merged.unknown_ids);
    result.annotated = true;
    if (!result.unannotated_ids.empty()) {
      log::warning(std::to_string(result.unannotated_ids.size()) + " records have no content annotation");
    }
    for (const auto& id : result.unknown_annotation_ids) {
      log::warning("annotation for unknown id '" + id + "' ignored");
    }
  } else {
    log::warning(annotations_path.empty() ? "no annotation file given; classification disabled downstream"
                                          : "annotation file '" + annotations_path +
                                                "' not found; classification disabled downstream");
  }
  records = normalize_ratings(records, Split::kTrain);

  const std::string cache_file = cache_dir.empty() ? std::string() : (fs::path(cache_dir) / "style_cache.csv").string();
  std::map<std::string, double> cache;
  if (!cache_file.empty()) cache = load_style_cache(cache_file);
  bool dirty = false;
  for (auto& r : records) {
    auto it = cache.find(r.id);
    if (it != cache.end()) {
      r.style_scalar = it->second;
    } else {
      r.style_scalar = ink_intensity(decode_and_invert(r.image_path));
      cache[r.id] = *r.style_scalar;
      dirty = true;
    }
  }
  if (!cache_file.empty() && dirty) save_style_cache(cache_file, cache);
  result.records = std::move(records);
  return result;
}

std::shared_ptr<const EncoderBundle> make_bundle(const RunConfig& config) {
  config.validate();
  if (config.backbone == "toy") {
    if (config.weights_path.empty()) return toy_bundle(config.toy_embed_dim, config.backbone_seed);
    return pretrained_bundle("toy", config.weights_path);
  }
  if (config.weights_path.empty()) {
    throw ConfigError("backbone '" + config.backbone + "' requires weights_path");
  }
  return pretrained_bundle(config.backbone, config.weights_path);
}

ChannelStats training_channel_stats(std::span<const DrawingRecord> records) {
  ChannelStatsAccumulator acc;
  for (const auto& r : records) {
    if (r.split == Split::kTrain) acc.add(decode_and_invert(r.image_path));
  }
  if (acc.images() == 0) throw DegenerateInputError("no training images for channel statistics");
  return acc.finish();
}

namespace {

constexpr std::string_view kEmbeddingMagic = "CSCAEMB1";

std::string embedding_cache_file(const std::string& cache_dir, const ChannelStats& stats, const EncoderBundle& bundle) {
  std::string key = bundle.model_id() + to_hex(bundle.parameter_checksum());
  for (int c = 0; c < 3; ++c) key += "," + csv::format_double(stats.mean[c]) + "," + csv::format_double(stats.std[c]);
  return (fs::path(cache_dir) / ("embeddings-" + to_hex(fnv1a(key)) + ".bin")).string();
}

}  // namespace

std::vector<TrainingSample> encode_samples_cached(std::span<const DrawingRecord> records,
                                                  const ChannelStats& stats, const EncoderBundle& bundle,
                                                  const std::string& cache_dir) {
  if (cache_dir.empty()) return encode_samples(records, stats, bundle);
  const std::string file = embedding_cache_file(cache_dir, stats, bundle);
  std::map<std::string, std::pair<Vector, double>> cached;
  if (fs::exists(file)) {
    try {
      const TensorFile tf = read_tensor_file(file, kEmbeddingMagic, 1);
      const auto keys = tf.meta.at("keys").get<std::vector<std::string>>();
      const Matrix& features = tf.tensor("features");
      const Matrix& ink = tf.tensor("ink");
      if (features.rows() != static_cast<Eigen::Index>(keys.size()) || features.cols() != bundle.embed_dim()) {
        throw ParseError("shape mismatch");
      }
      for (std::size_t i = 0; i < keys.size(); ++i) {
        cached[keys[i]] = {features.row(static_cast<Eigen::Index>(i)).transpose(), ink(static_cast<Eigen::Index>(i), 0)};
      }
    } catch (const std::exception& e) {
      log::warning("ignoring unreadable embedding cache '" + file + "': " + e.what());
      cached.clear();
    }
  }
  bool dirty = false;
  std::vector<TrainingSample> samples;
  samples.reserve(records.size());
  for (const auto& r : records) {
    if (!r.rating_norm) throw ConfigError("record '" + r.id + "' has no normalized rating");
    auto it = cached.find(r.image_path);
    if (it == cached.end()) {
      const EncodedImage e = encode_image_file(r.image_path, stats, bundle);
      it = cached.emplace(r.image_path, std::make_pair(e.features, e.ink)).first;
      dirty = true;
    }
    TrainingSample s;
    s.id = r.id;
    s.features = it->second.first;
    s.ink = r.style_scalar ? *r.style_scalar : it->second.second;
    s.target = *r.rating_norm;
    s.label = r.content_label;
    samples.push_back(std::move(s));
  }
  if (dirty) {
    std::vector<std::string> keys;
    Matrix features(static_cast<Eigen::Index>(cached.size()), bundle.embed_dim());
    Matrix ink(static_cast<Eigen::Index>(cached.size()), 1);
    Eigen::Index row = 0;
    for (const auto& [key, value] : cached) {
      keys.push_back(key);
      features.row(row) = value.first.transpose();
      ink(row, 0) = value.second;
      ++row;
    }
    write_tensor_file(file, kEmbeddingMagic, 1, {{"keys", keys}}, {{"features", features}, {"ink", ink}});
  }
  return samples;
}

std::string ablation_label(const AblationFlags& flags) {
  const int row = ablation_row(flags);
  return row ? "(" + std::to_string(row) + ") " + std::string(ablation_row_name(row)) : "custom";
}

TrainedRun train_on_records(std::span<const DrawingRecord> records, const RunConfig& config,
                            std::shared_ptr<const EncoderBundle> bundle, const std::string& cache_dir) {
  config.validate();
  const auto train_records = filter_split(records, Split::kTrain);
  const auto val_records = filter_split(records, Split::kVal);
  const ChannelStats stats = training_channel_stats(train_records);
  const auto train_set = encode_samples_cached(train_records, stats, *bundle, cache_dir);
  const auto val_set = encode_samples_cached(val_records, stats, *bundle, cache_dir);

  CscaModel model(bundle, ModelOptions::from_config(config), config.seed);
  log::info("training " + ablation_label(config.ablation) + " on " + std::to_string(train_set.size()) +
            " drawings, fingerprint " + config.fingerprint());
  TrainedRun run;
  run.result = train(model, train_set, val_set, config);
  run.checkpoint.config = config;
  run.checkpoint.stats = stats;
  run.checkpoint.params = model.parameters();
  run.checkpoint.backbone_id = bundle->model_id();
  run.checkpoint.embed_dim = bundle->embed_dim();
  run.checkpoint.backbone_checksum = bundle->parameter_checksum();
  run.checkpoint.best_epoch = run.result.best_epoch;
  return run;
}

EvalReport evaluate_subsets(const Checkpoint& checkpoint, std::span<const DrawingRecord> records,
                            std::shared_ptr<const EncoderBundle> bundle, std::span<const Subset> subsets,
                            bool skip_empty, const std::string& cache_dir) {
  const CscaModel model = restore_model(checkpoint, bundle);
  EvalReport report;
  report.fingerprint = checkpoint.config.fingerprint();
  report.timestamp = utc_timestamp();
  report.ablation = ablation_label(checkpoint.config.ablation);
  for (Subset subset : subsets) {
    const auto selected = filter_split(records, split_of(subset));
    if (selected.empty()) {
      if (!skip_empty) throw DegenerateInputError("subset '" + std::string(to_string(subset)) + "' is empty");
      continue;
    }
    const auto samples = encode_samples_cached(selected, checkpoint.stats, *bundle, cache_dir);
    report.entries.push_back(evaluate_samples(samples, model, subset));
  }
  if (report.entries.empty()) throw DegenerateInputError("no evaluation subset has records");
  return report;
}

SyntheticPaths write_synthetic_dataset(const std::string& directory, const SyntheticSpec& spec) {
  if (spec.n_train < 2 || spec.n_val < 1 || spec.n_test < 0 || spec.image_size < 8) {
    throw ConfigError("synthetic dataset needs >= 2 train, >= 1 val images of size >= 8");
  }
  const fs::path dir(directory);
  fs::create_directories(dir / "images");
  std::mt19937_64 rng(spec.seed);
  const int side = spec.image_size;
  const int pixels = side * side;
  std::vector<int> positions(pixels);
  std::iota(positions.begin(), positions.end(), 0);

  std::vector<DrawingRecord> records;
  std::string annotations = "id,content_label\n";
  auto make = [&](Split split, int index, double fraction) {
    const int inked = static_cast<int>(std::lround(fraction * pixels));
    RawImage img;
    img.height = img.width = side;
    img.rgb.assign(static_cast<std::size_t>(pixels) * 3, 255);
    std::shuffle(positions.begin(), positions.end(), rng);
    for (int k = 0; k < inked; ++k) {
      const int y = positions[k] / side;
      const int x = positions[k] % side;
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = 0;
    }
    char name[64];
    std::snprintf(name, sizeof(name), "%s_%03d", std::string(to_string(split)).c_str(), index);
    const std::string rel = std::string("images/") + name + ".png";
    write_png((dir / rel).string(), img);
    DrawingRecord r;
    r.id = name;
    r.image_path = rel;
    r.rating_raw = static_cast<double>(inked) / pixels;
    r.split = split;
    records.push_back(r);
    const ContentLabel label = kAllContentLabels[static_cast<std::size_t>(rng() % kNumContentLabels)];
    annotations += std::string(name) + "," + std::string(to_string(label)) + "\n";
  };
  for (int i = 0; i < spec.n_train; ++i) make(Split::kTrain, i, static_cast<double>(i) / (spec.n_train - 1));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (int i = 0; i < spec.n_val; ++i) make(Split::kVal, i, uniform(rng));
  for (int i = 0; i < spec.n_test; ++i) make(Split::kTest, i, uniform(rng));

  SyntheticPaths paths;
  paths.manifest = (dir / "manifest.csv").string();
  paths.annotations = (dir / "annotations.csv").string();
  save_dataset(paths.manifest, records);
  csv::write_text_file(paths.annotations, annotations);
  return paths;
}

DirectoryLock::DirectoryLock(const std::string& directory) {
  fs::create_directories(directory);
  path_ = (fs::path(directory) / ".csca.lock").string();
  const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    const int err = errno;
    if (err == EEXIST) throw Error("output directory '" + directory + "' is locked by another csca process");
    throw Error("cannot create lock file '" + path_ + "': " + std::strerror(err));
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] auto written = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

DirectoryLock::~DirectoryLock() { ::unlink(path_.c_str()); }

}  // namespace csca
