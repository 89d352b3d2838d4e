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

#include "csca/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>

#include "csca/csv.hpp"
#include "csca/error.hpp"

namespace csca {

namespace {

int require_column(const csv::Table& table, std::string_view name, std::string_view what) {
  const int col = table.column(name);
  if (col < 0) {
    throw ParseError(std::string(what) + ": missing column '" + std::string(name) + "'");
  }
  return col;
}

void sort_and_check_unique(std::vector<DrawingRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const DrawingRecord& a, const DrawingRecord& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].id == records[i - 1].id) {
      throw ParseError("duplicate id '" + records[i].id + "'");
    }
  }
}

std::string line_prefix(std::size_t line) { return "line " + std::to_string(line) + ": "; }

std::vector<DrawingRecord> records_from_manifest(const csv::Table& table) {
  const int id_col = require_column(table, "id", "manifest");
  const int path_col = require_column(table, "image_path", "manifest");
  const int rating_col = require_column(table, "rating_raw", "manifest");
  const int split_col = require_column(table, "split", "manifest");
  std::vector<DrawingRecord> records;
  records.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    DrawingRecord r;
    r.id = row.fields[id_col];
    if (r.id.empty()) throw ParseError(line_prefix(row.line) + "empty id");
    r.image_path = row.fields[path_col];
    if (r.image_path.empty()) throw ParseError(line_prefix(row.line) + "empty image_path");
    r.rating_raw = csv::parse_double(row.fields[rating_col], row.line, "rating_raw");
    try {
      r.split = parse_split(row.fields[split_col]);
    } catch (const ParseError& e) {
      throw ParseError(line_prefix(row.line) + e.what());
    }
    records.push_back(std::move(r));
  }
  sort_and_check_unique(records);
  return records;
}

}  // namespace

std::vector<DrawingRecord> parse_manifest(std::string_view text) {
  return records_from_manifest(csv::parse(text));
}

std::vector<DrawingRecord> load_dataset(const std::string& manifest_path) {
  if (!std::filesystem::exists(manifest_path)) {
    throw ParseError("manifest not found: '" + manifest_path + "'");
  }
  try {
    return records_from_manifest(csv::read_file(manifest_path));
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    if (msg.starts_with(manifest_path)) throw;
    throw ParseError(manifest_path + ": " + msg);
  }
}

std::string format_manifest(std::span<const DrawingRecord> records) {
  std::string out = "id,image_path,rating_raw,split\n";
  for (const auto& r : records) {
    out += csv::join({r.id, r.image_path, csv::format_double(r.rating_raw),
                      std::string(to_string(r.split))});
    out.push_back('\n');
  }
  return out;
}

void save_dataset(const std::string& manifest_path, std::span<const DrawingRecord> records) {
  csv::write_text_file(manifest_path, format_manifest(records));
}

std::string resolve_image_path(const std::string& image_path, const std::string& anchor_file) {
  std::filesystem::path p(image_path);
  if (p.is_absolute()) return image_path;
  return (std::filesystem::path(anchor_file).parent_path() / p).lexically_normal().string();
}

std::map<std::string, ContentLabel> load_annotations(const std::string& annotations_path) {
  if (!std::filesystem::exists(annotations_path)) {
    throw ParseError("annotation file not found: '" + annotations_path + "'");
  }
  const csv::Table table = csv::read_file(annotations_path);
  const int id_col = require_column(table, "id", "annotations");
  const int label_col = require_column(table, "content_label", "annotations");
  std::map<std::string, ContentLabel> labels;
  for (const auto& row : table.rows) {
    ContentLabel label;
    try {
      label = parse_content_label(row.fields[label_col]);
    } catch (const ParseError& e) {
      throw ParseError(annotations_path + ": " + line_prefix(row.line) + e.what());
    }
    if (!labels.emplace(row.fields[id_col], label).second) {
      throw ParseError(annotations_path + ": " + line_prefix(row.line) + "duplicate id '" +
                       row.fields[id_col] + "'");
    }
  }
  return labels;
}

MergeResult merge_annotations(std::span<const DrawingRecord> records,
                              const std::map<std::string, ContentLabel>& labels) {
  MergeResult result;
  result.records.assign(records.begin(), records.end());
  std::set<std::string> seen;
  for (auto& r : result.records) {
    auto it = labels.find(r.id);
    if (it == labels.end()) {
      result.unannotated_ids.push_back(r.id);
    } else {
      r.content_label = it->second;
      seen.insert(r.id);
    }
  }
  for (const auto& [id, label] : labels) {
    if (!seen.contains(id)) result.unknown_ids.push_back(id);
  }
  return result;
}

MergeResult merge_annotations(std::span<const DrawingRecord> records,
                              const std::string& annotations_path) {
  return merge_annotations(records, load_annotations(annotations_path));
}

RatingRange rating_range(std::span<const DrawingRecord> records, Split stats_source) {
  bool any = false;
  RatingRange range{0.0, 0.0};
  for (const auto& r : records) {
    if (r.split != stats_source) continue;
    if (!any) {
      range = {r.rating_raw, r.rating_raw};
      any = true;
    } else {
      range.min = std::min(range.min, r.rating_raw);
      range.max = std::max(range.max, r.rating_raw);
    }
  }
  if (!any) {
    throw DegenerateInputError("no records in split '" + std::string(to_string(stats_source)) +
                               "' to compute rating statistics");
  }
  if (range.max == range.min) {
    throw DegenerateInputError("degenerate ratings: all ratings in split '" +
                               std::string(to_string(stats_source)) + "' equal " +
                               csv::format_double(range.min));
  }
  return range;
}

std::vector<DrawingRecord> normalize_ratings(std::span<const DrawingRecord> records,
                                             const RatingRange& range) {
  if (!(range.max > range.min)) throw DegenerateInputError("rating range has max <= min");
  std::vector<DrawingRecord> out(records.begin(), records.end());
  const double span = range.max - range.min;
  for (auto& r : out) {
    r.rating_norm = std::clamp((r.rating_raw - range.min) / span, 0.0, 1.0);
  }
  return out;
}

std::vector<DrawingRecord> normalize_ratings(std::span<const DrawingRecord> records,
                                             Split stats_source) {
  return normalize_ratings(records, rating_range(records, stats_source));
}

std::vector<DrawingRecord> assign_primary_splits(std::span<const DrawingRecord> records,
                                                 std::uint64_t seed) {
  std::vector<DrawingRecord> out(records.begin(), records.end());
  std::vector<std::size_t> primary;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Split s = out[i].split;
    if (s == Split::kTrain || s == Split::kVal || s == Split::kTest) primary.push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::shuffle(primary.begin(), primary.end(), rng);
  // Round half up in integer arithmetic; 0.7 * n in floating point lands
  // just below the half for n = 11075.
  const std::size_t n = primary.size();
  const std::size_t n_train = (7 * n + 5) / 10;
  const std::size_t n_val = std::min(n - n_train, (n + 5) / 10);
  for (std::size_t k = 0; k < primary.size(); ++k) {
    Split s = Split::kTest;
    if (k < n_train) {
      s = Split::kTrain;
    } else if (k < n_train + n_val) {
      s = Split::kVal;
    }
    out[primary[k]].split = s;
  }
  return out;
}

std::vector<DrawingRecord> filter_split(std::span<const DrawingRecord> records, Split split) {
  std::vector<DrawingRecord> out;
  for (const auto& r : records) {
    if (r.split == split) out.push_back(r);
  }
  return out;
}

std::string format_store(std::span<const DrawingRecord> records, const std::string& fingerprint) {
  std::string out = "# csca-store v1 fingerprint=" + fingerprint + "\n";
  out += "id,image_path,rating_raw,rating_norm,split,content_label,style_scalar\n";
  for (const auto& r : records) {
    out += csv::join({
        r.id,
        r.image_path,
        csv::format_double(r.rating_raw),
        r.rating_norm ? csv::format_double(*r.rating_norm) : std::string(),
        std::string(to_string(r.split)),
        r.content_label ? std::string(to_string(*r.content_label)) : std::string(),
        r.style_scalar ? csv::format_double(*r.style_scalar) : std::string(),
    });
    out.push_back('\n');
  }
  return out;
}

void save_store(const std::string& path, std::span<const DrawingRecord> records,
                const std::string& fingerprint) {
  csv::write_text_file(path, format_store(records, fingerprint));
}

std::vector<DrawingRecord> load_store(const std::string& path, std::string* fingerprint) {
  std::vector<std::string> comments;
  const csv::Table table = csv::read_file(path, &comments);
  if (fingerprint) {
    fingerprint->clear();
    for (const auto& c : comments) {
      const auto pos = c.find("fingerprint=");
      if (pos != std::string::npos) *fingerprint = c.substr(pos + 12);
    }
  }
  const int id_col = require_column(table, "id", "store");
  const int path_col = require_column(table, "image_path", "store");
  const int raw_col = require_column(table, "rating_raw", "store");
  const int norm_col = require_column(table, "rating_norm", "store");
  const int split_col = require_column(table, "split", "store");
  const int label_col = require_column(table, "content_label", "store");
  const int style_col = require_column(table, "style_scalar", "store");
  std::vector<DrawingRecord> records;
  for (const auto& row : table.rows) {
    DrawingRecord r;
    r.id = row.fields[id_col];
    r.image_path = row.fields[path_col];
    r.rating_raw = csv::parse_double(row.fields[raw_col], row.line, "rating_raw");
    if (!row.fields[norm_col].empty()) {
      r.rating_norm = csv::parse_double(row.fields[norm_col], row.line, "rating_norm");
    }
    try {
      r.split = parse_split(row.fields[split_col]);
      if (!row.fields[label_col].empty()) {
        r.content_label = parse_content_label(row.fields[label_col]);
      }
    } catch (const ParseError& e) {
      throw ParseError(path + ": " + line_prefix(row.line) + e.what());
    }
    if (!row.fields[style_col].empty()) {
      r.style_scalar = csv::parse_double(row.fields[style_col], row.line, "style_scalar");
    }
    records.push_back(std::move(r));
  }
  sort_and_check_unique(records);
  return records;
}

std::map<std::string, double> load_style_cache(const std::string& path) {
  std::map<std::string, double> values;
  if (!std::filesystem::exists(path)) return values;
  const csv::Table table = csv::read_file(path);
  const int id_col = require_column(table, "id", "style cache");
  const int value_col = require_column(table, "style_scalar", "style cache");
  for (const auto& row : table.rows) {
    values[row.fields[id_col]] = csv::parse_double(row.fields[value_col], row.line, "style_scalar");
  }
  return values;
}

void save_style_cache(const std::string& path, const std::map<std::string, double>& values) {
  std::string out = "id,style_scalar\n";
  for (const auto& [id, v] : values) {
    out += csv::join({id, csv::format_double(v)});
    out.push_back('\n');
  }
  csv::write_text_file(path, out);
}

}  // namespace csca
