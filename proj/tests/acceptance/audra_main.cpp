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

// Data-dependent acceptance check on the public drawing dataset: ink
// intensity vs rating correlations on the primary test split. Needs the
// dataset on disk; exits with 77 (skipped) when it is not configured.
//
//   CSCA_AUDRA_MANIFEST     manifest CSV (id,image_path,rating_raw,split)
//   CSCA_AUDRA_ANNOTATIONS  content label CSV (id,content_label)

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "csca/analysis.hpp"
#include "csca/dataset.hpp"
#include "csca/log.hpp"
#include "csca/pipeline.hpp"

namespace {

constexpr int kSkip = 77;
constexpr double kCombinedTarget = 0.60;
constexpr double kCombinedTol = 0.05;
constexpr double kCategoryLow = 0.49;
constexpr double kCategoryHigh = 0.71;
constexpr double kMaxSeconds = 30 * 60;

}  // namespace

int main() {
  const char* manifest = std::getenv("CSCA_AUDRA_MANIFEST");
  const char* annotations = std::getenv("CSCA_AUDRA_ANNOTATIONS");
  if (!manifest || !annotations) {
    std::printf("SKIP audra_style_correlation: CSCA_AUDRA_MANIFEST / CSCA_AUDRA_ANNOTATIONS not set\n");
    return kSkip;
  }
  csca::log::set_level(csca::log::Level::kWarning);
  try {
    const auto start = std::chrono::steady_clock::now();
    const csca::IngestResult ingested = csca::ingest(manifest, annotations, csca::cache_dir_from_env());
    const auto test = csca::filter_split(ingested.records, csca::Split::kTest);
    const auto table = csca::style_rating_correlation(std::span<const csca::DrawingRecord>(test));
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    bool pass = table.combined.srcc && std::abs(*table.combined.srcc - kCombinedTarget) <= kCombinedTol;
    std::string detail = "combined " + (table.combined.srcc ? std::to_string(*table.combined.srcc) : "n/a");
    for (const auto& row : table.categories) {
      const bool ok = row.srcc && *row.srcc >= kCategoryLow && *row.srcc <= kCategoryHigh;
      pass = pass && ok;
      detail += ", " + row.category + " " + (row.srcc ? std::to_string(*row.srcc) : "n/a");
    }
    pass = pass && seconds < kMaxSeconds;
    std::printf("%s audra_style_correlation: %s (n=%zu, %.0f s)\n", pass ? "PASS" : "FAIL", detail.c_str(),
                table.combined.n, seconds);
    return pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::printf("FAIL audra_style_correlation: %s\n", e.what());
    return 1;
  }
}
