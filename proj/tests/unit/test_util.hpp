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

#ifndef CSCA_TESTS_TEST_UTIL_HPP_
#define CSCA_TESTS_TEST_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "csca/backbone.hpp"
#include "csca/imaging.hpp"
#include "csca/model.hpp"
#include "csca/training.hpp"

namespace csca::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

RawImage random_image(std::mt19937_64& rng, int height, int width);
ImageTensor random_tensor(std::mt19937_64& rng, int height, int width, double lo = 0.0, double hi = 1.0);
Vector random_unit(std::mt19937_64& rng, int dim);
Vector random_gaussian(std::mt19937_64& rng, int dim, double stddev = 1.0);

// Every tensor gets N(0, scale^2) noise added (rating tokens) or replaced.
void randomize(CscaParameters& params, std::mt19937_64& rng, double scale);

std::shared_ptr<const PooledLinearBundle> small_bundle(int dim = 16, std::uint64_t seed = 3);

// |a - n| / max(|a|, |n|), falling back to the absolute error when both are
// below `floor`.
double relative_error(double analytic, double numeric, double floor = 1e-8);

std::string read_file(const std::string& path);

struct GradientCheck {
  double max_relative_error = 0.0;
  std::string worst_tensor;
  std::size_t checked = 0;
};

// Central differences of total_loss against loss_and_gradients over every
// element of every trainable tensor.
GradientCheck check_gradients(CscaModel& model, std::span<const TrainingSample> batch, double lambda,
                              double step = 1e-5);

// Random samples with unit features, uniform ink/targets and cycling labels.
std::vector<TrainingSample> random_samples(std::mt19937_64& rng, int count, int dim);

}  // namespace csca::testing

#endif  // CSCA_TESTS_TEST_UTIL_HPP_
