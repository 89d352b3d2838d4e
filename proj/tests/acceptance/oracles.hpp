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

#ifndef CSCA_TESTS_ACCEPTANCE_ORACLES_HPP_
#define CSCA_TESTS_ACCEPTANCE_ORACLES_HPP_

#include <array>
#include <vector>

#include "csca/backbone.hpp"

namespace csca::oracle {

// O(n^2) ranks: 1 + (#smaller) + (#equal - 1) / 2.
std::vector<double> brute_force_ranks(const std::vector<double>& v);

// Two-pass Pearson correlation in long double.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Fixed-template creativity score written out longhand: cosine against each
// template embedding, divide by tau, softmax, weight by 0.2 .. 1.0.
double template_score(const Vector& image_features, const EncoderBundle& bundle, double tau);

}  // namespace csca::oracle

#endif  // CSCA_TESTS_ACCEPTANCE_ORACLES_HPP_
