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

#ifndef CSCA_TENSOR_IO_HPP_
#define CSCA_TENSOR_IO_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "csca/backbone.hpp"

namespace csca {

// Container layout:
//   8-byte magic | u32 version | u64 header length | JSON header |
//   tensor payloads (little-endian float64, row-major, in header order)
// The header holds caller metadata under "meta" and a "tensors" list of
// {name, rows, cols}.
struct TensorFile {
  std::uint32_t version = 0;
  nlohmann::json meta;
  std::map<std::string, Matrix> tensors;

  const Matrix& tensor(const std::string& name) const;
};

void write_tensor_file(const std::string& path, std::string_view magic, std::uint32_t version,
                       const nlohmann::json& meta,
                       const std::vector<std::pair<std::string, Matrix>>& tensors);

// Throws ParseError on a wrong magic, a version newer than `max_version`,
// or a truncated payload.
TensorFile read_tensor_file(const std::string& path, std::string_view magic,
                            std::uint32_t max_version);

}  // namespace csca

#endif  // CSCA_TENSOR_IO_HPP_
