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

#ifndef CSCA_ERROR_HPP_
#define CSCA_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace csca {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files: manifests, annotation tables, caches, checkpoints.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Invalid or incomplete run configuration, unknown model ids.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Undecodable or empty images.
class ImageError : public Error {
 public:
  using Error::Error;
};

// Vector or tensor shapes that do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Inputs for which a statistic is undefined (constant vectors, degenerate
// rating ranges, empty sets).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace csca

#endif  // CSCA_ERROR_HPP_
