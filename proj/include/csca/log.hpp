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

#ifndef CSCA_LOG_HPP_
#define CSCA_LOG_HPP_

#include <functional>
#include <string_view>

namespace csca::log {

enum class Level { kDebug = 0, kInfo = 1, kWarning = 2, kError = 3 };

// Messages go to stderr unless a sink is installed. Not thread-safe to
// reconfigure while other threads log.
void set_level(Level level);
void set_sink(std::function<void(Level, std::string_view)> sink);
void reset_sink();

void debug(std::string_view message);
void info(std::string_view message);
void warning(std::string_view message);
void error(std::string_view message);

}  // namespace csca::log

#endif  // CSCA_LOG_HPP_
