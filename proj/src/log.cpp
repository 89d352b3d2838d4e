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

#include "csca/log.hpp"

#include <cstdio>
#include <mutex>
#include <string>

namespace csca::log {

namespace {

Level g_level = Level::kInfo;
std::function<void(Level, std::string_view)> g_sink;
std::mutex g_mutex;

const char* prefix(Level level) {
  switch (level) {
    case Level::kDebug:
      return "debug";
    case Level::kInfo:
      return "info";
    case Level::kWarning:
      return "warning";
    case Level::kError:
      return "error";
  }
  return "";
}

void emit(Level level, std::string_view message) {
  if (level < g_level) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  if (g_sink) {
    g_sink(level, message);
    return;
  }
  std::fprintf(stderr, "csca %s: %.*s\n", prefix(level), static_cast<int>(message.size()), message.data());
}

}  // namespace

void set_level(Level level) { g_level = level; }
void set_sink(std::function<void(Level, std::string_view)> sink) { g_sink = std::move(sink); }
void reset_sink() { g_sink = nullptr; }

void debug(std::string_view message) { emit(Level::kDebug, message); }
void info(std::string_view message) { emit(Level::kInfo, message); }
void warning(std::string_view message) { emit(Level::kWarning, message); }
void error(std::string_view message) { emit(Level::kError, message); }

}  // namespace csca::log
