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

#ifndef CSCA_CSV_HPP_
#define CSCA_CSV_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace csca::csv {

struct Row {
  std::size_t line = 0;  // 1-based line number in the source file
  std::vector<std::string> fields;
};

struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;

  // Index of `name` in the header, or -1.
  int column(std::string_view name) const;
};

// Comma-separated, optional double quotes with "" escapes, no embedded
// newlines. Lines starting with '#' before the header are skipped and
// returned in `comments` when given. Blank lines are skipped.
Table read_file(const std::string& path, std::vector<std::string>* comments = nullptr);
Table parse(std::string_view text, std::vector<std::string>* comments = nullptr);

std::vector<std::string> split_line(std::string_view line, std::size_t line_number);

// Quotes the field only when it contains a comma, quote or leading space.
std::string escape(std::string_view field);
std::string join(const std::vector<std::string>& fields);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text, std::size_t line_number, std::string_view what);

// Writes atomically-ish: content goes to path + ".tmp" then is renamed.
void write_text_file(const std::string& path, std::string_view content);
std::string read_text_file(const std::string& path);

}  // namespace csca::csv

#endif  // CSCA_CSV_HPP_
