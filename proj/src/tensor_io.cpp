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

#include "csca/tensor_io.hpp"

#include <bit>
#include <filesystem>
#include <fstream>

#include "csca/error.hpp"

namespace csca {

static_assert(std::endian::native == std::endian::little, "tensor files assume a little-endian host");

const Matrix& TensorFile::tensor(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw ParseError("missing tensor '" + name + "'");
  return it->second;
}

void write_tensor_file(const std::string& path, std::string_view magic, std::uint32_t version,
                       const nlohmann::json& meta,
                       const std::vector<std::pair<std::string, Matrix>>& tensors) {
  if (magic.size() != 8) throw Error("tensor file magic must be 8 bytes");
  nlohmann::json header;
  header["meta"] = meta;
  header["tensors"] = nlohmann::json::array();
  for (const auto& [name, m] : tensors) {
    header["tensors"].push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
  }
  const std::string text = header.dump();
  const std::uint64_t header_len = text.size();

  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp + "' for writing");
    out.write(magic.data(), 8);
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& [name, m] : tensors) {
      out.write(reinterpret_cast<const char*>(m.data()),
                static_cast<std::streamsize>(m.size() * sizeof(double)));
    }
    if (!out) throw Error("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, target);
}

TensorFile read_tensor_file(const std::string& path, std::string_view magic,
                            std::uint32_t max_version) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  char got_magic[8] = {};
  in.read(got_magic, 8);
  if (!in || std::string_view(got_magic, 8) != magic) {
    throw ParseError("'" + path + "' is not a " + std::string(magic) + " file");
  }
  TensorFile file;
  std::uint64_t header_len = 0;
  in.read(reinterpret_cast<char*>(&file.version), sizeof(file.version));
  in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  if (!in) throw ParseError("'" + path + "': truncated header");
  if (file.version == 0 || file.version > max_version) {
    throw ParseError("'" + path + "': unsupported version " + std::to_string(file.version));
  }
  if (header_len > (1ULL << 30)) throw ParseError("'" + path + "': corrupt header length");
  std::string text(header_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw ParseError("'" + path + "': truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
    file.meta = header.at("meta");
    for (const auto& t : header.at("tensors")) {
      const auto name = t.at("name").get<std::string>();
      const auto rows = t.at("rows").get<Eigen::Index>();
      const auto cols = t.at("cols").get<Eigen::Index>();
      if (rows < 0 || cols < 0) throw ParseError("negative tensor shape");
      Matrix m(rows, cols);
      in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
      if (!in) throw ParseError("'" + path + "': truncated tensor '" + name + "'");
      file.tensors.emplace(name, std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("'" + path + "': corrupt header: " + e.what());
  }
  in.peek();
  if (!in.eof()) throw ParseError("'" + path + "': trailing bytes after tensors");
  return file;
}

}  // namespace csca
