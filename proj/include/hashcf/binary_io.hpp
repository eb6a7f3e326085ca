// Copyright 2026 The hashcf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "hashcf/error.hpp"

namespace hashcf::io {

// Little-endian serialization of fixed-width integers and IEEE doubles.
class LeWriter {
 public:
  explicit LeWriter(const std::filesystem::path& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error("cannot open for writing: " + path.string());
  }

  template <typename T>
    requires std::is_integral_v<T> || std::is_floating_point_v<T>
  void put(T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t,
              std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
    U bits = std::bit_cast<U>(value);
    std::array<char, sizeof(U)> bytes;
    for (std::size_t b = 0; b < sizeof(U); ++b) {
      bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    }
    out_.write(bytes.data(), bytes.size());
  }

  void put_bytes(std::string_view bytes) {
    out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }

  void put_string(std::string_view s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    put_bytes(s);
  }

  void close() {
    out_.close();
    if (!out_) throw Error("write failed: " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class LeReader {
 public:
  explicit LeReader(const std::filesystem::path& path)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw StageError("missing file: " + path.string());
  }

  template <typename T>
    requires std::is_integral_v<T> || std::is_floating_point_v<T>
  T get() {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t,
              std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
    std::array<unsigned char, sizeof(U)> bytes;
    in_.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!in_) throw Error("truncated file: " + path_.string());
    U bits = 0;
    for (std::size_t b = 0; b < sizeof(U); ++b) {
      bits |= static_cast<U>(bytes[b]) << (8 * b);
    }
    return std::bit_cast<T>(bits);
  }

  std::string get_bytes(std::size_t n) {
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    if (!in_) throw Error("truncated file: " + path_.string());
    return s;
  }

  std::string get_string() { return get_bytes(get<std::uint32_t>()); }

  void expect_magic(std::string_view magic) {
    if (get_bytes(magic.size()) != magic) {
      throw Error("bad magic in " + path_.string());
    }
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

inline void require_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw StageError("missing upstream artifact: " + path.string());
  }
}

// 64-bit FNV-1a; used to fingerprint the stopword list in manifests.
inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace hashcf::io
