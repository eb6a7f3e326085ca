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

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hashcf/binary_io.hpp"
#include "hashcf/error.hpp"

namespace hashcf {

inline constexpr int kMaxCodeBits = 512;

constexpr std::size_t words_for_bits(int m) {
  return static_cast<std::size_t>((m + 63) / 64);
}

inline void check_code_length(int m) {
  if (m < 1 || m > kMaxCodeBits) {
    throw ArgumentError("code length must lie in [1, 512], got " + std::to_string(m));
  }
}

// An m-bit code. Bit j is set iff z_j = +1; bits at positions >= m are zero.
class HashCode {
 public:
  HashCode() = default;
  explicit HashCode(int m) : m_(m) { check_code_length(m); }

  int bits() const { return m_; }
  std::span<const std::uint64_t> words() const { return {words_.data(), words_for_bits(m_)}; }
  std::span<std::uint64_t> words() { return {words_.data(), words_for_bits(m_)}; }

  bool bit(int j) const { return (words_[j / 64] >> (j % 64)) & 1U; }
  void set_bit(int j, bool on) {
    const std::uint64_t mask = std::uint64_t{1} << (j % 64);
    if (on) {
      words_[j / 64] |= mask;
    } else {
      words_[j / 64] &= ~mask;
    }
  }

  friend bool operator==(const HashCode&, const HashCode&) = default;

 private:
  std::array<std::uint64_t, kMaxCodeBits / 64> words_{};
  int m_ = 0;
};

// Packs a {-1,+1} vector. Any other entry is a domain error.
template <typename T>
HashCode pack(std::span<const T> z) {
  HashCode h(static_cast<int>(z.size()));
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (z[j] == T(1)) {
      h.set_bit(static_cast<int>(j), true);
    } else if (z[j] != T(-1)) {
      throw DomainError("code entry " + std::to_string(j) + " is not -1 or +1");
    }
  }
  return h;
}

template <typename T>
HashCode pack(const std::vector<T>& z) {
  return pack(std::span<const T>(z));
}

inline std::vector<int> unpack(const HashCode& h) {
  std::vector<int> z(static_cast<std::size_t>(h.bits()));
  for (int j = 0; j < h.bits(); ++j) z[static_cast<std::size_t>(j)] = h.bit(j) ? 1 : -1;
  return z;
}

inline int hamming_words(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  int d = 0;
  for (std::size_t w = 0; w < a.size(); ++w) d += std::popcount(a[w] ^ b[w]);
  return d;
}

inline int hamming(const HashCode& a, const HashCode& b) {
  if (a.bits() != b.bits()) {
    throw ArgumentError("hamming: code lengths differ (" + std::to_string(a.bits()) + " vs " +
                        std::to_string(b.bits()) + ")");
  }
  return hamming_words(a.words(), b.words());
}

// Inner product of two {-1,+1}^m codes from their Hamming distance.
inline int inner_from_hamming(int m, int h) {
  if (h < 0 || h > m) {
    throw ArgumentError("hamming distance " + std::to_string(h) + " outside [0, " +
                        std::to_string(m) + "]");
  }
  return m - 2 * h;
}

// Contiguous user and item codes sharing one code length.
class CodeBook {
 public:
  CodeBook() = default;
  CodeBook(int m, std::size_t num_users, std::size_t num_items)
      : m_(m), stride_(words_for_bits(m)),
        users_(num_users * words_for_bits(m), 0), items_(num_items * words_for_bits(m), 0) {
    check_code_length(m);
  }

  int bits() const { return m_; }
  std::size_t stride() const { return stride_; }
  std::size_t num_users() const { return stride_ ? users_.size() / stride_ : 0; }
  std::size_t num_items() const { return stride_ ? items_.size() / stride_ : 0; }

  std::span<const std::uint64_t> user(std::size_t u) const {
    if (u >= num_users()) throw IndexError("no code for user " + std::to_string(u));
    return {users_.data() + u * stride_, stride_};
  }
  std::span<const std::uint64_t> item(std::size_t i) const {
    if (i >= num_items()) throw IndexError("no code for item " + std::to_string(i));
    return {items_.data() + i * stride_, stride_};
  }

  HashCode user_code(std::size_t u) const { return to_code(user(u)); }
  HashCode item_code(std::size_t i) const { return to_code(item(i)); }

  void set_user(std::size_t u, const HashCode& h) { assign(users_, u, num_users(), h); }
  void set_item(std::size_t i, const HashCode& h) { assign(items_, i, num_items(), h); }

  std::span<const std::uint64_t> user_words() const { return users_; }
  std::span<const std::uint64_t> item_words() const { return items_; }
  std::span<std::uint64_t> user_words() { return users_; }
  std::span<std::uint64_t> item_words() { return items_; }

  friend bool operator==(const CodeBook&, const CodeBook&) = default;

 private:
  HashCode to_code(std::span<const std::uint64_t> w) const {
    HashCode h(m_);
    std::copy(w.begin(), w.end(), h.words().begin());
    return h;
  }
  void assign(std::vector<std::uint64_t>& store, std::size_t idx, std::size_t count,
              const HashCode& h) {
    if (h.bits() != m_) throw ArgumentError("code length does not match codebook");
    if (idx >= count) throw IndexError("code index " + std::to_string(idx) + " out of range");
    std::copy(h.words().begin(), h.words().end(),
              store.begin() + static_cast<std::ptrdiff_t>(idx * stride_));
  }

  int m_ = 0;
  std::size_t stride_ = 0;
  std::vector<std::uint64_t> users_;
  std::vector<std::uint64_t> items_;
};

// Orders candidate items by ascending Hamming distance to the user code,
// breaking ties by ascending item id.
inline std::vector<std::uint32_t> rank_items(std::span<const std::uint64_t> user,
                                             const CodeBook& book,
                                             std::span<const std::uint32_t> candidates) {
  std::vector<std::pair<int, std::uint32_t>> keyed;
  keyed.reserve(candidates.size());
  for (auto id : candidates) keyed.emplace_back(hamming_words(user, book.item(id)), id);
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::uint32_t> out;
  out.reserve(keyed.size());
  for (const auto& [d, id] : keyed) out.push_back(id);
  return out;
}

inline std::vector<std::uint32_t> rank_items(const HashCode& user, const CodeBook& book,
                                             std::span<const std::uint32_t> candidates) {
  if (user.bits() != book.bits()) throw ArgumentError("user code length does not match codebook");
  return rank_items(user.words(), book, candidates);
}

// File layout: "HCFB", u32 version, u32 m, u64 users, u64 items, then the
// packed words of all users followed by all items, little-endian.
inline void write_codebook(const std::filesystem::path& path, const CodeBook& book) {
  io::LeWriter w(path);
  w.put_bytes("HCFB");
  w.put<std::uint32_t>(1);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(book.bits()));
  w.put<std::uint64_t>(book.num_users());
  w.put<std::uint64_t>(book.num_items());
  for (auto word : book.user_words()) w.put(word);
  for (auto word : book.item_words()) w.put(word);
  w.close();
}

inline CodeBook read_codebook(const std::filesystem::path& path) {
  io::LeReader r(path);
  r.expect_magic("HCFB");
  if (r.get<std::uint32_t>() != 1) throw Error("unsupported codebook version: " + path.string());
  const int m = static_cast<int>(r.get<std::uint32_t>());
  const auto users = r.get<std::uint64_t>();
  const auto items = r.get<std::uint64_t>();
  CodeBook book(m, users, items);
  for (auto& word : book.user_words()) word = r.get<std::uint64_t>();
  for (auto& word : book.item_words()) word = r.get<std::uint64_t>();
  return book;
}

}  // namespace hashcf
