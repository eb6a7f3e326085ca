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

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <vector>

#include "hashcf/bench.hpp"
#include "hashcf/hashindex.hpp"
#include "hashcf/rng.hpp"

using namespace hashcf;

namespace {

std::vector<int> random_signs(int m, Rng& rng) {
  std::vector<int> z(m);
  for (auto& v : z) v = rng.uniform() < 0.5 ? -1 : 1;
  return z;
}

// Bit-by-bit count of positions where two sign vectors differ.
int naive_hamming(const std::vector<int>& a, const std::vector<int>& b) {
  int d = 0;
  for (std::size_t j = 0; j < a.size(); ++j) d += a[j] != b[j];
  return d;
}

int dot(const std::vector<int>& a, const std::vector<int>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0);
}

// Sign vector whose bit j follows bit j of `bits`.
std::vector<int> from_bits(std::uint64_t bits, int m) {
  std::vector<int> z(m);
  for (int j = 0; j < m; ++j) z[j] = (bits >> j) & 1 ? 1 : -1;
  return z;
}

}  // namespace

TEST(Pack, AllPlusSixteen) {
  const HashCode h = pack(std::vector<int>(16, 1));
  EXPECT_EQ(h.words()[0], 0x000000000000FFFFull);
  EXPECT_EQ(h.bits(), 16);
}

TEST(Pack, AllMinusIsZero) {
  const HashCode h = pack(std::vector<int>(64, -1));
  EXPECT_EQ(h.words()[0], 0u);
}

TEST(Pack, RoundTripAndDomain) {
  Rng rng(1);
  for (int m : {1, 16, 32, 63, 64, 65, 128, 200, 512}) {
    const auto z = random_signs(m, rng);
    const HashCode h = pack(z);
    EXPECT_EQ(unpack(h), z) << m;
    EXPECT_EQ(pack(unpack(h)), h);
    // Padding bits stay zero.
    if (m % 64) EXPECT_EQ(h.words().back() >> (m % 64), 0u);
  }
  EXPECT_THROW(pack(std::vector<int>{1, 0, -1}), DomainError);
  EXPECT_THROW(pack(std::vector<double>{1.0, 0.5}), DomainError);
  EXPECT_THROW(pack(std::vector<int>(513, 1)), ArgumentError);
  EXPECT_THROW(pack(std::vector<int>{}), ArgumentError);
}

TEST(Hamming, IdentityComplementAndMismatch) {
  Rng rng(2);
  for (int m : {8, 64, 100}) {
    const auto z = random_signs(m, rng);
    std::vector<int> neg(z);
    for (auto& v : neg) v = -v;
    EXPECT_EQ(hamming(pack(z), pack(z)), 0);
    EXPECT_EQ(hamming(pack(z), pack(neg)), m);
  }
  EXPECT_THROW(hamming(HashCode(8), HashCode(16)), ArgumentError);
}

TEST(Hamming, EightBitExample) {
  const auto a = from_bits(0b10110010, 8);
  const auto b = from_bits(0b10011010, 8);
  // Enumeration: the words differ at bit positions 3 and 5 only.
  EXPECT_EQ(naive_hamming(a, b), 2);
  EXPECT_EQ(hamming(pack(a), pack(b)), 2);
}

TEST(Hamming, MetricAxiomsOnRandomCodes) {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const int m = 1 + static_cast<int>(rng.index(200));
    const auto a = pack(random_signs(m, rng));
    const auto b = pack(random_signs(m, rng));
    const auto c = pack(random_signs(m, rng));
    EXPECT_EQ(hamming(a, b), hamming(b, a));
    EXPECT_LE(hamming(a, c), hamming(a, b) + hamming(b, c));
    EXPECT_GE(hamming(a, b), 0);
    EXPECT_LE(hamming(a, b), m);
  }
}

TEST(InnerFromHamming, Values) {
  EXPECT_EQ(inner_from_hamming(32, 0), 32);
  EXPECT_EQ(inner_from_hamming(32, 32), -32);
  EXPECT_EQ(inner_from_hamming(16, 4), 8);
  EXPECT_THROW(inner_from_hamming(16, 17), ArgumentError);
  EXPECT_THROW(inner_from_hamming(16, -1), ArgumentError);
}

TEST(InnerFromHamming, MatchesDotProductRandom) {
  Rng rng(4);
  for (int trial = 0; trial < 2000; ++trial) {
    const int m = 1 + static_cast<int>(rng.index(512));
    const auto a = random_signs(m, rng), b = random_signs(m, rng);
    EXPECT_EQ(dot(a, b), inner_from_hamming(m, hamming(pack(a), pack(b))));
    EXPECT_EQ(naive_hamming(a, b), hamming(pack(a), pack(b)));
  }
}

TEST(CodeBook, StoreAndBounds) {
  CodeBook book(40, 3, 2);
  Rng rng(5);
  const auto h = pack(random_signs(40, rng));
  book.set_item(1, h);
  EXPECT_EQ(book.item_code(1), h);
  EXPECT_EQ(book.item_code(0), HashCode(40));
  EXPECT_THROW(book.item(2), IndexError);
  EXPECT_THROW(book.user(3), IndexError);
  EXPECT_THROW(book.set_user(0, HashCode(8)), ArgumentError);
  EXPECT_THROW(CodeBook(0, 1, 1), ArgumentError);
}

TEST(CodeBook, FileRoundTrip) {
  Rng rng(6);
  CodeBook book(70, 5, 7);
  for (std::size_t u = 0; u < 5; ++u) book.set_user(u, pack(random_signs(70, rng)));
  for (std::size_t i = 0; i < 7; ++i) book.set_item(i, pack(random_signs(70, rng)));
  const auto dir = std::filesystem::path(HASHCF_TEST_TMP) / "hashindex";
  std::filesystem::create_directories(dir);
  write_codebook(dir / "book.bin", book);
  EXPECT_EQ(read_codebook(dir / "book.bin"), book);
  EXPECT_EQ(std::filesystem::file_size(dir / "book.bin"), 4 + 4 + 4 + 8 + 8 + 12 * 2 * 8u);
  EXPECT_THROW(read_codebook(dir / "missing.bin"), StageError);
}

TEST(RankItems, SingletonAndSelfFirst) {
  Rng rng(7);
  CodeBook book(32, 1, 4);
  for (std::size_t i = 0; i < 4; ++i) book.set_item(i, pack(random_signs(32, rng)));
  const std::vector<std::uint32_t> one{2};
  EXPECT_EQ(rank_items(book.item_code(3), book, one), one);
  const std::vector<std::uint32_t> all{0, 1, 2, 3};
  EXPECT_EQ(rank_items(book.item_code(3), book, all).front(), 3u);
  EXPECT_TRUE(rank_items(book.item_code(3), book, std::vector<std::uint32_t>{}).empty());
}

TEST(RankItems, MatchesDotProductSortWithTies) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 8;  // short codes force ties
    CodeBook book(m, 1, 20);
    std::vector<std::vector<int>> z(20);
    for (std::size_t i = 0; i < 20; ++i) {
      z[i] = random_signs(m, rng);
      book.set_item(i, pack(z[i]));
    }
    const auto user = random_signs(m, rng);
    std::vector<std::uint32_t> cand(20);
    std::iota(cand.begin(), cand.end(), 0u);
    std::vector<std::uint32_t> shuffled = cand;
    rng.shuffle(std::span<std::uint32_t>(shuffled));
    auto expect = cand;
    std::stable_sort(expect.begin(), expect.end(),
                     [&](auto a, auto b) { return dot(user, z[a]) > dot(user, z[b]); });
    const auto got = rank_items(pack(user), book, shuffled);
    EXPECT_EQ(got, expect);
  }
}

TEST(Bench, ChecksumsMatchNaiveScan) {
  BenchOptions o;
  o.num_users = 37;
  o.num_items = 300;
  o.m = 100;
  o.repetitions = 2;
  o.seed = 3;
  const BenchReport r = bench(o);
  // Rebuild the same random data and scan naively.
  Rng rng(o.seed);
  const std::size_t stride = words_for_bits(o.m);
  auto codes = [&](std::size_t n) {
    std::vector<std::uint64_t> c(n * stride);
    for (std::size_t k = 0; k < c.size(); ++k) {
      c[k] = rng.next();
      if (k % stride == stride - 1) c[k] &= (std::uint64_t{1} << (o.m % 64)) - 1;
    }
    return c;
  };
  const auto uc = codes(o.num_users), ic = codes(o.num_items);
  std::uint64_t total = 0;
  for (std::size_t u = 0; u < o.num_users; ++u) {
    for (std::size_t i = 0; i < o.num_items; ++i) {
      total += static_cast<std::uint64_t>(hamming_words({uc.data() + u * stride, stride},
                                                        {ic.data() + i * stride, stride}));
    }
  }
  EXPECT_EQ(r.hamming_checksum, total * o.repetitions);
  EXPECT_GT(r.hamming_seconds, 0.0);
  EXPECT_GT(r.inner_seconds, 0.0);
  EXPECT_TRUE(std::isfinite(r.inner_checksum));
  EXPECT_EQ(r.computations_per_scan(), 37.0 * 300.0);
}

TEST(Bench, SingleUserSingleItem) {
  BenchOptions o;
  o.num_users = 1;
  o.num_items = 1;
  const BenchReport r = bench(o);
  EXPECT_TRUE(std::isfinite(r.hamming_seconds));
  EXPECT_TRUE(std::isfinite(r.inner_seconds));
  EXPECT_EQ(r.repetitions, 10);
}

TEST(Bench, ThreadsGiveSameChecksum) {
  BenchOptions o;
  o.num_users = 50;
  o.num_items = 200;
  o.repetitions = 1;
  const auto a = bench(o);
  o.threads = 4;
  const auto b = bench(o);
  EXPECT_EQ(a.hamming_checksum, b.hamming_checksum);
}

TEST(Bench, FullScaleCountAndBudget) {
  BenchOptions o;
  o.num_users = 100000;
  o.num_items = 1000000;
  o.m = 64;
  BenchReport r;
  r.num_users = o.num_users;
  r.num_items = o.num_items;
  EXPECT_EQ(r.computations_per_scan(), 1e11);
  o.memory_budget_bytes = 1 << 20;
  EXPECT_THROW(bench(o), ResourceError);
  EXPECT_EQ(bench_csv_header(), "num_items,hamming_seconds,inner_seconds,speedup");
}
