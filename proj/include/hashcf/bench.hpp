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
#include <bit>
#include <chrono>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "hashcf/error.hpp"
#include "hashcf/hashindex.hpp"
#include "hashcf/rng.hpp"

namespace hashcf {

struct BenchOptions {
  std::size_t num_users = 1000;
  std::size_t num_items = 1000;
  int m = 64;
  int repetitions = 10;
  std::uint64_t seed = 0;
  std::size_t memory_budget_bytes = std::size_t{4} << 30;
  int threads = 1;
};

struct BenchReport {
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  int m = 0;
  int repetitions = 0;
  int threads = 1;
  double hamming_seconds = 0.0;  // mean over repetitions
  double inner_seconds = 0.0;
  double speedup = 0.0;
  std::uint64_t hamming_checksum = 0;
  double inner_checksum = 0.0;

  double computations_per_scan() const {
    return static_cast<double>(num_users) * static_cast<double>(num_items);
  }
};

inline std::size_t bench_memory_estimate(const BenchOptions& o) {
  const std::size_t per_entity =
      words_for_bits(o.m) * sizeof(std::uint64_t) + static_cast<std::size_t>(o.m) * sizeof(float);
  return (o.num_users + o.num_items) * per_entity;
}

namespace detail {

// Item tiles sized so one tile of float vectors stays cache resident.
inline std::size_t bench_tile(int m) {
  return std::max<std::size_t>(64, (std::size_t{192} << 10) / (sizeof(float) * m));
}

template <std::size_t W>
std::uint64_t hamming_scan_fixed(const std::uint64_t* users, std::size_t u_begin,
                                 std::size_t u_end, const std::uint64_t* items,
                                 std::size_t num_items, std::size_t tile) {
  std::uint64_t checksum = 0;
  for (std::size_t t0 = 0; t0 < num_items; t0 += tile) {
    const std::size_t t1 = std::min(num_items, t0 + tile);
    for (std::size_t u = u_begin; u < u_end; ++u) {
      const std::uint64_t* uc = users + u * W;
      std::uint64_t acc = 0;
      for (std::size_t i = t0; i < t1; ++i) {
        const std::uint64_t* ic = items + i * W;
        std::uint64_t d = 0;
        for (std::size_t w = 0; w < W; ++w) d += std::popcount(uc[w] ^ ic[w]);
        acc += d;
      }
      checksum += acc;
    }
  }
  return checksum;
}

inline std::uint64_t hamming_scan(const std::uint64_t* users, std::size_t u_begin,
                                  std::size_t u_end, const std::uint64_t* items,
                                  std::size_t num_items, int m) {
  const std::size_t tile = bench_tile(m) * 8;
  switch (words_for_bits(m)) {
    case 1: return hamming_scan_fixed<1>(users, u_begin, u_end, items, num_items, tile);
    case 2: return hamming_scan_fixed<2>(users, u_begin, u_end, items, num_items, tile);
    case 3: return hamming_scan_fixed<3>(users, u_begin, u_end, items, num_items, tile);
    case 4: return hamming_scan_fixed<4>(users, u_begin, u_end, items, num_items, tile);
    case 5: return hamming_scan_fixed<5>(users, u_begin, u_end, items, num_items, tile);
    case 6: return hamming_scan_fixed<6>(users, u_begin, u_end, items, num_items, tile);
    case 7: return hamming_scan_fixed<7>(users, u_begin, u_end, items, num_items, tile);
    default: return hamming_scan_fixed<8>(users, u_begin, u_end, items, num_items, tile);
  }
}

// One full dot product per pair. The simd reduction lets the compiler
// reassociate that single sum; build with -fopenmp-simd.
inline double inner_scan(const float* users, std::size_t u_begin, std::size_t u_end,
                         const float* items, std::size_t num_items, int m) {
  const std::size_t dim = static_cast<std::size_t>(m);
  const std::size_t tile = bench_tile(m);
  double checksum = 0.0;
  for (std::size_t t0 = 0; t0 < num_items; t0 += tile) {
    const std::size_t t1 = std::min(num_items, t0 + tile);
    for (std::size_t u = u_begin; u < u_end; ++u) {
      const float* uv = users + u * dim;
      float acc = 0.0f;
      for (std::size_t i = t0; i < t1; ++i) {
        const float* iv = items + i * dim;
        float dot = 0.0f;
#pragma omp simd reduction(+ : dot)
        for (std::size_t j = 0; j < dim; ++j) dot += uv[j] * iv[j];
        acc += dot;
      }
      checksum += acc;
    }
  }
  return checksum;
}

template <typename Result, typename Scan>
Result sharded(std::size_t num_users, int threads, Scan scan) {
  if (threads <= 1 || num_users < 2) return scan(std::size_t{0}, num_users);
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(threads), num_users);
  std::vector<Result> partial(n, Result{});
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < n; ++t) {
    pool.emplace_back([&, t] {
      partial[t] = scan(num_users * t / n, num_users * (t + 1) / n);
    });
  }
  for (auto& th : pool) th.join();
  Result total{};
  for (const auto& p : partial) total += p;
  return total;
}

}  // namespace detail

// Times all-pairs user-to-item scoring with packed codes (XOR + popcount)
// against float vectors (dot product) of the same dimension. Generation is
// excluded from the timings; each repetition scans the same buffers.
inline BenchReport bench(const BenchOptions& o) {
  if (o.num_users < 1 || o.num_items < 1) throw ArgumentError("bench sizes must be >= 1");
  if (o.repetitions < 1) throw ArgumentError("bench repetitions must be >= 1");
  check_code_length(o.m);
  const std::size_t need = bench_memory_estimate(o);
  if (need > o.memory_budget_bytes) {
    throw ResourceError("bench needs about " + std::to_string(need >> 20) +
                        " MiB, over the budget of " +
                        std::to_string(o.memory_budget_bytes >> 20) + " MiB");
  }

  const std::size_t stride = words_for_bits(o.m);
  const std::size_t dim = static_cast<std::size_t>(o.m);
  const std::uint64_t tail_mask =
      o.m % 64 == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << (o.m % 64)) - 1;
  Rng rng(o.seed);
  auto random_codes = [&](std::size_t n) {
    std::vector<std::uint64_t> codes(n * stride);
    for (std::size_t k = 0; k < codes.size(); ++k) {
      codes[k] = rng.next();
      if (k % stride == stride - 1) codes[k] &= tail_mask;
    }
    return codes;
  };
  auto random_vectors = [&](std::size_t n) {
    std::vector<float> v(n * dim);
    for (auto& x : v) x = static_cast<float>(rng.normal());
    return v;
  };
  const auto user_codes = random_codes(o.num_users);
  const auto item_codes = random_codes(o.num_items);
  const auto user_vecs = random_vectors(o.num_users);
  const auto item_vecs = random_vectors(o.num_items);

  BenchReport report;
  report.num_users = o.num_users;
  report.num_items = o.num_items;
  report.m = o.m;
  report.repetitions = o.repetitions;
  report.threads = std::max(1, o.threads);

  using clock = std::chrono::steady_clock;
  double hamming_total = 0.0, inner_total = 0.0;
  for (int rep = 0; rep < o.repetitions; ++rep) {
    auto t0 = clock::now();
    const std::uint64_t hc = detail::sharded<std::uint64_t>(
        o.num_users, o.threads, [&](std::size_t b, std::size_t e) {
          return detail::hamming_scan(user_codes.data(), b, e, item_codes.data(), o.num_items,
                                      o.m);
        });
    auto t1 = clock::now();
    const double ic = detail::sharded<double>(
        o.num_users, o.threads, [&](std::size_t b, std::size_t e) {
          return detail::inner_scan(user_vecs.data(), b, e, item_vecs.data(), o.num_items, o.m);
        });
    auto t2 = clock::now();
    hamming_total += std::chrono::duration<double>(t1 - t0).count();
    inner_total += std::chrono::duration<double>(t2 - t1).count();
    report.hamming_checksum += hc;
    report.inner_checksum += ic;
  }
  report.hamming_seconds = hamming_total / o.repetitions;
  report.inner_seconds = inner_total / o.repetitions;
  report.speedup = report.hamming_seconds > 0.0 ? report.inner_seconds / report.hamming_seconds
                                                 : 0.0;
  return report;
}

inline std::string bench_csv_header() { return "num_items,hamming_seconds,inner_seconds,speedup"; }

inline std::string bench_csv_row(const BenchReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.6g", r.num_items, r.hamming_seconds,
                r.inner_seconds, r.speedup);
  return buf;
}

}  // namespace hashcf
