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
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hashcf/corpus.hpp"
#include "hashcf/error.hpp"
#include "hashcf/rng.hpp"

namespace hashcf {

enum class SplitKind { kInMatrix, kOutOfMatrix };

inline std::string to_string(SplitKind kind) {
  return kind == SplitKind::kInMatrix ? "in_matrix" : "out_of_matrix";
}

struct Split {
  SplitKind kind = SplitKind::kInMatrix;
  std::vector<Rating> train;
  std::vector<Rating> validation;
  std::vector<Rating> test;
  double train_fraction = 0.0;
  double test_ratio = 0.0;
  double val_fraction = 0.0;
  std::uint64_t seed = 0;
  // Item partition; filled for out-of-matrix splits only.
  std::vector<std::uint32_t> train_items;
  std::vector<std::uint32_t> validation_items;
  std::vector<std::uint32_t> test_items;
};

namespace detail {

inline bool rating_less(const Rating& a, const Rating& b) {
  return std::tie(a.user, a.item) < std::tie(b.user, b.item);
}

// Smallest block length (2..20) in which `fraction` picks a whole number of
// elements; 20 otherwise.
inline std::size_t stripe_block(double fraction) {
  for (std::size_t b = 2; b <= 20; ++b) {
    const double k = fraction * static_cast<double>(b);
    if (std::abs(k - std::round(k)) < 1e-9) return b;
  }
  return 20;
}

// Walks `sorted` in consecutive blocks and picks a `fraction` share of each
// block at random, carrying the fractional remainder forward. Both outputs
// keep the input order.
inline void stratified_pick(std::span<const std::uint32_t> sorted, double fraction, Rng& rng,
                            std::vector<std::uint32_t>& picked,
                            std::vector<std::uint32_t>& rest) {
  const std::size_t block = stripe_block(fraction);
  double credit = 0.0;
  std::vector<char> take(sorted.size(), 0);
  std::vector<std::size_t> pos;
  for (std::size_t start = 0; start < sorted.size(); start += block) {
    const std::size_t len = std::min(block, sorted.size() - start);
    credit += fraction * static_cast<double>(len);
    std::size_t k = static_cast<std::size_t>(std::floor(credit + 1e-9));
    credit -= static_cast<double>(k);
    k = std::min(k, len);
    pos.resize(len);
    for (std::size_t j = 0; j < len; ++j) pos[j] = start + j;
    rng.shuffle(std::span<std::size_t>(pos));
    for (std::size_t j = 0; j < k; ++j) take[pos[j]] = 1;
  }
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    (take[j] ? picked : rest).push_back(sorted[j]);
  }
}

inline std::size_t round_count(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5));
}

}  // namespace detail

// Per user: shuffle the user's ratings, send round(test_ratio * n) to test,
// then move round(val_fraction * n_train) of the remainder to validation.
// At least one rating per user always stays in train.
inline Split split_in_matrix(const Dataset& ds, double test_ratio = 0.5,
                             double val_fraction = 0.15, std::uint64_t seed = 0) {
  if (!(test_ratio >= 0.0 && test_ratio < 1.0)) {
    throw ArgumentError("test_ratio must lie in [0, 1)");
  }
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) {
    throw ArgumentError("val_fraction must lie in [0, 1)");
  }
  Split split;
  split.kind = SplitKind::kInMatrix;
  split.test_ratio = test_ratio;
  split.val_fraction = val_fraction;
  split.seed = seed;

  std::vector<Rating> mine;
  std::size_t begin = 0;
  while (begin < ds.ratings.size()) {
    const std::uint32_t user = ds.ratings[begin].user;
    std::size_t end = begin;
    while (end < ds.ratings.size() && ds.ratings[end].user == user) ++end;
    mine.assign(ds.ratings.begin() + static_cast<std::ptrdiff_t>(begin),
                ds.ratings.begin() + static_cast<std::ptrdiff_t>(end));
    Rng rng(Rng::mix(seed, user));
    rng.shuffle(std::span<Rating>(mine));
    const std::size_t n = mine.size();
    std::size_t n_test = std::min(detail::round_count(test_ratio * n), n - 1);
    const std::size_t n_train = n - n_test;
    std::size_t n_val =
        std::min(detail::round_count(val_fraction * n_train), n_train - 1);
    std::size_t j = 0;
    for (; j < n_test; ++j) split.test.push_back(mine[j]);
    for (std::size_t v = 0; v < n_val; ++v, ++j) split.validation.push_back(mine[j]);
    for (; j < n; ++j) split.train.push_back(mine[j]);
    begin = end;
  }
  std::sort(split.train.begin(), split.train.end(), detail::rating_less);
  std::sort(split.validation.begin(), split.validation.end(), detail::rating_less);
  std::sort(split.test.begin(), split.test.end(), detail::rating_less);
  return split;
}

// Cold-start split over items. Items are sorted by rating count and striped
// into a training pool and a test set so both see similar popularity. The
// pool holds max(train_fraction, 0.5) of the items, so for fractions up to
// one half the test and validation items do not depend on the fraction and
// training item sets grow by nesting.
inline Split split_out_of_matrix(const Dataset& ds, double train_fraction,
                                 double val_fraction = 0.15, std::uint64_t seed = 0) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ArgumentError("train_fraction must lie in (0, 1)");
  }
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) {
    throw ArgumentError("val_fraction must lie in [0, 1)");
  }
  Split split;
  split.kind = SplitKind::kOutOfMatrix;
  split.train_fraction = train_fraction;
  split.val_fraction = val_fraction;
  split.seed = seed;

  const auto counts = item_counts(ds.ratings, ds.num_items());
  std::vector<std::uint32_t> order(ds.num_items());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return counts[a] > counts[b]; });

  const double pool_fraction = std::max(train_fraction, 0.5);
  std::vector<std::uint32_t> pool, candidates;
  Rng pool_rng(Rng::mix(seed, 1));
  detail::stratified_pick(order, pool_fraction, pool_rng, pool, split.test_items);
  Rng val_rng(Rng::mix(seed, 2));
  detail::stratified_pick(pool, val_fraction, val_rng, split.validation_items, candidates);

  // Interleave shuffled blocks of ten so every prefix spans all popularity
  // strata; training items are a prefix of this order.
  constexpr std::size_t kBlock = 10;
  Rng order_rng(Rng::mix(seed, 3));
  std::vector<std::vector<std::uint32_t>> blocks;
  for (std::size_t s = 0; s < candidates.size(); s += kBlock) {
    const std::size_t e = std::min(candidates.size(), s + kBlock);
    blocks.emplace_back(candidates.begin() + static_cast<std::ptrdiff_t>(s),
                        candidates.begin() + static_cast<std::ptrdiff_t>(e));
    order_rng.shuffle(std::span<std::uint32_t>(blocks.back()));
  }
  std::vector<std::uint32_t> interleaved;
  for (std::size_t p = 0; p < kBlock; ++p) {
    for (const auto& b : blocks) {
      if (p < b.size()) interleaved.push_back(b[p]);
    }
  }
  const std::size_t n_train = std::min(
      interleaved.size(),
      detail::round_count(train_fraction / pool_fraction * static_cast<double>(interleaved.size())));
  split.train_items.assign(interleaved.begin(),
                           interleaved.begin() + static_cast<std::ptrdiff_t>(n_train));

  std::sort(split.train_items.begin(), split.train_items.end());
  std::sort(split.validation_items.begin(), split.validation_items.end());
  std::sort(split.test_items.begin(), split.test_items.end());

  // 0 unused, 1 train, 2 validation, 3 test
  std::vector<char> role(ds.num_items(), 0);
  for (auto i : split.train_items) role[i] = 1;
  for (auto i : split.validation_items) role[i] = 2;
  for (auto i : split.test_items) role[i] = 3;
  for (const auto& r : ds.ratings) {
    switch (role[r.item]) {
      case 1: split.train.push_back(r); break;
      case 2: split.validation.push_back(r); break;
      case 3: split.test.push_back(r); break;
      default: break;
    }
  }
  return split;
}

}  // namespace hashcf
