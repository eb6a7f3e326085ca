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
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <vector>

#include "eval_oracle.hpp"
#include "hashcf/eval.hpp"
#include "hashcf/rng.hpp"

using namespace hashcf;

namespace {

// Dataset and split where every user rates `per_user` items; all ratings go
// to test except one training rating per user on item 0.
struct Fixture {
  Dataset ds;
  Split split;
};

Fixture make_fixture(std::size_t users, std::size_t items, std::size_t per_user, Rng& rng) {
  Fixture f;
  for (std::size_t u = 0; u < users; ++u) f.ds.user_ids.push_back("u" + std::to_string(u));
  for (std::size_t i = 0; i < items; ++i) f.ds.item_ids.push_back("i" + std::to_string(i));
  f.ds.max_rating = 5;
  for (std::uint32_t u = 0; u < users; ++u) {
    std::vector<std::uint32_t> pick(items - 1);
    std::iota(pick.begin(), pick.end(), 1u);
    rng.shuffle(std::span<std::uint32_t>(pick));
    f.split.train.push_back({u, 0, 3.0});
    for (std::size_t k = 0; k < per_user; ++k) {
      f.split.test.push_back({u, pick[k], static_cast<double>(1 + rng.index(5))});
    }
  }
  std::sort(f.split.test.begin(), f.split.test.end(),
            [](auto& a, auto& b) { return std::pair(a.user, a.item) < std::pair(b.user, b.item); });
  return f;
}

CodeBook random_book(int m, std::size_t users, std::size_t items, Rng& rng) {
  CodeBook book(m, users, items);
  for (auto& w : book.user_words()) w = rng.next() & ((std::uint64_t{1} << m) - 1);
  for (auto& w : book.item_words()) w = rng.next() & ((std::uint64_t{1} << m) - 1);
  return book;
}

}  // namespace

TEST(Ndcg, SortedListIsOne) {
  const std::vector<double> r{5, 4, 4, 2, 1};
  for (int k : {1, 3, 5, 10}) EXPECT_DOUBLE_EQ(ndcg_at_k(r, k), 1.0);
}

TEST(Ndcg, SingleItemIsOne) {
  for (int k : {1, 2, 10}) EXPECT_DOUBLE_EQ(ndcg_at_k(std::vector<double>{3}, k), 1.0);
}

TEST(Ndcg, TwoItemHandValue) {
  const double dcg = 7.0 + 31.0 / std::log2(3.0);
  const double idcg = 31.0 + 7.0 / std::log2(3.0);
  EXPECT_NEAR(ndcg_at_k(std::vector<double>{3, 5}, 2), dcg / idcg, 1e-15);
  EXPECT_NEAR(ndcg_at_k(std::vector<double>{3, 5}, 2), 0.7499, 1e-4);
}

TEST(Ndcg, Errors) {
  EXPECT_THROW(ndcg_at_k(std::vector<double>{1, 2}, 0), ArgumentError);
  EXPECT_THROW(ndcg_at_k(std::vector<double>{}, 3), ArgumentError);
  EXPECT_THROW(expected_random_ndcg(std::vector<double>{1}, 0), ArgumentError);
}

TEST(Mrr, Values) {
  EXPECT_DOUBLE_EQ(mrr(std::vector<double>{5, 1, 2}), 1.0);
  EXPECT_DOUBLE_EQ(mrr(std::vector<double>{1, 2, 5, 5}), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(mrr(std::vector<double>{3, 3, 3}), 1.0);
  EXPECT_THROW(mrr(std::vector<double>{}), ArgumentError);
}

TEST(MetricOracle, AllPermutationsUpToFour) {
  // The acceptance binary covers length six exhaustively; here lengths <= 4
  // over every rating multiset.
  for (std::size_t len = 1; len <= 4; ++len) {
    std::vector<int> digits(len, 1);
    while (true) {
      std::vector<double> r(digits.begin(), digits.end());
      std::sort(r.begin(), r.end());
      do {
        for (int k = 1; k <= static_cast<int>(len) + 1; ++k) {
          EXPECT_NEAR(ndcg_at_k(r, k), oracle::brute_ndcg(r, k), 1e-12);
        }
        EXPECT_NEAR(mrr(r), oracle::brute_mrr(r), 1e-12);
      } while (std::next_permutation(r.begin(), r.end()));
      std::size_t p = 0;
      while (p < len && digits[p] == 5) digits[p++] = 1;
      if (p == len) break;
      ++digits[p];
    }
  }
}

TEST(NdcgProperty, EqualRatingSwapsInvariantAndAdjacentSwapsMonotone) {
  Rng rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t len = 2 + rng.index(12);
    std::vector<double> r(len);
    for (auto& x : r) x = static_cast<double>(1 + rng.index(5));
    const int k = 1 + static_cast<int>(rng.index(len + 2));
    const double base = ndcg_at_k(r, k);
    EXPECT_GE(base, 0.0);
    EXPECT_LE(base, 1.0 + 1e-15);
    const std::size_t p = rng.index(len - 1);
    auto swapped = r;
    std::swap(swapped[p], swapped[p + 1]);
    if (r[p] == r[p + 1]) {
      EXPECT_EQ(ndcg_at_k(swapped, k), base);
    } else if (r[p] < r[p + 1]) {
      EXPECT_GE(ndcg_at_k(swapped, k), base - 1e-15);
    }
    const double m = mrr(r);
    const double inv = 1.0 / m;
    EXPECT_NEAR(inv, std::round(inv), 1e-9);
    EXPECT_EQ(m == 1.0, r[0] == *std::max_element(r.begin(), r.end()));
  }
}

TEST(ExpectedRandomNdcg, MatchesPermutationAverage) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t len = 1 + rng.index(6);
    std::vector<double> r(len);
    for (auto& x : r) x = static_cast<double>(1 + rng.index(5));
    for (int k : {1, 2, 3, 10}) {
      EXPECT_NEAR(expected_random_ndcg(r, k), oracle::mean_over_permutations(r, k), 1e-12);
    }
  }
}

TEST(Evaluate, UserCodeEqualsTopItemGivesMrrOne) {
  Rng rng(5);
  Fixture f = make_fixture(30, 40, 8, rng);
  CodeBook book(32, 30, 40);
  for (std::uint32_t i = 0; i < 40; ++i) {
    HashCode h(32);
    h.words()[0] = (std::uint64_t{i} * 0x9E3779B1u) & 0xFFFFFFFFu;  // distinct
    book.set_item(i, h);
  }
  for (std::uint32_t u = 0; u < 30; ++u) {
    double best = -1;
    std::uint32_t best_item = 0;
    for (const auto& r : f.split.test) {
      if (r.user == u && r.value > best) {
        best = r.value;
        best_item = r.item;
      }
    }
    book.set_user(u, book.item_code(best_item));
  }
  const auto report = evaluate(book, f.split, f.ds);
  EXPECT_DOUBLE_EQ(report.mrr, 1.0);
  EXPECT_EQ(report.per_user.size(), 30u);
  EXPECT_EQ(report.skipped_users, 0u);
}

TEST(Evaluate, RandomCodesMatchMonteCarloExpectation) {
  Rng rng(6);
  Fixture f = make_fixture(50, 60, 10, rng);
  const CodeBook book = random_book(32, 50, 60, rng);
  const auto report = evaluate(book, f.split, f.ds, {10});
  // Monte-Carlo oracle: shuffle each user's test ratings 1e5 times.
  std::vector<std::vector<double>> per_user(50);
  for (const auto& r : f.split.test) per_user[r.user].push_back(r.value);
  const auto mc = oracle::monte_carlo_random_ndcg(per_user, 10, 100000, 99);
  // Standard error of the user mean under random codes.
  double var = 0.0;
  for (const auto& um : report.per_user) var += std::pow(um.ndcg[0] - mc.mean, 2);
  const double se = std::sqrt(var / (50.0 * 49.0));
  EXPECT_NEAR(report.ndcg_at(10), mc.mean, 3.0 * se + 3.0 * mc.stderr_);
  EXPECT_NEAR(random_ranking_ndcg(f.split, 10), mc.mean, 4.0 * mc.stderr_ + 1e-4);
}

TEST(Evaluate, SingleItemUsersScoreOne) {
  Rng rng(7);
  Fixture f = make_fixture(10, 20, 1, rng);
  const CodeBook book = random_book(16, 10, 20, rng);
  const auto report = evaluate(book, f.split, f.ds, {1});
  EXPECT_DOUBLE_EQ(report.ndcg_at(1), 1.0);
  EXPECT_DOUBLE_EQ(report.mrr, 1.0);
  EXPECT_THROW(report.ndcg_at(10), ArgumentError);
}

TEST(Evaluate, SkipsUsersWithoutTargetsAndIsPure) {
  Rng rng(8);
  Fixture f = make_fixture(10, 20, 4, rng);
  f.ds.user_ids.push_back("lonely");
  CodeBook book = random_book(16, 11, 20, rng);
  const auto a = evaluate(book, f.split, f.ds);
  const auto b = evaluate(book, f.split, f.ds, {2, 6, 10}, EvalTarget::kTest, 4);
  EXPECT_EQ(a.skipped_users, 1u);
  EXPECT_EQ(a.ndcg_mean, b.ndcg_mean);
  EXPECT_EQ(a.mrr, b.mrr);
}

TEST(Evaluate, MissingCodeIsIndexError) {
  Rng rng(9);
  Fixture f = make_fixture(5, 10, 3, rng);
  const CodeBook book = random_book(16, 5, 6, rng);
  EXPECT_THROW(evaluate(book, f.split, f.ds), IndexError);
}

TEST(Evaluate, PopularityUsesTrainingCounts) {
  Dataset ds;
  ds.user_ids = {"a", "b"};
  ds.item_ids = {"x", "y", "z"};
  Split s;
  s.train = {{0, 0, 4}, {1, 0, 4}, {1, 1, 2}};
  s.test = {{0, 1, 5}, {0, 2, 1}};
  CodeBook book(8, 2, 3);
  const auto report = evaluate(book, s, ds, {10});
  ASSERT_EQ(report.per_user.size(), 1u);
  // User a: items x (2 train ratings), y (1), z (0).
  EXPECT_DOUBLE_EQ(report.per_user[0].avg_item_popularity, 1.0);
  EXPECT_EQ(report.per_user[0].num_items, 3u);
}

TEST(UserSeries, WindowOneIsIdentityInKeyOrder) {
  MetricsReport r;
  r.ks = {10};
  for (std::uint32_t u = 0; u < 6; ++u) {
    r.per_user.push_back({u, {0.1 * u}, 1.0, static_cast<double>(6 - u), u});
  }
  const auto s = user_series(r, SeriesKey::kAvgItemPopularity, 1);
  for (std::size_t t = 0; t < 6; ++t) EXPECT_NEAR(s[t].smoothed_ndcg, 0.1 * (5 - t), 1e-12);
  const auto n = user_series(r, SeriesKey::kNumItems, 1);
  for (std::size_t t = 0; t < 6; ++t) EXPECT_NEAR(n[t].smoothed_ndcg, 0.1 * t, 1e-12);
}

TEST(UserSeries, WindowThreeMiddleValue) {
  MetricsReport r;
  r.ks = {10};
  for (std::uint32_t u = 0; u < 10; ++u) r.per_user.push_back({u, {0.1 * u}, 1.0, 1.0, u});
  const auto s = user_series(r, SeriesKey::kNumItems, 3);
  EXPECT_NEAR(s[5].smoothed_ndcg, (0.4 + 0.5 + 0.6) / 3.0, 1e-15);
  EXPECT_NEAR(s[0].smoothed_ndcg, (0.0 + 0.1) / 2.0, 1e-15);  // truncated
  EXPECT_NEAR(s[9].smoothed_ndcg, (0.8 + 0.9) / 2.0, 1e-15);
}

TEST(UserSeries, ConstantAndWideWindow) {
  MetricsReport r;
  r.ks = {10};
  Rng rng(10);
  double total = 0.0;
  for (std::uint32_t u = 0; u < 25; ++u) {
    const double v = rng.uniform();
    total += v;
    r.per_user.push_back({u, {v}, 1.0, rng.uniform(), 1 + rng.index(9)});
  }
  for (const auto& p : user_series(r, SeriesKey::kNumItems, 1000)) {
    EXPECT_NEAR(p.smoothed_ndcg, total / 25.0, 1e-12);
  }
  for (auto& um : r.per_user) um.ndcg[0] = 0.25;
  for (const auto& p : user_series(r, SeriesKey::kAvgItemPopularity, 4)) {
    EXPECT_DOUBLE_EQ(p.smoothed_ndcg, 0.25);
  }
  EXPECT_THROW(user_series(r, SeriesKey::kNumItems, 0), ArgumentError);
}

TEST(MetricsCsv, Layout) {
  MetricsReport r;
  r.ks = {2, 10};
  r.ndcg_mean = {0.5, 0.75};
  r.mrr = 0.25;
  const auto dir = std::filesystem::path(HASHCF_TEST_TMP) / "eval";
  std::filesystem::create_directories(dir);
  write_metrics_csv(dir / "m.csv", r, "content_aware", "in_matrix", 32);
  std::ifstream in(dir / "m.csv");
  std::string all((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(all,
            "method,split,m,k,value\n"
            "content_aware,in_matrix,32,2,0.5\n"
            "content_aware,in_matrix,32,10,0.75\n"
            "content_aware,in_matrix,32,mrr,0.25\n");
}
