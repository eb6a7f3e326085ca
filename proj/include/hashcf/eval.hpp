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
#include <fstream>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "hashcf/corpus.hpp"
#include "hashcf/error.hpp"
#include "hashcf/hashindex.hpp"
#include "hashcf/split.hpp"

namespace hashcf {

// Graded gain 2^r - 1 with discount log2(position + 1), positions from 1.
inline double ndcg_gain(double rating) { return std::exp2(rating) - 1.0; }
inline double ndcg_discount(std::size_t position) {
  return 1.0 / std::log2(static_cast<double>(position) + 1.0);
}

inline double dcg_at_k(std::span<const double> ranked_ratings, int k) {
  const std::size_t cut = std::min<std::size_t>(static_cast<std::size_t>(k), ranked_ratings.size());
  double dcg = 0.0;
  for (std::size_t p = 0; p < cut; ++p) dcg += ndcg_gain(ranked_ratings[p]) * ndcg_discount(p + 1);
  return dcg;
}

// NDCG@k of a ranking, normalized by the best ordering of the same ratings.
// A list whose ideal DCG is zero scores 1 (every order is ideal).
inline double ndcg_at_k(std::span<const double> ranked_ratings, int k) {
  if (k <= 0) throw ArgumentError("ndcg cutoff must be >= 1");
  if (ranked_ratings.empty()) throw ArgumentError("ndcg of an empty ranking");
  std::vector<double> ideal(ranked_ratings.begin(), ranked_ratings.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const double idcg = dcg_at_k(ideal, k);
  if (idcg <= 0.0) return 1.0;
  return dcg_at_k(ranked_ratings, k) / idcg;
}

// Reciprocal rank of the first item carrying the list's maximum rating.
inline double mrr(std::span<const double> ranked_ratings) {
  if (ranked_ratings.empty()) throw ArgumentError("mrr of an empty ranking");
  const auto it = std::max_element(ranked_ratings.begin(), ranked_ratings.end());
  return 1.0 / static_cast<double>(it - ranked_ratings.begin() + 1);
}

// Exact expectation of NDCG@k when the list is ordered uniformly at random:
// every position's expected gain is the mean gain of the list.
inline double expected_random_ndcg(std::span<const double> ratings, int k) {
  if (k <= 0) throw ArgumentError("ndcg cutoff must be >= 1");
  std::vector<double> ideal(ratings.begin(), ratings.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const double idcg = dcg_at_k(ideal, k);
  if (idcg <= 0.0) return 1.0;
  double mean_gain = 0.0;
  for (double r : ratings) mean_gain += ndcg_gain(r);
  mean_gain /= static_cast<double>(ratings.size());
  double discount = 0.0;
  const std::size_t cut = std::min<std::size_t>(static_cast<std::size_t>(k), ratings.size());
  for (std::size_t p = 1; p <= cut; ++p) discount += ndcg_discount(p);
  return mean_gain * discount / idcg;
}

struct UserMetrics {
  std::uint32_t user = 0;
  std::vector<double> ndcg;  // aligned with MetricsReport::ks
  double mrr = 0.0;
  double avg_item_popularity = 0.0;
  std::size_t num_items = 0;
};

struct MetricsReport {
  std::vector<int> ks;
  std::vector<double> ndcg_mean;
  double mrr = 0.0;
  std::vector<UserMetrics> per_user;
  std::size_t skipped_users = 0;

  std::size_t k_index(int k) const {
    auto it = std::find(ks.begin(), ks.end(), k);
    if (it == ks.end()) throw ArgumentError("NDCG@" + std::to_string(k) + " was not evaluated");
    return static_cast<std::size_t>(it - ks.begin());
  }
  double ndcg_at(int k) const { return ndcg_mean[k_index(k)]; }
};

enum class EvalTarget { kTest, kValidation };

namespace detail {

struct UserGroup {
  std::uint32_t user;
  std::size_t begin, end;
};

inline std::vector<UserGroup> group_by_user(std::span<const Rating> ratings) {
  std::vector<UserGroup> groups;
  std::size_t b = 0;
  while (b < ratings.size()) {
    std::size_t e = b;
    while (e < ratings.size() && ratings[e].user == ratings[b].user) ++e;
    groups.push_back({ratings[b].user, b, e});
    b = e;
  }
  return groups;
}

inline std::vector<Rating> sorted_by_user(std::span<const Rating> ratings) {
  std::vector<Rating> out(ratings.begin(), ratings.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const Rating& a, const Rating& b) { return a.user < b.user; });
  return out;
}

template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = n * w / t; i < n * (w + 1) / t; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail

// Ranks each user's target items by Hamming distance, then averages NDCG@k
// and MRR over users. Item popularity is the item's training rating count;
// a user's average popularity and item count cover all of the user's ratings
// in the split.
inline MetricsReport evaluate(const CodeBook& book, const Split& split, const Dataset& ds,
                              std::vector<int> ks = {2, 6, 10},
                              EvalTarget target = EvalTarget::kTest, int threads = 1) {
  for (int k : ks) {
    if (k <= 0) throw ArgumentError("ndcg cutoff must be >= 1");
  }
  const auto& targets_raw = target == EvalTarget::kTest ? split.test : split.validation;
  const auto targets = detail::sorted_by_user(targets_raw);
  const auto popularity = item_counts(split.train, ds.num_items());

  std::vector<double> pop_sum(ds.num_users(), 0.0);
  std::vector<std::size_t> user_count(ds.num_users(), 0);
  for (const auto* part : {&split.train, &split.validation, &split.test}) {
    for (const auto& r : *part) {
      pop_sum[r.user] += popularity[r.item];
      ++user_count[r.user];
    }
  }

  const auto groups = detail::group_by_user(targets);
  MetricsReport report;
  report.ks = ks;
  report.per_user.resize(groups.size());
  report.skipped_users = ds.num_users() > groups.size() ? ds.num_users() - groups.size() : 0;

  detail::parallel_for(groups.size(), threads, [&](std::size_t g) {
    const auto& grp = groups[g];
    std::vector<std::uint32_t> candidates;
    for (std::size_t j = grp.begin; j < grp.end; ++j) candidates.push_back(targets[j].item);
    std::sort(candidates.begin(), candidates.end());
    const auto ranked = rank_items(book.user(grp.user), book, candidates);
    std::vector<double> ranked_ratings;
    ranked_ratings.reserve(ranked.size());
    for (auto item : ranked) {
      for (std::size_t j = grp.begin; j < grp.end; ++j) {
        if (targets[j].item == item) {
          ranked_ratings.push_back(targets[j].value);
          break;
        }
      }
    }
    UserMetrics um;
    um.user = grp.user;
    for (int k : ks) um.ndcg.push_back(ndcg_at_k(ranked_ratings, k));
    um.mrr = mrr(ranked_ratings);
    um.num_items = user_count[grp.user];
    um.avg_item_popularity = um.num_items ? pop_sum[grp.user] / um.num_items : 0.0;
    report.per_user[g] = std::move(um);
  });

  report.ndcg_mean.assign(ks.size(), 0.0);
  for (const auto& um : report.per_user) {
    for (std::size_t k = 0; k < ks.size(); ++k) report.ndcg_mean[k] += um.ndcg[k];
    report.mrr += um.mrr;
  }
  if (!report.per_user.empty()) {
    const double n = static_cast<double>(report.per_user.size());
    for (auto& v : report.ndcg_mean) v /= n;
    report.mrr /= n;
  }
  return report;
}

// Mean over users of the exact random-permutation NDCG@k of their targets.
inline double random_ranking_ndcg(const Split& split, int k,
                                  EvalTarget target = EvalTarget::kTest) {
  const auto targets =
      detail::sorted_by_user(target == EvalTarget::kTest ? split.test : split.validation);
  const auto groups = detail::group_by_user(targets);
  if (groups.empty()) return 0.0;
  double total = 0.0;
  std::vector<double> ratings;
  for (const auto& g : groups) {
    ratings.clear();
    for (std::size_t j = g.begin; j < g.end; ++j) ratings.push_back(targets[j].value);
    total += expected_random_ndcg(ratings, k);
  }
  return total / static_cast<double>(groups.size());
}

enum class SeriesKey { kAvgItemPopularity, kNumItems };

inline std::string to_string(SeriesKey key) {
  return key == SeriesKey::kAvgItemPopularity ? "avg_item_popularity" : "num_items";
}

struct SeriesPoint {
  std::size_t position = 0;
  double key_value = 0.0;
  double smoothed_ndcg = 0.0;
};

// Users sorted ascending by `key` (ties by user id); each point is the mean
// NDCG@10 over a window of `window` users centred on it, truncated at the
// ends. A window wider than the population yields the global mean.
inline std::vector<SeriesPoint> user_series(const MetricsReport& report, SeriesKey key,
                                            std::size_t window = 1000, int k = 10) {
  if (window < 1) throw ArgumentError("smoothing window must be >= 1");
  const std::size_t ki = report.k_index(k);
  const std::size_t n = report.per_user.size();
  auto key_of = [&](const UserMetrics& um) {
    return key == SeriesKey::kAvgItemPopularity ? um.avg_item_popularity
                                                : static_cast<double>(um.num_items);
  };
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ka = key_of(report.per_user[a]), kb = key_of(report.per_user[b]);
    if (ka != kb) return ka < kb;
    return report.per_user[a].user < report.per_user[b].user;
  });
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t t = 0; t < n; ++t) prefix[t + 1] = prefix[t] + report.per_user[order[t]].ndcg[ki];

  std::vector<SeriesPoint> out(n);
  const std::size_t before = (window - 1) / 2;
  const std::size_t after = window - 1 - before;
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t lo = 0, hi = n;
    if (window < n) {
      lo = t >= before ? t - before : 0;
      hi = std::min(n, t + after + 1);
    }
    out[t] = {t, key_of(report.per_user[order[t]]),
              (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo)};
  }
  return out;
}

inline void write_metrics_csv(const std::filesystem::path& path, const MetricsReport& report,
                              const std::string& method, const std::string& split_name, int m) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  char buf[64];
  out << "method,split,m,k,value\n";
  for (std::size_t k = 0; k < report.ks.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g", report.ndcg_mean[k]);
    out << method << ',' << split_name << ',' << m << ',' << report.ks[k] << ',' << buf << '\n';
  }
  std::snprintf(buf, sizeof(buf), "%.17g", report.mrr);
  out << method << ',' << split_name << ',' << m << ",mrr," << buf << '\n';
}

inline void write_series_csv(const std::filesystem::path& path, std::span<const SeriesPoint> series) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << "position,key_value,smoothed_ndcg10\n";
  char buf[128];
  for (const auto& p : series) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", p.position, p.key_value, p.smoothed_ndcg);
    out << buf;
  }
}

}  // namespace hashcf
