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

// Brute-force ranking-metric oracles for tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace oracle {

inline double dcg(const std::vector<double>& r, int k) {
  double s = 0.0;
  for (std::size_t p = 0; p < r.size() && p < static_cast<std::size_t>(k); ++p) {
    s += (std::pow(2.0, r[p]) - 1.0) / std::log2(static_cast<double>(p) + 2.0);
  }
  return s;
}

// NDCG with the ideal DCG taken as the maximum over every permutation.
inline double brute_ndcg(const std::vector<double>& ranked, int k) {
  std::vector<double> perm(ranked);
  std::sort(perm.begin(), perm.end());
  double best = 0.0;
  do {
    best = std::max(best, dcg(perm, k));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best == 0.0 ? 1.0 : dcg(ranked, k) / best;
}

inline double brute_mrr(const std::vector<double>& ranked) {
  double top = ranked[0];
  for (double r : ranked) top = std::max(top, r);
  for (std::size_t p = 0; p < ranked.size(); ++p) {
    if (ranked[p] == top) return 1.0 / static_cast<double>(p + 1);
  }
  return 0.0;
}

// Mean NDCG over all orderings of the list (each arrangement of positions
// counted once, so repeated values weigh as in a uniform shuffle).
inline double mean_over_permutations(const std::vector<double>& r, int k) {
  std::vector<std::size_t> idx(r.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  double total = 0.0;
  std::size_t count = 0;
  do {
    std::vector<double> ranked;
    for (auto i : idx) ranked.push_back(r[i]);
    total += brute_ndcg(ranked, k);
    ++count;
  } while (std::next_permutation(idx.begin(), idx.end()));
  return total / static_cast<double>(count);
}

struct MonteCarlo {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Mean over users of NDCG@k under uniformly random orderings.
inline MonteCarlo monte_carlo_random_ndcg(const std::vector<std::vector<double>>& users, int k,
                                          int draws, unsigned seed) {
  std::mt19937 gen(seed);
  double sum = 0.0, sum2 = 0.0;
  for (int d = 0; d < draws; ++d) {
    double mean = 0.0;
    for (auto list : users) {
      std::shuffle(list.begin(), list.end(), gen);
      std::vector<double> ideal(list);
      std::sort(ideal.begin(), ideal.end(), std::greater<>());
      const double best = dcg(ideal, k);
      mean += best == 0.0 ? 1.0 : dcg(list, k) / best;
    }
    mean /= static_cast<double>(users.size());
    sum += mean;
    sum2 += mean * mean;
  }
  MonteCarlo mc;
  mc.mean = sum / draws;
  mc.stderr_ = std::sqrt(std::max(0.0, sum2 / draws - mc.mean * mc.mean) / draws);
  return mc;
}

}  // namespace oracle
