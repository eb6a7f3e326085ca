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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hashcf/corpus.hpp"
#include "hashcf/rng.hpp"

namespace hashcf {

// Topic-driven synthetic ratings with item descriptions. Each item mixes a
// dominant and a secondary topic; its description is drawn from the topics'
// word distributions and repeated on every review of the item. Ratings are a
// noisy function of the affinity between user preferences and item topics.
// A share of items ("twins") duplicate an earlier item's description and
// topics exactly.
struct SyntheticConfig {
  std::size_t users = 2000;
  std::size_t items = 1000;
  std::size_t vocab = 500;
  std::size_t topics = 8;
  std::size_t ratings_per_user = 40;
  std::size_t words_per_item = 30;
  double twin_fraction = 0.05;
  double rating_noise = 0.5;
  std::uint64_t seed = 0;
};

inline std::string synthetic_word(std::size_t w) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "w%04zu", w);
  return buf;
}

inline std::vector<RatingEvent> generate_synthetic(const SyntheticConfig& c) {
  if (c.users == 0 || c.items == 0 || c.vocab < c.topics || c.topics == 0) {
    throw ArgumentError("synthetic generator needs users, items and vocab >= topics >= 1");
  }
  if (c.ratings_per_user > c.items) throw ArgumentError("ratings_per_user exceeds item count");
  Rng rng(c.seed);
  const std::size_t band = c.vocab / c.topics;

  auto draw_word = [&](std::size_t topic) {
    if (rng.uniform() < 0.8) return topic * band + static_cast<std::size_t>(rng.index(band));
    return static_cast<std::size_t>(rng.index(c.vocab));
  };

  std::vector<std::vector<double>> item_topics(c.items, std::vector<double>(c.topics, 0.0));
  std::vector<std::string> item_text(c.items);
  for (std::size_t i = 0; i < c.items; ++i) {
    if (i > 0 && rng.uniform() < c.twin_fraction) {
      const std::size_t src = static_cast<std::size_t>(rng.index(i));
      item_topics[i] = item_topics[src];
      item_text[i] = item_text[src];
      continue;
    }
    const std::size_t major = static_cast<std::size_t>(rng.index(c.topics));
    const std::size_t minor = static_cast<std::size_t>(rng.index(c.topics));
    item_topics[i][major] += 0.75;
    item_topics[i][minor] += 0.25;
    std::string text;
    for (std::size_t k = 0; k < c.words_per_item; ++k) {
      const std::size_t topic = rng.uniform() < 0.75 ? major : minor;
      if (!text.empty()) text.push_back(' ');
      text += synthetic_word(draw_word(topic));
    }
    item_text[i] = std::move(text);
  }

  std::vector<RatingEvent> events;
  events.reserve(c.users * c.ratings_per_user);
  std::vector<std::size_t> pick(c.items);
  std::int64_t clock = 1'500'000'000;
  for (std::size_t u = 0; u < c.users; ++u) {
    std::vector<double> pref(c.topics);
    for (auto& x : pref) x = rng.normal();
    for (std::size_t i = 0; i < c.items; ++i) pick[i] = i;
    // Partial Fisher-Yates: the first ratings_per_user slots are the sample.
    for (std::size_t k = 0; k < c.ratings_per_user; ++k) {
      const std::size_t j = k + static_cast<std::size_t>(rng.index(c.items - k));
      std::swap(pick[k], pick[j]);
    }
    for (std::size_t k = 0; k < c.ratings_per_user; ++k) {
      const std::size_t i = pick[k];
      double affinity = 0.0;
      for (std::size_t t = 0; t < c.topics; ++t) affinity += pref[t] * item_topics[i][t];
      const double raw = 3.0 + 1.5 * affinity + c.rating_noise * rng.normal();
      RatingEvent ev;
      ev.user_id = "u" + std::to_string(u);
      ev.item_id = "i" + std::to_string(i);
      ev.rating = std::clamp(std::round(raw), 1.0, 5.0);
      ev.timestamp = clock++;
      ev.review_text = item_text[i];
      events.push_back(std::move(ev));
    }
  }
  return events;
}

// Writes events as TSV: user, item, rating, timestamp, quoted review.
inline void write_ratings_tsv(const std::filesystem::path& path,
                              const std::vector<RatingEvent>& events) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << "user_id\titem_id\trating\ttimestamp\treview_text\n";
  for (const auto& ev : events) {
    out << ev.user_id << '\t' << ev.item_id << '\t' << ev.rating << '\t' << ev.timestamp;
    if (ev.review_text) {
      out << "\t\"";
      for (char ch : *ev.review_text) {
        if (ch == '"') out << '"';
        out << ch;
      }
      out << '"';
    }
    out << '\n';
  }
}

}  // namespace hashcf
