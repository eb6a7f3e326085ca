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
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hashcf/binary_io.hpp"
#include "hashcf/corpus.hpp"

namespace hashcf {

// English stopwords shipped with the library. Sorted; the manifest records a
// fingerprint of this exact list.
inline const std::vector<std::string>& default_stopwords() {
  static const std::vector<std::string> words = [] {
    std::vector<std::string> w = {
        "a", "about", "above", "after", "again", "against", "ain", "all", "am", "an",
        "and", "any", "are", "aren", "as", "at", "be", "because", "been", "before",
        "being", "below", "between", "both", "but", "by", "can", "couldn", "d", "did",
        "didn", "do", "does", "doesn", "doing", "don", "down", "during", "each", "few",
        "for", "from", "further", "had", "hadn", "has", "hasn", "have", "haven", "having",
        "he", "her", "here", "hers", "herself", "him", "himself", "his", "how", "i",
        "if", "in", "into", "is", "isn", "it", "its", "itself", "just", "ll",
        "m", "ma", "me", "mightn", "more", "most", "mustn", "my", "myself", "needn",
        "no", "nor", "not", "now", "o", "of", "off", "on", "once", "only",
        "or", "other", "our", "ours", "ourselves", "out", "over", "own", "re", "s",
        "same", "shan", "she", "should", "shouldn", "so", "some", "such", "t", "than",
        "that", "the", "their", "theirs", "them", "themselves", "then", "there", "these", "they",
        "this", "those", "through", "to", "too", "under", "until", "up", "ve", "very",
        "was", "wasn", "we", "were", "weren", "what", "when", "where", "which", "while",
        "who", "whom", "why", "will", "with", "won", "wouldn", "y", "you", "your",
        "yours", "yourself", "yourselves", "also", "would", "could", "get", "got", "one", "us"};
    std::sort(w.begin(), w.end());
    w.erase(std::unique(w.begin(), w.end()), w.end());
    return w;
  }();
  return words;
}

inline std::uint64_t stopword_fingerprint(std::span<const std::string> words) {
  std::string joined;
  for (const auto& w : words) {
    joined += w;
    joined.push_back('\n');
  }
  return io::fnv1a(joined);
}

// Lowercases ASCII, splits on anything that is not [a-z0-9], and drops
// tokens shorter than two characters.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.size() >= 2) tokens.push_back(current);
    current.clear();
  };
  for (unsigned char c : text) {
    if (c >= 'A' && c <= 'Z') {
      current.push_back(static_cast<char>(c - 'A' + 'a'));
    } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      current.push_back(static_cast<char>(c));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

struct ContentOptions {
  std::size_t vocab_size = 8000;
  std::vector<std::string> stopwords = default_stopwords();
};

// Builds per-item TF-IDF content from the reviews of every event whose item
// survived filtering. All reviews of an item are pooled into one document.
//   weight(w, i) = tf(w, i) * (ln((1 + N) / (1 + df(w))) + 1)
// with tf the relative term frequency and N the item count; rows are then
// L2-normalized. The vocabulary keeps the vocab_size words of highest
// document frequency (ties by word). Items left with no tokens keep a zero
// row and are counted in empty_content_items.
inline Dataset build_content(Dataset ds, std::span<const RatingEvent> events,
                             const ContentOptions& options = {}) {
  const std::size_t num_items = ds.num_items();
  std::set<std::string, std::less<>> stop(options.stopwords.begin(), options.stopwords.end());

  std::unordered_map<std::string_view, std::uint32_t> item_lookup;
  item_lookup.reserve(num_items);
  for (std::uint32_t i = 0; i < num_items; ++i) item_lookup.emplace(ds.item_ids[i], i);

  std::vector<std::map<std::string, std::uint32_t>> counts(num_items);
  std::vector<std::uint64_t> totals(num_items, 0);
  for (const auto& ev : events) {
    if (!ev.review_text) continue;
    auto it = item_lookup.find(ev.item_id);
    if (it == item_lookup.end()) continue;
    for (auto& tok : tokenize(*ev.review_text)) {
      if (stop.contains(tok)) continue;
      ++counts[it->second][std::move(tok)];
      ++totals[it->second];
    }
  }

  std::map<std::string, std::uint32_t> df;
  for (const auto& doc : counts) {
    for (const auto& [word, c] : doc) ++df[word];
  }
  std::vector<std::pair<std::string, std::uint32_t>> ranked(df.begin(), df.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > options.vocab_size) ranked.resize(options.vocab_size);

  ds.vocabulary.clear();
  std::unordered_map<std::string_view, std::uint32_t> column;
  const double n = static_cast<double>(num_items);
  for (std::uint32_t c = 0; c < ranked.size(); ++c) {
    const double idf = std::log((1.0 + n) / (1.0 + ranked[c].second)) + 1.0;
    ds.vocabulary.push_back({ranked[c].first, ranked[c].second, idf});
  }
  for (std::uint32_t c = 0; c < ds.vocabulary.size(); ++c) column.emplace(ds.vocabulary[c].word, c);

  ds.content = SparseRows{};
  ds.content.cols = ds.vocabulary.size();
  ds.empty_content_items = 0;
  std::vector<std::pair<std::uint32_t, double>> row;
  std::vector<std::uint32_t> idx;
  std::vector<double> val;
  for (std::size_t i = 0; i < num_items; ++i) {
    row.clear();
    for (const auto& [word, c] : counts[i]) {
      auto col = column.find(word);
      if (col == column.end()) continue;
      const double tf = static_cast<double>(c) / static_cast<double>(totals[i]);
      row.emplace_back(col->second, tf * ds.vocabulary[col->second].idf);
    }
    std::sort(row.begin(), row.end());
    double norm = 0.0;
    for (const auto& [c, w] : row) norm += w * w;
    norm = std::sqrt(norm);
    idx.clear();
    val.clear();
    for (const auto& [c, w] : row) {
      idx.push_back(c);
      val.push_back(w / norm);
    }
    if (row.empty()) ++ds.empty_content_items;
    ds.content.push_row(idx, val);
  }
  return ds;
}

}  // namespace hashcf
