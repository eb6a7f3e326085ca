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
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hashcf/error.hpp"

namespace hashcf {

struct RatingEvent {
  std::string user_id;
  std::string item_id;
  double rating = 0.0;
  std::int64_t timestamp = 0;
  std::optional<std::string> review_text;
};

// One explicit rating over dense ids.
struct Rating {
  std::uint32_t user = 0;
  std::uint32_t item = 0;
  double value = 0.0;

  friend bool operator==(const Rating&, const Rating&) = default;
};

// Row-compressed sparse matrix, one row per item.
struct SparseRows {
  std::vector<std::uint64_t> offsets{0};
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  std::size_t cols = 0;

  std::size_t rows() const { return offsets.size() - 1; }
  std::size_t nnz() const { return indices.size(); }

  std::span<const std::uint32_t> row_indices(std::size_t r) const {
    return {indices.data() + offsets[r], indices.data() + offsets[r + 1]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {values.data() + offsets[r], values.data() + offsets[r + 1]};
  }

  // Appends a row; entries must be sorted by column.
  void push_row(std::span<const std::uint32_t> idx, std::span<const double> val) {
    indices.insert(indices.end(), idx.begin(), idx.end());
    values.insert(values.end(), val.begin(), val.end());
    offsets.push_back(indices.size());
  }

  friend bool operator==(const SparseRows&, const SparseRows&) = default;
};

struct VocabEntry {
  std::string word;
  std::uint32_t document_frequency = 0;
  double idf = 0.0;

  friend bool operator==(const VocabEntry&, const VocabEntry&) = default;
};

struct Dataset {
  // Dense id -> raw id. Raw ids are sorted, so dense ids are reproducible.
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  // Sorted by (user, item).
  std::vector<Rating> ratings;
  SparseRows content;
  std::vector<VocabEntry> vocabulary;
  double max_rating = 0.0;
  std::size_t empty_content_items = 0;

  std::size_t num_users() const { return user_ids.size(); }
  std::size_t num_items() const { return item_ids.size(); }
  std::size_t vocab_size() const { return vocabulary.size(); }
  bool has_content() const { return content.rows() == num_items() && num_items() > 0; }
};

enum class RatingFormat { kTsv, kCsv };

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits delimited text into records. Quoted fields may hold delimiters,
// newlines and doubled quotes. Each record remembers its first line number.
struct Record {
  std::vector<std::string> fields;
  std::vector<bool> quoted;
  std::size_t line = 0;
};

inline std::vector<Record> split_records(std::string_view text, char delim) {
  std::vector<Record> records;
  Record current;
  std::string field;
  bool in_quotes = false;
  bool field_quoted = false;
  bool record_has_content = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(field);
    current.quoted.push_back(field_quoted);
    field.clear();
    field_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    if (record_has_content) records.push_back(std::move(current));
    current = Record{};
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && trim(field).empty()) {
      field.clear();
      in_quotes = true;
      field_quoted = true;
      record_has_content = true;
    } else if (c == delim) {
      end_field();
      record_has_content = true;
    } else if (c == '\n') {
      end_record();
      ++line;
      current.line = line;
    } else {
      if (c != '\r' && c != ' ') record_has_content = true;
      field.push_back(c);
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field", current.line);
  end_record();
  return records;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

}  // namespace detail

// Parses rating rows: user_id, item_id, rating, timestamp[, review_text].
// A leading header row whose rating column reads "rating" is skipped.
inline std::vector<RatingEvent> parse_ratings(std::string_view text, RatingFormat format) {
  const char delim = format == RatingFormat::kTsv ? '\t' : ',';
  std::vector<detail::Record> records = detail::split_records(text, delim);
  std::vector<RatingEvent> events;
  events.reserve(records.size());
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() < 4 || rec.fields.size() > 5) {
      throw ParseError("expected 4 or 5 fields, got " + std::to_string(rec.fields.size()),
                       rec.line);
    }
    if (r == 0 && detail::trim(rec.fields[2]) == "rating") continue;
    RatingEvent ev;
    ev.user_id = std::string(detail::trim(rec.fields[0]));
    ev.item_id = std::string(detail::trim(rec.fields[1]));
    if (ev.user_id.empty() || ev.item_id.empty()) {
      throw ParseError("empty user or item id", rec.line);
    }
    auto rating = detail::parse_number<double>(rec.fields[2]);
    if (!rating || !std::isfinite(*rating) || *rating <= 0.0) {
      throw ParseError("invalid rating '" + rec.fields[2] + "'", rec.line);
    }
    ev.rating = *rating;
    auto ts = detail::parse_number<std::int64_t>(rec.fields[3]);
    if (!ts) throw ParseError("invalid timestamp '" + rec.fields[3] + "'", rec.line);
    ev.timestamp = *ts;
    if (rec.fields.size() == 5) ev.review_text = rec.fields[4];
    events.push_back(std::move(ev));
  }
  if (events.empty()) throw EmptyInputError("no rating rows in input");
  return events;
}

inline std::vector<RatingEvent> load_ratings(const std::filesystem::path& path,
                                             RatingFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StageError("missing ratings file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_ratings(buffer.str(), format);
}

// Keeps only the latest event per (user, item). Equal timestamps: the later
// row wins. Survivors keep their relative input order.
inline std::vector<RatingEvent> deduplicate(std::vector<RatingEvent> events) {
  std::unordered_map<std::string, std::size_t> latest;
  latest.reserve(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    std::string key = events[i].user_id;
    key.push_back('\x1f');
    key += events[i].item_id;
    auto [it, inserted] = latest.try_emplace(std::move(key), i);
    if (!inserted && events[i].timestamp >= events[it->second].timestamp) it->second = i;
  }
  std::vector<char> keep(events.size(), 0);
  for (const auto& [key, idx] : latest) keep[idx] = 1;
  std::vector<RatingEvent> out;
  out.reserve(latest.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (keep[i]) out.push_back(std::move(events[i]));
  }
  return out;
}

// Iteratively drops users with fewer than min_user ratings and items with
// fewer than min_item ratings until neither rule removes anything.
inline Dataset core_filter(std::span<const RatingEvent> events, int min_user = 20,
                           int min_item = 20) {
  std::unordered_map<std::string, std::uint32_t> user_tmp, item_tmp;
  std::vector<std::string> user_names, item_names;
  struct Edge {
    std::uint32_t user, item;
    double value;
  };
  std::vector<Edge> edges;
  edges.reserve(events.size());
  for (const auto& ev : events) {
    auto [u, new_u] = user_tmp.try_emplace(ev.user_id, user_names.size());
    if (new_u) user_names.push_back(ev.user_id);
    auto [i, new_i] = item_tmp.try_emplace(ev.item_id, item_names.size());
    if (new_i) item_names.push_back(ev.item_id);
    edges.push_back({u->second, i->second, ev.rating});
  }
  {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(edges.size());
    for (const auto& e : edges) pairs.emplace_back(e.user, e.item);
    std::sort(pairs.begin(), pairs.end());
    if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end()) {
      throw ArgumentError("core_filter requires deduplicated events");
    }
  }

  std::vector<char> user_alive(user_names.size(), 1), item_alive(item_names.size(), 1);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> user_count(user_names.size(), 0), item_count(item_names.size(), 0);
    for (const auto& e : edges) {
      if (user_alive[e.user] && item_alive[e.item]) {
        ++user_count[e.user];
        ++item_count[e.item];
      }
    }
    for (std::size_t u = 0; u < user_alive.size(); ++u) {
      if (user_alive[u] && user_count[u] < min_user) {
        user_alive[u] = 0;
        changed = true;
      }
    }
    for (std::size_t i = 0; i < item_alive.size(); ++i) {
      if (item_alive[i] && item_count[i] < min_item) {
        item_alive[i] = 0;
        changed = true;
      }
    }
  }

  Dataset ds;
  for (std::size_t u = 0; u < user_names.size(); ++u) {
    if (user_alive[u]) ds.user_ids.push_back(user_names[u]);
  }
  for (std::size_t i = 0; i < item_names.size(); ++i) {
    if (item_alive[i]) ds.item_ids.push_back(item_names[i]);
  }
  std::sort(ds.user_ids.begin(), ds.user_ids.end());
  std::sort(ds.item_ids.begin(), ds.item_ids.end());
  std::vector<std::uint32_t> user_dense(user_names.size()), item_dense(item_names.size());
  for (std::size_t u = 0; u < user_names.size(); ++u) {
    if (!user_alive[u]) continue;
    user_dense[u] = static_cast<std::uint32_t>(
        std::lower_bound(ds.user_ids.begin(), ds.user_ids.end(), user_names[u]) -
        ds.user_ids.begin());
  }
  for (std::size_t i = 0; i < item_names.size(); ++i) {
    if (!item_alive[i]) continue;
    item_dense[i] = static_cast<std::uint32_t>(
        std::lower_bound(ds.item_ids.begin(), ds.item_ids.end(), item_names[i]) -
        ds.item_ids.begin());
  }
  for (const auto& e : edges) {
    if (user_alive[e.user] && item_alive[e.item]) {
      ds.ratings.push_back({user_dense[e.user], item_dense[e.item], e.value});
      ds.max_rating = std::max(ds.max_rating, e.value);
    }
  }
  if (ds.ratings.empty()) {
    throw EmptyAfterFilterError("no ratings survive the " + std::to_string(min_user) + "/" +
                                std::to_string(min_item) + "-core filter");
  }
  std::sort(ds.ratings.begin(), ds.ratings.end(), [](const Rating& a, const Rating& b) {
    return std::tie(a.user, a.item) < std::tie(b.user, b.item);
  });
  return ds;
}

// Rating count per item over the given ratings.
inline std::vector<std::uint32_t> item_counts(std::span<const Rating> ratings,
                                              std::size_t num_items) {
  std::vector<std::uint32_t> counts(num_items, 0);
  for (const auto& r : ratings) ++counts[r.item];
  return counts;
}

}  // namespace hashcf
