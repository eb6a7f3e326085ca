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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hashcf/binary_io.hpp"
#include "hashcf/corpus.hpp"
#include "hashcf/split.hpp"

namespace hashcf {

namespace fs = std::filesystem;
using nlohmann::json;

inline void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << doc.dump(2) << '\n';
}

inline json read_json(const fs::path& path) {
  io::require_file(path);
  std::ifstream in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error("malformed json in " + path.string() + ": " + e.what());
  }
}

inline void write_triples(const fs::path& path, std::span<const Rating> ratings) {
  io::LeWriter w(path);
  w.put_bytes("HCFR");
  w.put<std::uint32_t>(1);
  w.put<std::uint64_t>(ratings.size());
  for (const auto& r : ratings) {
    w.put(r.user);
    w.put(r.item);
    w.put(r.value);
  }
  w.close();
}

inline std::vector<Rating> read_triples(const fs::path& path) {
  io::LeReader r(path);
  r.expect_magic("HCFR");
  if (r.get<std::uint32_t>() != 1) throw Error("unsupported version: " + path.string());
  const auto n = r.get<std::uint64_t>();
  std::vector<Rating> out(n);
  for (auto& t : out) {
    t.user = r.get<std::uint32_t>();
    t.item = r.get<std::uint32_t>();
    t.value = r.get<double>();
  }
  return out;
}

inline void write_content(const fs::path& path, const SparseRows& m) {
  io::LeWriter w(path);
  w.put_bytes("HCFC");
  w.put<std::uint32_t>(1);
  w.put<std::uint64_t>(m.rows());
  w.put<std::uint64_t>(m.cols);
  w.put<std::uint64_t>(m.nnz());
  for (auto o : m.offsets) w.put(o);
  for (auto c : m.indices) w.put(c);
  for (auto v : m.values) w.put(v);
  w.close();
}

inline SparseRows read_content(const fs::path& path) {
  io::LeReader r(path);
  r.expect_magic("HCFC");
  if (r.get<std::uint32_t>() != 1) throw Error("unsupported version: " + path.string());
  SparseRows m;
  const auto rows = r.get<std::uint64_t>();
  m.cols = r.get<std::uint64_t>();
  const auto nnz = r.get<std::uint64_t>();
  m.offsets.resize(rows + 1);
  for (auto& o : m.offsets) o = r.get<std::uint64_t>();
  m.indices.resize(nnz);
  for (auto& c : m.indices) c = r.get<std::uint32_t>();
  m.values.resize(nnz);
  for (auto& v : m.values) v = r.get<double>();
  if (m.offsets.back() != nnz) throw Error("inconsistent row offsets: " + path.string());
  return m;
}

namespace detail {

inline void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  for (const auto& l : lines) out << l << '\n';
}

inline std::vector<std::string> read_lines(const fs::path& path) {
  io::require_file(path);
  std::ifstream in(path, std::ios::binary);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace detail

// Dataset directory: ratings.bin, content.bin, vocab.txt, users.txt,
// items.txt and manifest.json. `extra` is merged into the manifest.
inline void write_dataset(const fs::path& dir, const Dataset& ds, const json& extra = json::object()) {
  fs::create_directories(dir);
  write_triples(dir / "ratings.bin", ds.ratings);
  write_content(dir / "content.bin", ds.content);
  std::vector<std::string> vocab;
  vocab.reserve(ds.vocabulary.size());
  for (const auto& v : ds.vocabulary) {
    vocab.push_back(v.word + "\t" + std::to_string(v.document_frequency) + "\t" +
                    detail::format_double(v.idf));
  }
  detail::write_lines(dir / "vocab.txt", vocab);
  detail::write_lines(dir / "users.txt", ds.user_ids);
  detail::write_lines(dir / "items.txt", ds.item_ids);
  json manifest = extra;
  manifest["num_users"] = ds.num_users();
  manifest["num_items"] = ds.num_items();
  manifest["num_ratings"] = ds.ratings.size();
  manifest["vocab_size"] = ds.vocab_size();
  manifest["max_rating"] = ds.max_rating;
  manifest["empty_content_items"] = ds.empty_content_items;
  write_json(dir / "manifest.json", manifest);
}

inline Dataset read_dataset(const fs::path& dir) {
  const json manifest = read_json(dir / "manifest.json");
  Dataset ds;
  ds.ratings = read_triples(dir / "ratings.bin");
  ds.content = read_content(dir / "content.bin");
  ds.user_ids = detail::read_lines(dir / "users.txt");
  ds.item_ids = detail::read_lines(dir / "items.txt");
  for (const auto& line : detail::read_lines(dir / "vocab.txt")) {
    std::istringstream ls(line);
    VocabEntry v;
    std::string idf;
    std::getline(ls, v.word, '\t');
    ls >> v.document_frequency >> idf;
    v.idf = std::stod(idf);
    ds.vocabulary.push_back(std::move(v));
  }
  ds.max_rating = manifest.at("max_rating").get<double>();
  ds.empty_content_items = manifest.value("empty_content_items", std::size_t{0});
  if (ds.content.rows() != ds.num_items() || ds.content.cols != ds.vocab_size()) {
    throw Error("content matrix does not match item/vocabulary counts in " + dir.string());
  }
  return ds;
}

inline void write_split(const fs::path& dir, const Split& split, const json& extra = json::object()) {
  fs::create_directories(dir);
  write_triples(dir / "train.bin", split.train);
  write_triples(dir / "validation.bin", split.validation);
  write_triples(dir / "test.bin", split.test);
  json manifest = extra;
  manifest["kind"] = to_string(split.kind);
  manifest["seed"] = split.seed;
  manifest["train_fraction"] = split.train_fraction;
  manifest["test_ratio"] = split.test_ratio;
  manifest["val_fraction"] = split.val_fraction;
  manifest["num_train"] = split.train.size();
  manifest["num_validation"] = split.validation.size();
  manifest["num_test"] = split.test.size();
  write_json(dir / "manifest.json", manifest);
}

inline Split read_split(const fs::path& dir) {
  const json manifest = read_json(dir / "manifest.json");
  Split split;
  const auto kind = manifest.at("kind").get<std::string>();
  if (kind == "in_matrix") {
    split.kind = SplitKind::kInMatrix;
  } else if (kind == "out_of_matrix") {
    split.kind = SplitKind::kOutOfMatrix;
  } else {
    throw Error("unknown split kind '" + kind + "' in " + dir.string());
  }
  split.seed = manifest.at("seed").get<std::uint64_t>();
  split.train_fraction = manifest.value("train_fraction", 0.0);
  split.test_ratio = manifest.value("test_ratio", 0.0);
  split.val_fraction = manifest.value("val_fraction", 0.0);
  split.train = read_triples(dir / "train.bin");
  split.validation = read_triples(dir / "validation.bin");
  split.test = read_triples(dir / "test.bin");
  if (split.kind == SplitKind::kOutOfMatrix) {
    auto items_of = [](const std::vector<Rating>& rs) {
      std::set<std::uint32_t> s;
      for (const auto& r : rs) s.insert(r.item);
      return std::vector<std::uint32_t>(s.begin(), s.end());
    };
    split.train_items = items_of(split.train);
    split.validation_items = items_of(split.validation);
    split.test_items = items_of(split.test);
  }
  return split;
}

}  // namespace hashcf
