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

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hashcf/error.hpp"
#include "hashcf/model.hpp"
#include "hashcf/split.hpp"
#include "hashcf/synthetic.hpp"
#include "hashcf/trainer.hpp"

namespace hashcf {

// Run configuration as an ordered key-value document. Files hold one
// `key = value` per line with `#` comments; later assignments win. Every
// key has a default, and unknown keys are rejected.
class RunConfig {
 public:
  RunConfig() {
    values_ = {
        {"out", "run"},
        {"seed", "0"},
        {"threads", "1"},
        {"input", ""},
        {"format", "tsv"},
        {"synthetic", ""},
        {"min_user", "20"},
        {"min_item", "20"},
        {"vocab_size", "8000"},
        {"split_kind", "in_matrix"},
        {"test_ratio", "0.5"},
        {"val_fraction", "0.15"},
        {"train_fraction", "0.5"},
        {"variant", "content_aware"},
        {"m", "32"},
        {"hidden1", "1000"},
        {"hidden2", "1000"},
        {"learning_rate", "0.0005"},
        {"batch_size", "2000"},
        {"max_epochs", "30"},
        {"alpha", "0.001"},
        {"noise_var_init", "1"},
        {"noise_decay", "0.9999"},
        {"adam_beta1", "0.9"},
        {"adam_beta2", "0.999"},
        {"adam_epsilon", "1e-8"},
        {"kl_weight", "1"},
        {"eval_every", "1"},
        {"ks", "2,6,10"},
        {"series_window", "1000"},
        {"bench_users", "1000"},
        {"bench_items", "1000,10000,100000"},
        {"bench_m", "64"},
        {"bench_repetitions", "10"},
        {"bench_memory_mb", "4096"},
    };
  }

  bool has(const std::string& key) const { return values_.contains(key); }

  void set(const std::string& key, const std::string& value) {
    if (!has(key)) throw ConfigError("unknown config key '" + key + "'");
    values_[key] = value;
  }

  // Parses "key=value".
  void set_assignment(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
  }

  void load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.find('=') == std::string::npos) {
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
      }
      set_assignment(line);
    }
  }

  const std::string& str(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
  }

  double real(const std::string& key) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(str(key), &used);
      if (used != str(key).size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' is not a number: '" + str(key) + "'");
    }
  }

  long long integer(const std::string& key) const {
    const auto& s = str(key);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ConfigError("config key '" + key + "' is not an integer: '" + s + "'");
    }
    return v;
  }

  std::vector<long long> integer_list(const std::string& key) const {
    std::vector<long long> out;
    std::stringstream ss(str(key));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      long long v = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ConfigError("config key '" + key + "' must be a comma-separated integer list");
      }
      out.push_back(v);
    }
    return out;
  }

  std::filesystem::path out_dir() const { return str("out"); }
  std::uint64_t seed() const { return static_cast<std::uint64_t>(integer("seed")); }
  int threads() const { return static_cast<int>(integer("threads")); }

  Variant variant() const {
    const auto& v = str("variant");
    if (v == "content_aware") return Variant::kContentAware;
    if (v == "no_content") return Variant::kNoContent;
    throw ConfigError("variant must be content_aware or no_content, got '" + v + "'");
  }

  SplitKind split_kind() const {
    const auto& v = str("split_kind");
    if (v == "in_matrix") return SplitKind::kInMatrix;
    if (v == "out_of_matrix") return SplitKind::kOutOfMatrix;
    throw ConfigError("split_kind must be in_matrix or out_of_matrix, got '" + v + "'");
  }

  RatingFormat format() const {
    const auto& v = str("format");
    if (v == "tsv") return RatingFormat::kTsv;
    if (v == "csv") return RatingFormat::kCsv;
    throw ConfigError("format must be tsv or csv, got '" + v + "'");
  }

  TrainConfig train_config() const {
    TrainConfig c;
    c.learning_rate = real("learning_rate");
    c.batch_size = static_cast<std::size_t>(integer("batch_size"));
    c.max_epochs = static_cast<int>(integer("max_epochs"));
    c.alpha = real("alpha");
    c.noise_var_init = real("noise_var_init");
    c.noise_decay = real("noise_decay");
    c.adam_beta1 = real("adam_beta1");
    c.adam_beta2 = real("adam_beta2");
    c.adam_epsilon = real("adam_epsilon");
    c.kl_weight = real("kl_weight");
    c.eval_every = static_cast<int>(integer("eval_every"));
    c.seed = seed();
    c.threads = threads();
    return c;
  }

  // "users=U items=I [vocab=V topics=T ratings_per_user=R words_per_item=W]"
  SyntheticConfig synthetic_config() const {
    SyntheticConfig c;
    c.seed = Rng::mix(seed(), 100);
    std::stringstream ss(str("synthetic"));
    std::string tok;
    while (ss >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw ConfigError("synthetic spec entries are key=value: " + tok);
      const std::string k = tok.substr(0, eq);
      std::size_t v = 0;
      try {
        v = std::stoull(tok.substr(eq + 1));
      } catch (const std::exception&) {
        throw ConfigError("synthetic value is not an integer: " + tok);
      }
      if (k == "users") c.users = v;
      else if (k == "items") c.items = v;
      else if (k == "vocab") c.vocab = v;
      else if (k == "topics") c.topics = v;
      else if (k == "ratings_per_user") c.ratings_per_user = v;
      else if (k == "words_per_item") c.words_per_item = v;
      else throw ConfigError("unknown synthetic key '" + k + "'");
    }
    return c;
  }

  // Cross-key checks, run before any stage does work.
  void validate() const {
    (void)variant();
    (void)split_kind();
    (void)format();
    const int m = static_cast<int>(integer("m"));
    if (m < 1 || m > kMaxCodeBits) throw ConfigError("m must lie in [1, 512]");
    if (integer("hidden1") < 1 || integer("hidden2") < 1) throw ConfigError("hidden sizes must be >= 1");
    if (integer("min_user") < 1 || integer("min_item") < 1) throw ConfigError("core sizes must be >= 1");
    if (integer("vocab_size") < 1) throw ConfigError("vocab_size must be >= 1");
    if (threads() < 1) throw ConfigError("threads must be >= 1");
    if (integer("series_window") < 1) throw ConfigError("series_window must be >= 1");
    for (auto k : integer_list("ks")) {
      if (k < 1) throw ConfigError("ks entries must be >= 1");
    }
    try {
      train_config().validate();
    } catch (const ArgumentError& e) {
      throw ConfigError(e.what());
    }
    const double f = real("train_fraction");
    if (!(f > 0.0 && f < 1.0)) throw ConfigError("train_fraction must lie in (0, 1)");
    if (variant() == Variant::kNoContent && split_kind() == SplitKind::kOutOfMatrix) {
      throw ConfigError(
          "no_content variant cannot infer codes for cold-start items; use in_matrix");
    }
    if (!str("synthetic").empty()) (void)synthetic_config();
  }

  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : values_) j[k] = v;
    return j;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
};

}  // namespace hashcf
