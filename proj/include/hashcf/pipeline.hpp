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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hashcf/bench.hpp"
#include "hashcf/checkpoint.hpp"
#include "hashcf/config.hpp"
#include "hashcf/corpus.hpp"
#include "hashcf/dataset_io.hpp"
#include "hashcf/eval.hpp"
#include "hashcf/split.hpp"
#include "hashcf/synthetic.hpp"
#include "hashcf/text.hpp"
#include "hashcf/trainer.hpp"

namespace hashcf::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

// Stage directories under the run's output root.
struct Layout {
  fs::path root;
  fs::path raw() const { return root / "raw"; }
  fs::path dataset() const { return root / "dataset"; }
  fs::path split() const { return root / "split"; }
  fs::path model() const { return root / "model"; }
  fs::path codes() const { return root / "codes"; }
  fs::path eval() const { return root / "eval"; }
  fs::path bench() const { return root / "bench"; }
};

inline json stage_manifest(const RunConfig& config, const std::string& stage) {
  json j;
  j["stage"] = stage;
  j["config"] = config.to_json();
  j["seed"] = config.seed();
  return j;
}

inline std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline void log(const std::string& msg) { std::cerr << "[hashcf] " << msg << '\n'; }

// Without an input file the synthetic generator supplies the ratings.
inline Dataset run_preprocess(const RunConfig& config) {
  const Layout layout{config.out_dir()};
  std::vector<RatingEvent> events;
  if (config.str("input").empty()) {
    fs::create_directories(layout.raw());
    const auto path = layout.raw() / "ratings.tsv";
    write_ratings_tsv(path, generate_synthetic(config.synthetic_config()));
    events = load_ratings(path, RatingFormat::kTsv);
  } else {
    events = load_ratings(config.str("input"), config.format());
  }
  const std::size_t raw_events = events.size();
  events = deduplicate(std::move(events));
  Dataset ds = core_filter(events, static_cast<int>(config.integer("min_user")),
                           static_cast<int>(config.integer("min_item")));
  ContentOptions options;
  options.vocab_size = static_cast<std::size_t>(config.integer("vocab_size"));
  ds = build_content(std::move(ds), events, options);
  if (ds.empty_content_items > 0) {
    log("warning: " + std::to_string(ds.empty_content_items) + " items have empty content");
  }

  json manifest = stage_manifest(config, "preprocess");
  manifest["raw_events"] = raw_events;
  manifest["deduplicated_events"] = events.size();
  manifest["stopwords_count"] = options.stopwords.size();
  manifest["stopwords_fnv1a64"] = hex64(stopword_fingerprint(options.stopwords));
  manifest["tokenizer"] = "lowercase ascii, split on non-alphanumeric, drop tokens shorter than 2";
  manifest["tfidf"] = "relative tf * (ln((1+N)/(1+df)) + 1), rows L2-normalized";
  write_dataset(layout.dataset(), ds, manifest);
  log("dataset: " + std::to_string(ds.num_users()) + " users, " + std::to_string(ds.num_items()) +
      " items, " + std::to_string(ds.ratings.size()) + " ratings, vocab " +
      std::to_string(ds.vocab_size()));
  return ds;
}

inline Split run_split(const RunConfig& config) {
  const Layout layout{config.out_dir()};
  const Dataset ds = read_dataset(layout.dataset());
  Split split;
  if (config.split_kind() == SplitKind::kInMatrix) {
    split = split_in_matrix(ds, config.real("test_ratio"), config.real("val_fraction"), config.seed());
  } else {
    split = split_out_of_matrix(ds, config.real("train_fraction"), config.real("val_fraction"),
                                config.seed());
  }
  write_split(layout.split(), split, stage_manifest(config, "split"));
  log("split " + to_string(split.kind) + ": " + std::to_string(split.train.size()) + " train, " +
      std::to_string(split.validation.size()) + " validation, " +
      std::to_string(split.test.size()) + " test");
  return split;
}

inline TrainResult run_train(const RunConfig& config) {
  const Layout layout{config.out_dir()};
  io::require_file(layout.split() / "manifest.json");
  const Dataset ds = read_dataset(layout.dataset());
  const Split split = read_split(layout.split());
  const TrainConfig tc = config.train_config();
  const ModelShape shape =
      shape_for(ds, static_cast<int>(config.integer("m")), static_cast<int>(config.integer("hidden1")),
                static_cast<int>(config.integer("hidden2")), config.variant());
  TrainResult result = train(split, ds, tc, shape);

  fs::create_directories(layout.model());
  Checkpoint ck;
  ck.params = result.params;
  ck.hyper.alpha = tc.alpha;
  ck.hyper.noise_var = result.final_sigma2;
  ck.hyper.anneal_factor = tc.noise_decay;
  ck.hyper.kl_weight = tc.kl_weight;
  ck.seed = tc.seed;
  ck.batches_seen = result.batches;
  ck.epoch = result.history.best_epoch < 0 ? result.history.epochs.size()
                                           : static_cast<std::uint64_t>(result.history.best_epoch);
  write_checkpoint(layout.model() / "checkpoint.bin", ck);
  write_history_csv(layout.model() / "history.csv", result.history);
  json manifest = stage_manifest(config, "train");
  manifest["best_epoch"] = result.history.best_epoch;
  manifest["best_val_ndcg10"] =
      std::isnan(result.history.best_val_ndcg10) ? json(nullptr) : json(result.history.best_val_ndcg10);
  manifest["batches"] = result.batches;
  manifest["final_sigma2"] = result.final_sigma2;
  manifest["aborted"] = result.aborted;
  manifest["init"] =
      "encoder weights uniform +-sqrt(6/(fan_in+fan_out)); embeddings N(0, 0.01^2); w_imp 1; "
      "biases 0";
  write_json(layout.model() / "manifest.json", manifest);
  if (result.aborted) throw NumericError(result.error, static_cast<long>(result.batches));
  log("trained " + std::to_string(result.history.epochs.size()) + " epochs, best epoch " +
      std::to_string(result.history.best_epoch));
  return result;
}

inline CodeBook run_infer(const RunConfig& config) {
  const Layout layout{config.out_dir()};
  io::require_file(layout.model() / "checkpoint.bin");
  const Dataset ds = read_dataset(layout.dataset());
  const Checkpoint ck = read_checkpoint(layout.model() / "checkpoint.bin");
  const CodeBook book = infer_codes(ck.params, ds, config.threads());
  fs::create_directories(layout.codes());
  write_codebook(layout.codes() / "codebook.bin", book);
  json manifest = stage_manifest(config, "infer");
  manifest["m"] = book.bits();
  manifest["num_users"] = book.num_users();
  manifest["num_items"] = book.num_items();
  write_json(layout.codes() / "manifest.json", manifest);
  return book;
}

inline MetricsReport run_eval(const RunConfig& config) {
  const Layout layout{config.out_dir()};
  io::require_file(layout.codes() / "codebook.bin");
  const Dataset ds = read_dataset(layout.dataset());
  const Split split = read_split(layout.split());
  const CodeBook book = read_codebook(layout.codes() / "codebook.bin");
  std::vector<int> ks;
  for (auto k : config.integer_list("ks")) ks.push_back(static_cast<int>(k));
  if (std::find(ks.begin(), ks.end(), 10) == ks.end()) ks.push_back(10);
  const MetricsReport report = evaluate(book, split, ds, ks, EvalTarget::kTest, config.threads());

  fs::create_directories(layout.eval());
  std::string split_name = to_string(split.kind);
  if (split.kind == SplitKind::kOutOfMatrix) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "_%.2f", split.train_fraction);
    split_name += buf;
  }
  write_metrics_csv(layout.eval() / "metrics.csv", report, config.str("variant"), split_name,
                    book.bits());
  const auto window = static_cast<std::size_t>(config.integer("series_window"));
  for (auto key : {SeriesKey::kAvgItemPopularity, SeriesKey::kNumItems}) {
    write_series_csv(layout.eval() / ("series_" + to_string(key) + ".csv"),
                     user_series(report, key, window));
  }
  json manifest = stage_manifest(config, "eval");
  manifest["evaluated_users"] = report.per_user.size();
  manifest["skipped_users"] = report.skipped_users;
  manifest["random_ndcg10"] = random_ranking_ndcg(split, 10);
  write_json(layout.eval() / "manifest.json", manifest);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "NDCG@10 %.4f  MRR %.4f  (random NDCG@10 %.4f)",
                report.ndcg_at(10), report.mrr, random_ranking_ndcg(split, 10));
  log(buf);
  return report;
}

inline std::vector<BenchReport> run_bench(const RunConfig& config) {
  const Layout layout{config.out_dir()};
  std::vector<BenchReport> reports;
  for (auto items : config.integer_list("bench_items")) {
    BenchOptions o;
    o.num_users = static_cast<std::size_t>(config.integer("bench_users"));
    o.num_items = static_cast<std::size_t>(items);
    o.m = static_cast<int>(config.integer("bench_m"));
    o.repetitions = static_cast<int>(config.integer("bench_repetitions"));
    o.seed = config.seed();
    o.memory_budget_bytes = static_cast<std::size_t>(config.integer("bench_memory_mb")) << 20;
    o.threads = config.threads();
    reports.push_back(bench(o));
    char buf[160];
    std::snprintf(buf, sizeof(buf), "bench %zu x %zu, m=%d: hamming %.4fs, inner %.4fs, x%.1f",
                  o.num_users, o.num_items, o.m, reports.back().hamming_seconds,
                  reports.back().inner_seconds, reports.back().speedup);
    log(buf);
  }
  fs::create_directories(layout.bench());
  std::ofstream out(layout.bench() / "bench.csv", std::ios::trunc);
  out << bench_csv_header() << '\n';
  for (const auto& r : reports) out << bench_csv_row(r) << '\n';
  json manifest = stage_manifest(config, "bench");
  manifest["num_users"] = config.integer("bench_users");
  manifest["repetitions"] = config.integer("bench_repetitions");
  write_json(layout.bench() / "manifest.json", manifest);
  return reports;
}

inline void run_pipeline(const RunConfig& config) {
  run_preprocess(config);
  run_split(config);
  run_train(config);
  run_infer(config);
  run_eval(config);
  run_bench(config);
}

}  // namespace hashcf::pipeline
