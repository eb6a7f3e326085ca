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

// Command-line driver: preprocess, split, train, infer, eval, bench, pipeline.

#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <CLI11.hpp>

#include "hashcf/hashcf.hpp"

namespace {

struct Flags {
  std::string config_file;
  std::vector<std::string> assignments;
  std::optional<std::string> out, input, format, synthetic, variant, split_kind, items;
  std::optional<long long> seed, m, threads, epochs, users, repetitions;
  std::optional<double> train_fraction;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_file, "key = value config file");
  cmd->add_option("--set", f.assignments, "override a config key (key=value), repeatable");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "global seed");
  cmd->add_option("--threads", f.threads, "worker cap; 1 is bit-exact");
}

void add_data(CLI::App* cmd, Flags& f) {
  cmd->add_option("--input", f.input, "ratings file (user, item, rating, timestamp[, review])");
  cmd->add_option("--format", f.format, "tsv or csv");
  cmd->add_option("--synthetic", f.synthetic, "generator spec, e.g. \"users=2000 items=1000\"");
}

void add_model(CLI::App* cmd, Flags& f) {
  cmd->add_option("--variant", f.variant, "content_aware or no_content");
  cmd->add_option("--m", f.m, "code length in bits");
  cmd->add_option("--epochs", f.epochs, "maximum training epochs");
}

void add_split(CLI::App* cmd, Flags& f) {
  cmd->add_option("--split-kind", f.split_kind, "in_matrix or out_of_matrix");
  cmd->add_option("--train-fraction", f.train_fraction, "cold-start training item fraction");
}

hashcf::RunConfig build_config(const Flags& f, bool bench_cmd) {
  hashcf::RunConfig c;
  if (!f.config_file.empty()) c.load_file(f.config_file);
  for (const auto& a : f.assignments) c.set_assignment(a);
  auto put = [&](const char* key, const auto& v) {
    if (!v) return;
    if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, std::string>) {
      c.set(key, *v);
    } else {
      std::ostringstream ss;
      ss.precision(17);
      ss << *v;
      c.set(key, ss.str());
    }
  };
  put("out", f.out);
  put("seed", f.seed);
  put("threads", f.threads);
  put("input", f.input);
  put("format", f.format);
  put("synthetic", f.synthetic);
  put("variant", f.variant);
  put("split_kind", f.split_kind);
  put("train_fraction", f.train_fraction);
  put("max_epochs", f.epochs);
  if (bench_cmd) {
    put("bench_m", f.m);
    put("bench_users", f.users);
    put("bench_items", f.items);
    put("bench_repetitions", f.repetitions);
  } else {
    put("m", f.m);
  }
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hash codes for collaborative filtering with cold-start items"};
  app.require_subcommand(1, 1);
  Flags flags;

  auto* preprocess = app.add_subcommand("preprocess", "filter ratings and build TF-IDF content");
  add_common(preprocess, flags);
  add_data(preprocess, flags);

  auto* split = app.add_subcommand("split", "build an in-matrix or out-of-matrix split");
  add_common(split, flags);
  add_split(split, flags);

  auto* train = app.add_subcommand("train", "train the hashing model");
  add_common(train, flags);
  add_model(train, flags);

  auto* infer = app.add_subcommand("infer", "compute user and item hash codes");
  add_common(infer, flags);

  auto* eval = app.add_subcommand("eval", "rank test items by Hamming distance and score them");
  add_common(eval, flags);

  auto* bench = app.add_subcommand("bench", "time Hamming against float inner-product scans");
  add_common(bench, flags);
  bench->add_option("--users", flags.users, "number of users");
  bench->add_option("--items", flags.items, "item counts, comma separated");
  bench->add_option("--m", flags.m, "code length in bits");
  bench->add_option("--repetitions", flags.repetitions, "timed repetitions");

  auto* pipeline = app.add_subcommand("pipeline", "run every stage in order");
  add_common(pipeline, flags);
  add_data(pipeline, flags);
  add_split(pipeline, flags);
  add_model(pipeline, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(hashcf::ExitCode::kUsage);
  }

  namespace pl = hashcf::pipeline;
  try {
    const auto config = build_config(flags, bench->parsed());
    if (preprocess->parsed()) pl::run_preprocess(config);
    else if (split->parsed()) pl::run_split(config);
    else if (train->parsed()) pl::run_train(config);
    else if (infer->parsed()) pl::run_infer(config);
    else if (eval->parsed()) pl::run_eval(config);
    else if (bench->parsed()) pl::run_bench(config);
    else if (pipeline->parsed()) pl::run_pipeline(config);
  } catch (const hashcf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(hashcf::ExitCode::kData);
  }
  return 0;
}
