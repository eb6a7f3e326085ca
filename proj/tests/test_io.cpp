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

#include <filesystem>
#include <fstream>

#include "hashcf/checkpoint.hpp"
#include "hashcf/dataset_io.hpp"
#include "hashcf/synthetic.hpp"
#include "hashcf/text.hpp"

using namespace hashcf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(HASHCF_TEST_TMP) / "io" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Dataset small_dataset() {
  SyntheticConfig sc;
  sc.users = 120;
  sc.items = 80;
  sc.vocab = 60;
  sc.ratings_per_user = 25;
  sc.seed = 3;
  const auto events = deduplicate(generate_synthetic(sc));
  ContentOptions opt;
  opt.vocab_size = 50;
  return build_content(core_filter(events, 5, 5), events, opt);
}

}  // namespace

TEST(DatasetIo, RoundTrip) {
  const Dataset ds = small_dataset();
  const fs::path dir = scratch("dataset");
  write_dataset(dir, ds, {{"note", "kept"}});
  const Dataset back = read_dataset(dir);
  EXPECT_EQ(back.user_ids, ds.user_ids);
  EXPECT_EQ(back.item_ids, ds.item_ids);
  EXPECT_EQ(back.ratings, ds.ratings);
  EXPECT_EQ(back.content, ds.content);
  EXPECT_EQ(back.vocabulary, ds.vocabulary);
  EXPECT_EQ(back.max_rating, ds.max_rating);
  EXPECT_EQ(read_json(dir / "manifest.json").at("note"), "kept");
}

TEST(DatasetIo, MissingDirectoryIsStageError) {
  EXPECT_THROW(read_dataset(scratch("none") / "absent"), StageError);
}

TEST(DatasetIo, InconsistentContentRejected) {
  Dataset ds = small_dataset();
  const fs::path dir = scratch("inconsistent");
  write_dataset(dir, ds);
  ds.item_ids.pop_back();
  write_content(dir / "content.bin", SparseRows{});
  EXPECT_THROW(read_dataset(dir), Error);
}

TEST(SplitIo, RoundTripBothKinds) {
  const Dataset ds = small_dataset();
  for (const Split& s : {split_in_matrix(ds, 0.5, 0.15, 2), split_out_of_matrix(ds, 0.5, 0.15, 2)}) {
    const fs::path dir = scratch("split_" + to_string(s.kind));
    write_split(dir, s);
    const Split back = read_split(dir);
    EXPECT_EQ(back.kind, s.kind);
    EXPECT_EQ(back.seed, s.seed);
    EXPECT_EQ(back.train, s.train);
    EXPECT_EQ(back.validation, s.validation);
    EXPECT_EQ(back.test, s.test);
    EXPECT_EQ(back.train_items, s.train_items);
    EXPECT_EQ(back.test_items, s.test_items);
    EXPECT_EQ(back.validation_items, s.validation_items);
  }
}

TEST(SplitIo, UnknownKindRejected) {
  const fs::path dir = scratch("badkind");
  write_split(dir, Split{});
  auto doc = read_json(dir / "manifest.json");
  doc["kind"] = "sideways";
  write_json(dir / "manifest.json", doc);
  EXPECT_THROW(read_split(dir), Error);
}

TEST(CheckpointIo, RoundTripBothVariants) {
  const Dataset ds = small_dataset();
  for (Variant v : {Variant::kContentAware, Variant::kNoContent}) {
    ModelShape shape;
    shape.m = 24;
    shape.hidden1 = 9;
    shape.hidden2 = 7;
    shape.num_users = ds.num_users();
    shape.num_items = ds.num_items();
    shape.vocab_size = ds.vocab_size();
    shape.variant = v;
    Rng rng(5);
    Checkpoint ck;
    ck.params = init_params(shape, rng);
    ck.hyper.alpha = 0.25;
    ck.hyper.noise_var = 0.123456789;
    ck.hyper.kl_weight = 1.5;
    ck.seed = 77;
    ck.batches_seen = 1234;
    ck.epoch = 9;
    const fs::path path = scratch("ckpt") / "checkpoint.bin";
    write_checkpoint(path, ck);
    const Checkpoint back = read_checkpoint(path);
    EXPECT_EQ(back.params.variant, v);
    EXPECT_EQ(back.params.m, 24);
    EXPECT_EQ(back.hyper.alpha, 0.25);
    EXPECT_EQ(back.hyper.noise_var, 0.123456789);
    EXPECT_EQ(back.hyper.anneal_factor, ck.hyper.anneal_factor);
    EXPECT_EQ(back.hyper.kl_weight, 1.5);
    EXPECT_EQ(back.seed, 77u);
    EXPECT_EQ(back.batches_seen, 1234u);
    EXPECT_EQ(back.epoch, 9u);
    ModelParams::zip([](const char* name, const auto& a, const auto& b) { EXPECT_EQ(a, b) << name; },
                     back.params, ck.params);
  }
}

TEST(CheckpointIo, BadMagicAndTruncation) {
  const fs::path dir = scratch("ckpt_bad");
  {
    std::ofstream out(dir / "magic.bin", std::ios::binary);
    out << "NOPE and more bytes";
  }
  EXPECT_THROW(read_checkpoint(dir / "magic.bin"), Error);
  {
    std::ofstream out(dir / "short.bin", std::ios::binary);
    out << "HCFM";
  }
  EXPECT_THROW(read_checkpoint(dir / "short.bin"), Error);
  EXPECT_THROW(read_checkpoint(dir / "absent.bin"), StageError);
}

TEST(TriplesIo, EmptyAndNonEmpty) {
  const fs::path dir = scratch("triples");
  write_triples(dir / "empty.bin", std::vector<Rating>{});
  EXPECT_TRUE(read_triples(dir / "empty.bin").empty());
  const std::vector<Rating> rs{{0, 1, 4.5}, {3, 2, 1.0}};
  write_triples(dir / "two.bin", rs);
  EXPECT_EQ(read_triples(dir / "two.bin"), rs);
}
