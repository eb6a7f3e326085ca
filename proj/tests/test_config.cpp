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

#include "hashcf/config.hpp"

using namespace hashcf;

TEST(RunConfig, DefaultsAreValid) {
  const RunConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.integer("m"), 32);
  EXPECT_EQ(c.variant(), Variant::kContentAware);
  EXPECT_EQ(c.split_kind(), SplitKind::kInMatrix);
  const TrainConfig t = c.train_config();
  EXPECT_EQ(t.learning_rate, 0.0005);
  EXPECT_EQ(t.batch_size, 2000u);
  EXPECT_EQ(t.noise_var_init, 1.0);
  EXPECT_EQ(t.noise_decay, 0.9999);
  EXPECT_EQ(t.alpha, 0.001);
}

TEST(RunConfig, FileThenAssignmentsOverride) {
  const auto dir = std::filesystem::path(HASHCF_TEST_TMP) / "config";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "run.conf");
    out << "# comment line\n\n m = 16  # trailing\nalpha=0.5\nalpha = 0.25\n";
  }
  RunConfig c;
  c.load_file(dir / "run.conf");
  EXPECT_EQ(c.integer("m"), 16);
  EXPECT_EQ(c.real("alpha"), 0.25);
  c.set_assignment("m=64");
  EXPECT_EQ(c.integer("m"), 64);
  EXPECT_EQ(c.train_config().alpha, 0.25);
}

TEST(RunConfig, RejectsBadInput) {
  RunConfig c;
  EXPECT_THROW(c.set("no_such_key", "1"), ConfigError);
  EXPECT_THROW(c.set_assignment("m"), ConfigError);
  EXPECT_THROW(c.load_file("/nonexistent/run.conf"), ConfigError);
  c.set("m", "x");
  EXPECT_THROW(c.integer("m"), ConfigError);
  EXPECT_THROW(c.validate(), ConfigError);
  c.set("m", "513");
  EXPECT_THROW(c.validate(), ConfigError);
  c.set("m", "32");
  c.set("learning_rate", "1.5x");
  EXPECT_THROW(c.real("learning_rate"), ConfigError);
  c.set("learning_rate", "-1");
  EXPECT_THROW(c.validate(), ConfigError);
  c.set("learning_rate", "0.001");
  c.set("ks", "2,,10");
  EXPECT_THROW(c.integer_list("ks"), ConfigError);
  c.set("ks", "2,6,10");
  c.set("variant", "fancy");
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(RunConfig, MalformedFileLineNamesLine) {
  const auto dir = std::filesystem::path(HASHCF_TEST_TMP) / "config";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "bad.conf");
    out << "m = 16\njust words\n";
  }
  RunConfig c;
  try {
    c.load_file(dir / "bad.conf");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
}

TEST(RunConfig, NoContentWithColdStartSplitRejected) {
  RunConfig c;
  c.set("variant", "no_content");
  EXPECT_NO_THROW(c.validate());
  c.set("split_kind", "out_of_matrix");
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(RunConfig, SyntheticSpec) {
  RunConfig c;
  c.set("synthetic", "users=50 items=40 vocab=30 topics=3");
  const SyntheticConfig s = c.synthetic_config();
  EXPECT_EQ(s.users, 50u);
  EXPECT_EQ(s.items, 40u);
  EXPECT_EQ(s.vocab, 30u);
  EXPECT_EQ(s.topics, 3u);
  c.set("synthetic", "users=5 colour=7");
  EXPECT_THROW(c.validate(), ConfigError);
  c.set("synthetic", "users=many");
  EXPECT_THROW(c.synthetic_config(), ConfigError);
}

TEST(RunConfig, JsonHoldsEveryKey) {
  const RunConfig c;
  const auto j = c.to_json();
  EXPECT_EQ(j.at("variant"), "content_aware");
  EXPECT_EQ(j.at("noise_decay"), "0.9999");
  EXPECT_TRUE(j.contains("bench_items"));
}
