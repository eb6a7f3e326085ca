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
#include <string>

#include "hashcf/binary_io.hpp"
#include "hashcf/model.hpp"

namespace hashcf {

struct Checkpoint {
  ModelParams params;
  Hyper hyper;
  std::uint64_t seed = 0;
  std::uint64_t batches_seen = 0;
  std::uint64_t epoch = 0;
};

// "HCFM", u32 version, u8 variant, u32 m, Hyper as four f64, u64 seed,
// u64 batches seen, u64 epoch, u32 tensor count, then per tensor: name,
// u64 rows, u64 cols and row-major f64 data. All little-endian.
inline void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  io::LeWriter w(path);
  w.put_bytes("HCFM");
  w.put<std::uint32_t>(1);
  w.put<std::uint8_t>(ck.params.variant == Variant::kContentAware ? 0 : 1);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(ck.params.m));
  w.put(ck.hyper.alpha);
  w.put(ck.hyper.noise_var);
  w.put(ck.hyper.anneal_factor);
  w.put(ck.hyper.kl_weight);
  w.put(ck.seed);
  w.put(ck.batches_seen);
  w.put(ck.epoch);
  std::uint32_t count = 0;
  ck.params.for_each_tensor([&](const char*, const auto&) { ++count; });
  w.put(count);
  ck.params.for_each_tensor([&](const char* name, const auto& t) {
    w.put_string(name);
    w.put<std::uint64_t>(static_cast<std::uint64_t>(t.rows()));
    w.put<std::uint64_t>(static_cast<std::uint64_t>(t.cols()));
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) w.put(t(r, c));
    }
  });
  w.close();
}

inline Checkpoint read_checkpoint(const std::filesystem::path& path) {
  io::LeReader r(path);
  r.expect_magic("HCFM");
  if (r.get<std::uint32_t>() != 1) throw Error("unsupported checkpoint version: " + path.string());
  Checkpoint ck;
  ck.params.variant = r.get<std::uint8_t>() == 0 ? Variant::kContentAware : Variant::kNoContent;
  ck.params.m = static_cast<int>(r.get<std::uint32_t>());
  ck.hyper.alpha = r.get<double>();
  ck.hyper.noise_var = r.get<double>();
  ck.hyper.anneal_factor = r.get<double>();
  ck.hyper.kl_weight = r.get<double>();
  ck.seed = r.get<std::uint64_t>();
  ck.batches_seen = r.get<std::uint64_t>();
  ck.epoch = r.get<std::uint64_t>();
  const auto count = r.get<std::uint32_t>();
  std::uint32_t seen = 0;
  ck.params.for_each_tensor([&](const char* name, auto& t) {
    if (r.get_string() != name) throw Error("unexpected tensor order in " + path.string());
    const auto rows = static_cast<Eigen::Index>(r.get<std::uint64_t>());
    const auto cols = static_cast<Eigen::Index>(r.get<std::uint64_t>());
    if constexpr (std::remove_reference_t<decltype(t)>::ColsAtCompileTime == 1) {
      if (cols != 1 && rows * cols != 0) throw Error("vector tensor with several columns");
      t.resize(rows);
    } else {
      t.resize(rows, cols);
    }
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index c = 0; c < cols; ++c) t(i, c) = r.get<double>();
    }
    ++seen;
  });
  if (seen != count) throw Error("tensor count mismatch in " + path.string());
  return ck;
}

}  // namespace hashcf
