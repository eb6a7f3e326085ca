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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hashcf/corpus.hpp"
#include "hashcf/eval.hpp"
#include "hashcf/hashindex.hpp"
#include "hashcf/model.hpp"
#include "hashcf/rng.hpp"
#include "hashcf/split.hpp"

namespace hashcf {

struct TrainConfig {
  double learning_rate = 0.0005;
  std::size_t batch_size = 2000;
  int max_epochs = 30;
  double alpha = 0.001;
  double noise_var_init = 1.0;
  double noise_decay = 0.9999;  // per batch
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double kl_weight = 1.0;
  std::uint64_t seed = 0;
  int eval_every = 1;
  int threads = 1;

  void validate() const {
    if (!(learning_rate > 0.0)) throw ArgumentError("learning_rate must be > 0");
    if (batch_size < 1) throw ArgumentError("batch_size must be >= 1");
    if (max_epochs < 0) throw ArgumentError("max_epochs must be >= 0");
    if (!(noise_decay > 0.0 && noise_decay <= 1.0)) throw ArgumentError("noise_decay must lie in (0, 1]");
    if (!(noise_var_init >= 0.0)) throw ArgumentError("noise_var_init must be >= 0");
    if (!(alpha >= 0.0)) throw ArgumentError("alpha must be >= 0");
    if (eval_every < 1) throw ArgumentError("eval_every must be >= 1");
  }
};

// ---------------------------------------------------------------------------
// Adam

struct AdamState {
  ModelParams first;
  ModelParams second;
  std::uint64_t step = 0;
};

inline AdamState adam_init(const ModelParams& params) {
  return {params.zeros_like(), params.zeros_like(), 0};
}

inline void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, double lr,
                      double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8) {
  bool shapes_ok = true;
  ModelParams::zip(
      [&](const char*, const auto& p, const auto& g, const auto& m, const auto& v) {
        shapes_ok = shapes_ok && p.rows() == g.rows() && p.cols() == g.cols() &&
                    p.rows() == m.rows() && p.cols() == m.cols() && p.rows() == v.rows() &&
                    p.cols() == v.cols();
      },
      params, grads, state.first, state.second);
  if (!shapes_ok) throw ShapeError("adam: gradient or state shape does not match parameters");

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(beta1, t);
  const double c2 = 1.0 - std::pow(beta2, t);
  ModelParams::zip(
      [&](const char*, auto& p, const auto& g, auto& m, auto& v) {
        if (p.size() == 0) return;
        m = beta1 * m + (1.0 - beta1) * g;
        v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
        p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + epsilon);
      },
      params, grads, state.first, state.second);
}

// ---------------------------------------------------------------------------
// Inference

// Deterministic codes (mu = 0.5) for one item given only its content.
inline HashCode infer_item_code(std::span<const std::uint32_t> idx, std::span<const double> val,
                                const ModelParams& p) {
  const Vector logits = item_logits(idx, val, p);
  HashCode h(p.m);
  // q > 0.5 exactly when the logit is positive.
  for (int j = 0; j < p.m; ++j) h.set_bit(j, sample_bit(sigmoid(logits(j)), 0.5) > 0);
  return h;
}

inline HashCode infer_embedding_code(const Matrix& embedding, std::size_t row, int m) {
  HashCode h(m);
  for (int j = 0; j < m; ++j) {
    h.set_bit(j, sample_bit(sigmoid(embedding(static_cast<Eigen::Index>(row), j)), 0.5) > 0);
  }
  return h;
}

// Codes for the given users and items; other rows of the codebook stay zero.
// Content-aware items are encoded from content alone, so unseen items need
// nothing beyond their content row.
inline CodeBook infer_codes(const ModelParams& p, const Dataset& ds,
                            std::span<const std::uint32_t> users,
                            std::span<const std::uint32_t> items, int threads = 1) {
  CodeBook book(p.m, ds.num_users(), ds.num_items());
  for (auto u : users) {
    if (u >= p.num_users()) throw IndexError("user " + std::to_string(u) + " has no embedding");
    book.set_user(u, infer_embedding_code(p.E_user, u, p.m));
  }
  if (p.variant == Variant::kContentAware) {
    if (!ds.has_content()) throw StageError("dataset has no content vectors");
    if (ds.content.cols != p.vocab_size()) throw ShapeError("content does not match vocabulary");
    detail::parallel_for(items.size(), threads, [&](std::size_t k) {
      const auto i = items[k];
      if (i >= ds.num_items()) throw IndexError("item " + std::to_string(i) + " out of range");
      book.set_item(i, infer_item_code(ds.content.row_indices(i), ds.content.row_values(i), p));
    });
  } else {
    for (auto i : items) {
      if (i >= static_cast<std::size_t>(p.E_item.rows())) {
        throw IndexError("item " + std::to_string(i) + " has no embedding row");
      }
      book.set_item(i, infer_embedding_code(p.E_item, i, p.m));
    }
  }
  return book;
}

inline CodeBook infer_codes(const ModelParams& p, const Dataset& ds, int threads = 1) {
  std::vector<std::uint32_t> users(ds.num_users()), items(ds.num_items());
  for (std::uint32_t u = 0; u < users.size(); ++u) users[u] = u;
  for (std::uint32_t i = 0; i < items.size(); ++i) items[i] = i;
  return infer_codes(p, ds, users, items, threads);
}

// ---------------------------------------------------------------------------
// Training

struct EpochRecord {
  int epoch = 0;
  LossBreakdown loss;
  double sigma2 = 0.0;  // after the epoch's last batch
  double val_ndcg10 = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
  std::uint64_t batches = 0;  // cumulative
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = -1;
  double best_val_ndcg10 = std::numeric_limits<double>::quiet_NaN();
};

struct TrainResult {
  ModelParams params;  // best validation checkpoint
  TrainHistory history;
  std::uint64_t batches = 0;
  double final_sigma2 = 0.0;
  bool aborted = false;
  std::string error;
};

// Called after every batch with the cumulative batch count, the noise
// variance used by that batch and its loss.
using BatchObserver = std::function<void(std::uint64_t, double, const LossBreakdown&)>;

inline ModelShape shape_for(const Dataset& ds, int m, int hidden1, int hidden2, Variant variant) {
  ModelShape s;
  s.m = m;
  s.hidden1 = hidden1;
  s.hidden2 = hidden2;
  s.num_users = ds.num_users();
  s.num_items = ds.num_items();
  s.vocab_size = ds.vocab_size();
  s.variant = variant;
  return s;
}

inline TrainResult train(const Split& split, const Dataset& ds, const TrainConfig& config,
                         const ModelShape& shape, const BatchObserver& observer = {}) {
  config.validate();
  if (split.train.empty()) throw ArgumentError("empty training set");
  if (shape.variant == Variant::kContentAware && !ds.has_content()) {
    throw StageError("content-aware training needs item content");
  }
  Rng init_rng(Rng::mix(config.seed, 12));
  TrainResult result;
  ModelParams params = init_params(shape, init_rng);
  result.params = params;
  if (config.max_epochs == 0) {
    result.final_sigma2 = config.noise_var_init;
    return result;
  }

  Rng shuffle_rng(Rng::mix(config.seed, 10));
  Rng noise_rng(Rng::mix(config.seed, 11));
  AdamState adam = adam_init(params);
  Hyper hyper;
  hyper.alpha = config.alpha;
  hyper.kl_weight = config.kl_weight;
  hyper.noise_var = config.noise_var_init;
  hyper.anneal_factor = config.noise_decay;
  std::vector<Rating> order = split.train;

  std::vector<std::uint32_t> all_users(ds.num_users());
  for (std::uint32_t u = 0; u < all_users.size(); ++u) all_users[u] = u;
  std::vector<std::uint32_t> val_items;
  for (const auto& r : split.validation) val_items.push_back(r.item);
  std::sort(val_items.begin(), val_items.end());
  val_items.erase(std::unique(val_items.begin(), val_items.end()), val_items.end());

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    shuffle_rng.shuffle(std::span<Rating>(order));
    EpochRecord rec;
    rec.epoch = epoch + 1;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::span<const Rating> batch(order.data() + start, end - start);
      LossAndGrads lg;
      try {
        lg = loss_and_grads(batch, params, hyper, ds.content, ds.max_rating, noise_rng,
                            static_cast<long>(result.batches));
      } catch (const NumericError& e) {
        result.aborted = true;
        result.error = e.what();
        result.final_sigma2 = hyper.noise_var;
        if (result.history.best_epoch < 0) result.params = params;
        return result;
      }
      adam_step(params, lg.grads, adam, config.learning_rate, config.adam_beta1,
                config.adam_beta2, config.adam_epsilon);
      const double w = static_cast<double>(batch.size()) / static_cast<double>(order.size());
      rec.loss.total += w * lg.loss.total;
      rec.loss.rating += w * lg.loss.rating;
      rec.loss.kl_user += w * lg.loss.kl_user;
      rec.loss.kl_item += w * lg.loss.kl_item;
      rec.loss.content += w * lg.loss.content;
      rec.loss.empty_content += lg.loss.empty_content;
      ++result.batches;
      if (observer) observer(result.batches, hyper.noise_var, lg.loss);
      hyper.noise_var *= config.noise_decay;
    }
    rec.sigma2 = hyper.noise_var;
    rec.batches = result.batches;

    if ((epoch + 1) % config.eval_every == 0 && !split.validation.empty()) {
      const CodeBook book = infer_codes(params, ds, all_users, val_items, config.threads);
      const auto report = evaluate(book, split, ds, {10}, EvalTarget::kValidation, config.threads);
      rec.val_ndcg10 = report.ndcg_at(10);
      if (result.history.best_epoch < 0 || rec.val_ndcg10 > result.history.best_val_ndcg10) {
        result.history.best_epoch = rec.epoch;
        result.history.best_val_ndcg10 = rec.val_ndcg10;
        result.params = params;
      }
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.history.epochs.push_back(rec);
  }
  if (result.history.best_epoch < 0) result.params = params;
  result.final_sigma2 = hyper.noise_var;
  return result;
}

inline void write_history_csv(const std::filesystem::path& path, const TrainHistory& history) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << "epoch,loss_total,loss_rating,loss_kl_user,loss_kl_item,loss_content,sigma2,val_ndcg10,"
         "seconds\n";
  char buf[512];
  for (const auto& r : history.epochs) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.6f\n",
                  r.epoch, r.loss.total, r.loss.rating, r.loss.kl_user, r.loss.kl_item,
                  r.loss.content, r.sigma2, r.val_ndcg10, r.seconds);
    out << buf;
  }
}

}  // namespace hashcf
