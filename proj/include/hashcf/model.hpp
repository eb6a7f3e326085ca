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
#include <limits>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "hashcf/corpus.hpp"
#include "hashcf/error.hpp"
#include "hashcf/rng.hpp"

namespace hashcf {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class Variant { kContentAware, kNoContent };

inline std::string to_string(Variant v) {
  return v == Variant::kContentAware ? "content_aware" : "no_content";
}

struct ModelShape {
  int m = 32;
  int hidden1 = 1000;
  int hidden2 = 1000;
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  std::size_t vocab_size = 0;
  Variant variant = Variant::kContentAware;
};

// All learnable tensors. The content-aware variant uses the encoder stack,
// importance weights and word decoder; the no-content variant replaces them
// with an item embedding and leaves them empty.
struct ModelParams {
  Variant variant = Variant::kContentAware;
  int m = 0;

  Matrix W1;  // hidden1 x vocab
  Vector b1;
  Matrix W2;  // hidden2 x hidden1
  Vector b2;
  Matrix W3;  // m x hidden2
  Vector b3;
  Vector w_imp;   // vocab; shared by the item encoder and the word decoder
  Matrix E_user;  // users x m
  Matrix E_word;  // vocab x m
  Vector b_word;  // vocab
  Matrix E_item;  // items x m, no-content variant only

  static auto tensor_table() {
    return std::make_tuple(
        std::pair{"W1", &ModelParams::W1}, std::pair{"b1", &ModelParams::b1},
        std::pair{"W2", &ModelParams::W2}, std::pair{"b2", &ModelParams::b2},
        std::pair{"W3", &ModelParams::W3}, std::pair{"b3", &ModelParams::b3},
        std::pair{"w_imp", &ModelParams::w_imp}, std::pair{"E_user", &ModelParams::E_user},
        std::pair{"E_word", &ModelParams::E_word}, std::pair{"b_word", &ModelParams::b_word},
        std::pair{"E_item", &ModelParams::E_item});
  }

  // f(name, tensor) for every tensor, including empty ones.
  template <typename F>
  void for_each_tensor(F&& f) {
    std::apply([&](auto... e) { (f(e.first, this->*(e.second)), ...); }, tensor_table());
  }
  template <typename F>
  void for_each_tensor(F&& f) const {
    std::apply([&](auto... e) { (f(e.first, this->*(e.second)), ...); }, tensor_table());
  }

  // f(name, a.tensor, b.tensor, ...) over matching tensors of several sets.
  template <typename F, typename... Ps>
  static void zip(F&& f, Ps&... ps) {
    auto one = [&](auto e) { f(e.first, (ps.*(e.second))...); };
    std::apply([&](auto... e) { (one(e), ...); }, tensor_table());
  }

  std::size_t num_users() const { return static_cast<std::size_t>(E_user.rows()); }
  std::size_t vocab_size() const { return static_cast<std::size_t>(w_imp.size()); }
  int hidden1() const { return static_cast<int>(W1.rows()); }
  int hidden2() const { return static_cast<int>(W2.rows()); }

  ModelParams zeros_like() const {
    ModelParams z = *this;
    z.for_each_tensor([](const char*, auto& t) { t.setZero(); });
    return z;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for_each_tensor([&](const char*, const auto& t) { n += static_cast<std::size_t>(t.size()); });
    return n;
  }
};

// Encoder weights: uniform in +-sqrt(6 / (fan_in + fan_out)). Embeddings:
// N(0, 0.01^2). Importance weights: 1. Biases: zero.
inline ModelParams init_params(const ModelShape& shape, Rng& rng) {
  if (shape.m < 1) throw ArgumentError("code length must be >= 1");
  ModelParams p;
  p.variant = shape.variant;
  p.m = shape.m;
  auto uniform = [&](Matrix& w, Eigen::Index rows, Eigen::Index cols) {
    w.resize(rows, cols);
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = (2.0 * rng.uniform() - 1.0) * limit;
    }
  };
  auto normal = [&](auto& w, Eigen::Index rows, Eigen::Index cols) {
    w.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = 0.01 * rng.normal();
    }
  };
  const auto users = static_cast<Eigen::Index>(shape.num_users);
  p.E_user.resize(0, shape.m);
  p.E_word.resize(0, shape.m);
  p.E_item.resize(0, shape.m);
  p.W1.resize(0, 0);
  p.W2.resize(0, 0);
  p.W3.resize(0, 0);
  if (shape.variant == Variant::kContentAware) {
    if (shape.vocab_size == 0) throw ArgumentError("content-aware model needs a vocabulary");
    const auto n = static_cast<Eigen::Index>(shape.vocab_size);
    uniform(p.W1, shape.hidden1, n);
    p.b1 = Vector::Zero(shape.hidden1);
    uniform(p.W2, shape.hidden2, shape.hidden1);
    p.b2 = Vector::Zero(shape.hidden2);
    uniform(p.W3, shape.m, shape.hidden2);
    p.b3 = Vector::Zero(shape.m);
    p.w_imp.resize(n);
    // Ones, not small noise: a near-zero w_imp hides the content from the
    // encoder and every item starts on the same code.
    p.w_imp = Vector::Ones(n);
    normal(p.E_user, users, shape.m);
    normal(p.E_word, n, shape.m);
    p.b_word = Vector::Zero(n);
  } else {
    normal(p.E_user, users, shape.m);
    normal(p.E_item, static_cast<Eigen::Index>(shape.num_items), shape.m);
  }
  return p;
}

struct Hyper {
  double alpha = 0.001;
  double noise_var = 1.0;
  double anneal_factor = 0.9999;
  double kl_weight = 1.0;

  void validate() const {
    if (!(alpha >= 0.0)) throw ArgumentError("alpha must be >= 0");
    if (!(noise_var >= 0.0)) throw ArgumentError("noise variance must be >= 0");
    if (!(anneal_factor > 0.0 && anneal_factor <= 1.0)) {
      throw ArgumentError("anneal factor must lie in (0, 1]");
    }
  }
};

// Bernoulli probabilities q, sampling thresholds mu and the resulting bits.
struct CodeSamples {
  Vector q;
  Vector z;
  Vector mu;
};

inline constexpr double kProbClamp = 1e-7;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// z_j = 2 * ceil(q_j - mu_j) - 1, written as a comparison: +1 iff q_j > mu_j.
// The forms agree for q_j - mu_j in (-1, 1]; a tie (q_j == mu_j) gives -1.
inline double sample_bit(double q, double mu) { return q - mu > 0.0 ? 1.0 : -1.0; }

enum class MuMode { kTrain, kInfer };

// Training draws thresholds uniformly in [0, 1); inference fixes them at 0.5.
inline Vector sample_mu(int m, MuMode mode, Rng& rng) {
  Vector mu(m);
  for (int j = 0; j < m; ++j) mu(j) = mode == MuMode::kInfer ? 0.5 : rng.uniform();
  return mu;
}

inline double clamp_prob(double q) { return std::clamp(q, kProbClamp, 1.0 - kProbClamp); }

// KL(Bernoulli(q) || Bernoulli(p)) summed over bits, q clamped away from 0/1.
inline double kl_bernoulli(std::span<const double> q, double p = 0.5) {
  double kl = 0.0;
  for (double qj : q) {
    const double c = clamp_prob(qj);
    kl += c * std::log(c / p) + (1.0 - c) * std::log((1.0 - c) / p);
  }
  return kl;
}

inline double kl_bernoulli(const Vector& q, double p = 0.5) {
  return kl_bernoulli(std::span<const double>(q.data(), static_cast<std::size_t>(q.size())), p);
}

// d KL / d q for one bit at p = 0.5; zero where the clamp is active.
inline double kl_bernoulli_grad(double q) {
  if (q <= kProbClamp || q >= 1.0 - kProbClamp) return 0.0;
  return std::log(q / (1.0 - q));
}

// Maps a rating into the inner-product range [-m, m].
inline double scale_rating(double rating, double max_rating, int m) {
  if (!(max_rating > 0.0)) throw ArgumentError("max_rating must be > 0");
  return 2.0 * m * rating / max_rating - m;
}

inline double rating_loss(const Vector& z_user, const Vector& z_item, double scaled_rating) {
  if (z_user.size() != z_item.size()) throw ShapeError("rating_loss: code lengths differ");
  const double r = scaled_rating - z_item.dot(z_user);
  return r * r;
}

namespace detail {

inline void check_content_row(const ModelParams& p, std::span<const std::uint32_t> idx) {
  if (p.variant != Variant::kContentAware) {
    throw ArgumentError("content path requires the content-aware variant");
  }
  for (auto w : idx) {
    if (w >= p.vocab_size()) {
      throw ShapeError("content index " + std::to_string(w) + " outside vocabulary of " +
                       std::to_string(p.vocab_size()));
    }
  }
}

// Decoder word embedding with importance weights folded in: row w is
// E_word[w] * w_imp[w].
inline Matrix scaled_word_embedding(const ModelParams& p) {
  return p.E_word.array().colwise() * p.w_imp.array();
}

}  // namespace detail

// Encoder logits for one item: W3 relu(W2 relu(W1 (c * w_imp) + b1) + b2) + b3.
inline Vector item_logits(std::span<const std::uint32_t> idx, std::span<const double> val,
                          const ModelParams& p) {
  detail::check_content_row(p, idx);
  Vector pre1 = p.b1;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    pre1 += p.W1.col(idx[k]) * (val[k] * p.w_imp(idx[k]));
  }
  const Vector l1 = pre1.cwiseMax(0.0);
  const Vector l2 = (p.W2 * l1 + p.b2).cwiseMax(0.0);
  return p.W3 * l2 + p.b3;
}

inline CodeSamples codes_from_logits(const Vector& logits, const Vector& mu) {
  if (mu.size() != logits.size()) throw ShapeError("mu length does not match code length");
  CodeSamples s;
  s.mu = mu;
  s.q = logits.unaryExpr([](double a) { return sigmoid(a); });
  s.z.resize(s.q.size());
  for (Eigen::Index j = 0; j < s.q.size(); ++j) s.z(j) = sample_bit(s.q(j), mu(j));
  return s;
}

inline CodeSamples encode_item(std::span<const std::uint32_t> idx, std::span<const double> val,
                               const ModelParams& p, const Vector& mu) {
  if (p.variant != Variant::kContentAware) throw ArgumentError("content encoder needs content-aware variant");
  if (idx.size() != val.size()) throw ShapeError("content indices and values differ in length");
  return codes_from_logits(item_logits(idx, val, p), mu);
}

inline CodeSamples encode_item(const SparseRows& content, std::size_t item, const ModelParams& p,
                               const Vector& mu) {
  if (p.variant != Variant::kContentAware) throw ArgumentError("content encoder needs content-aware variant");
  if (item >= content.rows()) throw IndexError("no content for item " + std::to_string(item));
  if (content.cols != p.vocab_size()) {
    throw ShapeError("content dimension " + std::to_string(content.cols) +
                     " does not match vocabulary " + std::to_string(p.vocab_size()));
  }
  return encode_item(content.row_indices(item), content.row_values(item), p, mu);
}

// No-content variant: the item code is an embedding lookup, as for users.
inline CodeSamples encode_item_embedding(std::size_t item, const ModelParams& p, const Vector& mu) {
  if (p.variant != Variant::kNoContent) throw ArgumentError("item embedding needs no-content variant");
  if (item >= static_cast<std::size_t>(p.E_item.rows())) {
    throw IndexError("item " + std::to_string(item) + " has no embedding row");
  }
  return codes_from_logits(p.E_item.row(static_cast<Eigen::Index>(item)).transpose(), mu);
}

inline CodeSamples encode_user(std::size_t user, const ModelParams& p, const Vector& mu) {
  if (user >= p.num_users()) throw IndexError("user " + std::to_string(user) + " out of range");
  return codes_from_logits(p.E_user.row(static_cast<Eigen::Index>(user)).transpose(), mu);
}

// Log-probability of every vocabulary word given a (possibly noisy) item code.
inline Vector word_log_probs(const Vector& z_item, const ModelParams& p) {
  if (p.variant != Variant::kContentAware) throw ArgumentError("word decoder needs content variant");
  if (z_item.size() != p.m) throw ShapeError("item code length does not match model");
  const Vector logits = detail::scaled_word_embedding(p) * z_item + p.b_word;
  const double mx = logits.maxCoeff();
  const double lse = mx + std::log((logits.array() - mx).exp().sum());
  return logits.array() - lse;
}

// Negative log-likelihood of the item's non-zero words under the softmax
// word decoder. Items without words contribute zero.
inline double content_loss(const Vector& z_item, std::span<const std::uint32_t> idx,
                           const ModelParams& p) {
  detail::check_content_row(p, idx);
  if (idx.empty()) return 0.0;
  const Vector lp = word_log_probs(z_item, p);
  double loss = 0.0;
  for (auto w : idx) loss -= lp(w);
  return loss;
}

// z + eps * sigma2 with eps ~ N(0, I).
inline Vector add_noise(const Vector& z, double sigma2, Rng& rng) {
  if (!(sigma2 >= 0.0)) throw ArgumentError("noise variance must be >= 0");
  Vector out = z;
  for (Eigen::Index j = 0; j < out.size(); ++j) out(j) += rng.normal() * sigma2;
  return out;
}

// Randomness consumed by one training step, one row per batch example.
struct StepNoise {
  Matrix mu_user, mu_item;
  Matrix eps_user, eps_item;
};

inline StepNoise draw_step_noise(std::size_t batch, int m, Rng& rng) {
  StepNoise n;
  const auto b = static_cast<Eigen::Index>(batch);
  auto fill = [&](Matrix& x, bool gaussian) {
    x.resize(b, m);
    for (Eigen::Index r = 0; r < b; ++r) {
      for (Eigen::Index c = 0; c < m; ++c) x(r, c) = gaussian ? rng.normal() : rng.uniform();
    }
  };
  fill(n.mu_user, false);
  fill(n.mu_item, false);
  fill(n.eps_user, true);
  fill(n.eps_item, true);
  return n;
}

// Per-example means of the loss terms.
struct LossBreakdown {
  double total = 0.0;
  double rating = 0.0;
  double kl_user = 0.0;
  double kl_item = 0.0;
  double content = 0.0;
  std::size_t empty_content = 0;
};

struct LossAndGrads {
  LossBreakdown loss;
  ModelParams grads;
};

// Mean over the batch of
//   (R_hat - z_i' z_u)^2 + kl_w (KL_u + KL_i) + alpha (content + kl_w KL_i)
// with one sampled code per user and item, Gaussian noise on both codes
// before decoding, and straight-through gradients (dz/dq := 2) across the
// sampling step. The no-content variant has no content terms.
inline LossAndGrads loss_and_grads(std::span<const Rating> batch, const ModelParams& p,
                                   const Hyper& hyper, const SparseRows& content,
                                   double max_rating, const StepNoise& noise,
                                   long batch_index = -1) {
  if (batch.empty()) throw ArgumentError("empty batch");
  const auto B = static_cast<Eigen::Index>(batch.size());
  const int m = p.m;
  if (noise.mu_user.rows() != B || noise.mu_user.cols() != m || noise.mu_item.rows() != B ||
      noise.eps_user.rows() != B || noise.eps_item.rows() != B) {
    throw ShapeError("step noise does not match batch");
  }
  const bool with_content = p.variant == Variant::kContentAware;
  const double s = 1.0 / static_cast<double>(B);
  const double kl_w = hyper.kl_weight;
  const double alpha = with_content ? hyper.alpha : 0.0;
  const double sigma2 = hyper.noise_var;

  for (const auto& r : batch) {
    if (r.user >= p.num_users()) throw IndexError("user " + std::to_string(r.user) + " out of range");
    if (with_content ? r.item >= content.rows()
                     : r.item >= static_cast<std::size_t>(p.E_item.rows())) {
      throw IndexError("item " + std::to_string(r.item) + " out of range");
    }
  }
  if (with_content && content.cols != p.vocab_size()) {
    throw ShapeError("content dimension does not match vocabulary");
  }

  LossAndGrads out;
  out.grads = p.zeros_like();
  ModelParams& g = out.grads;

  // Item encoder.
  Matrix a_item(B, m);
  Eigen::SparseMatrix<double, Eigen::RowMajor> xw;
  Matrix pre1, l1, pre2, l2;
  if (with_content) {
    std::vector<Eigen::Triplet<double>> trips;
    for (Eigen::Index b = 0; b < B; ++b) {
      const auto item = batch[static_cast<std::size_t>(b)].item;
      const auto idx = content.row_indices(item);
      const auto val = content.row_values(item);
      for (std::size_t k = 0; k < idx.size(); ++k) {
        trips.emplace_back(b, idx[k], val[k] * p.w_imp(idx[k]));
      }
    }
    xw.resize(B, static_cast<Eigen::Index>(p.vocab_size()));
    xw.setFromTriplets(trips.begin(), trips.end());
    pre1 = xw * p.W1.transpose();
    pre1.rowwise() += p.b1.transpose();
    l1 = pre1.cwiseMax(0.0);
    pre2 = l1 * p.W2.transpose();
    pre2.rowwise() += p.b2.transpose();
    l2 = pre2.cwiseMax(0.0);
    a_item = l2 * p.W3.transpose();
    a_item.rowwise() += p.b3.transpose();
  } else {
    for (Eigen::Index b = 0; b < B; ++b) {
      a_item.row(b) = p.E_item.row(batch[static_cast<std::size_t>(b)].item);
    }
  }
  Matrix a_user(B, m);
  for (Eigen::Index b = 0; b < B; ++b) {
    a_user.row(b) = p.E_user.row(batch[static_cast<std::size_t>(b)].user);
  }
  const Matrix q_item = a_item.unaryExpr([](double a) { return sigmoid(a); });
  const Matrix q_user = a_user.unaryExpr([](double a) { return sigmoid(a); });

  Matrix z_item(B, m), z_user(B, m);
  for (Eigen::Index b = 0; b < B; ++b) {
    for (int j = 0; j < m; ++j) {
      z_item(b, j) = sample_bit(q_item(b, j), noise.mu_item(b, j));
      z_user(b, j) = sample_bit(q_user(b, j), noise.mu_user(b, j));
    }
  }
  const Matrix zn_item = z_item + sigma2 * noise.eps_item;
  const Matrix zn_user = z_user + sigma2 * noise.eps_user;

  // Rating decoder.
  const Vector pred = zn_item.cwiseProduct(zn_user).rowwise().sum();
  Vector resid(B);
  for (Eigen::Index b = 0; b < B; ++b) {
    resid(b) = scale_rating(batch[static_cast<std::size_t>(b)].value, max_rating, m) - pred(b);
  }

  // KL terms.
  double kl_user_sum = 0.0, kl_item_sum = 0.0;
  for (Eigen::Index b = 0; b < B; ++b) {
    kl_user_sum += kl_bernoulli(std::span<const double>(q_user.row(b).data(), m));
    kl_item_sum += kl_bernoulli(std::span<const double>(q_item.row(b).data(), m));
  }

  // Word decoder.
  double content_sum = 0.0;
  Matrix word_grad;  // d loss / d logits, already scaled by alpha / B
  Matrix scaled_words;
  if (with_content) {
    scaled_words = detail::scaled_word_embedding(p);
    Matrix logits = zn_item * scaled_words.transpose();
    logits.rowwise() += p.b_word.transpose();
    word_grad.setZero(B, logits.cols());
    for (Eigen::Index b = 0; b < B; ++b) {
      const auto idx = content.row_indices(batch[static_cast<std::size_t>(b)].item);
      if (idx.empty()) {
        ++out.loss.empty_content;
        continue;
      }
      const double mx = logits.row(b).maxCoeff();
      const Eigen::ArrayXd e = (logits.row(b).array() - mx).exp().transpose();
      const double sum = e.sum();
      const double lse = mx + std::log(sum);
      double observed = 0.0;
      for (auto w : idx) observed += logits(b, w);
      content_sum += static_cast<double>(idx.size()) * lse - observed;
      if (alpha != 0.0) {
        word_grad.row(b) = (alpha * s * static_cast<double>(idx.size()) / sum) * e.transpose().matrix();
        for (auto w : idx) word_grad(b, w) -= alpha * s;
      }
    }
  }

  LossBreakdown& L = out.loss;
  L.rating = resid.squaredNorm() * s;
  L.kl_user = kl_user_sum * s;
  L.kl_item = kl_item_sum * s;
  L.content = content_sum * s;
  L.total = L.rating + kl_w * (L.kl_user + L.kl_item) + alpha * (L.content + kl_w * L.kl_item);
  if (!std::isfinite(L.total)) throw NumericError("non-finite loss", batch_index);

  // Backward: rating decoder.
  const Vector d_pred = -2.0 * s * resid;
  Matrix d_zitem = zn_user.array().colwise() * d_pred.array();
  Matrix d_zuser = zn_item.array().colwise() * d_pred.array();

  // Backward: word decoder.
  if (with_content && alpha != 0.0) {
    d_zitem += word_grad * scaled_words;
    const Matrix d_scaled = word_grad.transpose() * zn_item;  // vocab x m
    g.b_word = word_grad.colwise().sum().transpose();
    g.E_word = d_scaled.array().colwise() * p.w_imp.array();
    g.w_imp = d_scaled.cwiseProduct(p.E_word).rowwise().sum();
  }

  // Straight-through sampling, KL and sigmoid.
  const double kl_item_weight = kl_w * s * (1.0 + alpha);
  const double kl_user_weight = kl_w * s;
  Matrix d_aitem(B, m), d_auser(B, m);
  for (Eigen::Index b = 0; b < B; ++b) {
    for (int j = 0; j < m; ++j) {
      const double qi = q_item(b, j), qu = q_user(b, j);
      d_aitem(b, j) = (2.0 * d_zitem(b, j) + kl_item_weight * kl_bernoulli_grad(qi)) * qi * (1.0 - qi);
      d_auser(b, j) = (2.0 * d_zuser(b, j) + kl_user_weight * kl_bernoulli_grad(qu)) * qu * (1.0 - qu);
    }
  }
  for (Eigen::Index b = 0; b < B; ++b) {
    g.E_user.row(batch[static_cast<std::size_t>(b)].user) += d_auser.row(b);
  }

  if (!with_content) {
    for (Eigen::Index b = 0; b < B; ++b) {
      g.E_item.row(batch[static_cast<std::size_t>(b)].item) += d_aitem.row(b);
    }
    return out;
  }

  // Backward: item encoder.
  g.W3 = d_aitem.transpose() * l2;
  g.b3 = d_aitem.colwise().sum().transpose();
  Matrix d_pre2 = d_aitem * p.W3;
  d_pre2 = d_pre2.cwiseProduct((pre2.array() > 0.0).cast<double>().matrix());
  g.W2 = d_pre2.transpose() * l1;
  g.b2 = d_pre2.colwise().sum().transpose();
  Matrix d_pre1 = d_pre2 * p.W2;
  d_pre1 = d_pre1.cwiseProduct((pre1.array() > 0.0).cast<double>().matrix());
  g.W1 = (xw.transpose() * d_pre1).transpose();
  g.b1 = d_pre1.colwise().sum().transpose();
  for (Eigen::Index b = 0; b < B; ++b) {
    const auto item = batch[static_cast<std::size_t>(b)].item;
    const auto idx = content.row_indices(item);
    const auto val = content.row_values(item);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      g.w_imp(idx[k]) += d_pre1.row(b).dot(p.W1.col(idx[k])) * val[k];
    }
  }
  return out;
}

inline LossAndGrads loss_and_grads(std::span<const Rating> batch, const ModelParams& p,
                                   const Hyper& hyper, const SparseRows& content,
                                   double max_rating, Rng& rng, long batch_index = -1) {
  const StepNoise noise = draw_step_noise(batch.size(), p.m, rng);
  return loss_and_grads(batch, p, hyper, content, max_rating, noise, batch_index);
}

}  // namespace hashcf
