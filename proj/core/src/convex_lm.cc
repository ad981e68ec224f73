//
// Copyright 2026 The gdc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "gdc/convex_lm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "gdc/error.h"

namespace gdc {
namespace {

constexpr int kMaxOrder = 3;
constexpr int kSymbolBits = 9;

}  // namespace

ConvexLM::ConvexLM(int vocab_size, int order, std::span<const TokenSpan> dictionary_source,
                   std::uint64_t seed, double init_scale)
    : vocab_(vocab_size), order_(order) {
  if (vocab_size < 1 || vocab_size > kMaxVocabulary) {
    throw Error(ErrorCode::kInvalidConfig, "ConvexLM vocabulary must lie in [1, 256]");
  }
  if (order < 0 || order > kMaxOrder) {
    throw Error(ErrorCode::kInvalidConfig, "ConvexLM order must lie in [0, 3]");
  }
  for (TokenSpan seq : dictionary_source) {
    for (std::size_t p = 0; p < seq.size(); ++p) {
      for (int n = 1; n <= order_; ++n) {
        const std::uint64_t k = key(seq, p, n);
        if (rows_.emplace(k, static_cast<std::uint32_t>(keys_.size() + 1)).second) {
          keys_.push_back(k);
        }
      }
    }
  }
  theta_.resize(feature_rows() * static_cast<std::size_t>(vocab_));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, init_scale);
  for (double& w : theta_) w = init_scale > 0.0 ? normal(rng) : 0.0;
}

ConvexLM::ConvexLM(int vocab_size, int order, std::vector<std::uint64_t> keys,
                   std::vector<double> theta)
    : vocab_(vocab_size), order_(order), keys_(std::move(keys)), theta_(std::move(theta)) {
  if (vocab_size < 1 || vocab_size > kMaxVocabulary || order < 0 || order > kMaxOrder) {
    throw Error(ErrorCode::kMalformedHeader, "ConvexLM layout out of range");
  }
  if (theta_.size() != feature_rows() * static_cast<std::size_t>(vocab_)) {
    throw Error(ErrorCode::kDimensionMismatch, "ConvexLM parameter count does not match its layout");
  }
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (!rows_.emplace(keys_[i], static_cast<std::uint32_t>(i + 1)).second) {
      throw Error(ErrorCode::kMalformedHeader, "duplicate ConvexLM feature key");
    }
  }
}

std::unique_ptr<Model> ConvexLM::clone() const { return std::make_unique<ConvexLM>(*this); }

std::uint64_t ConvexLM::key(TokenSpan sequence, std::size_t p, int n) const {
  std::uint64_t packed = static_cast<std::uint64_t>(n) << 32;
  for (int j = 1; j <= n; ++j) {
    const std::uint64_t sym = p >= static_cast<std::size_t>(j)
                                  ? sequence[p - static_cast<std::size_t>(j)]
                                  : static_cast<std::uint64_t>(vocab_);
    packed |= sym << (kSymbolBits * (j - 1));
  }
  return packed;
}

ConvexLM::Position ConvexLM::features(TokenSpan sequence, std::size_t p) const {
  Position pos{{0, 0, 0, 0}, 1};
  for (int n = 1; n <= order_; ++n) {
    auto it = rows_.find(key(sequence, p, n));
    if (it != rows_.end()) pos.rows[pos.count++] = it->second;
  }
  return pos;
}

double ConvexLM::softmax_nll(const Position& pos, Token target, std::span<double> probs) const {
  const auto v = static_cast<std::size_t>(vocab_);
  std::copy_n(theta_.begin() + static_cast<std::ptrdiff_t>(pos.rows[0] * v), v, probs.begin());
  for (int r = 1; r < pos.count; ++r) {
    const double* row = theta_.data() + pos.rows[r] * v;
    for (std::size_t k = 0; k < v; ++k) probs[k] += row[k];
  }
  const double peak = *std::max_element(probs.begin(), probs.end());
  const double target_logit = probs[target];
  double total = 0.0;
  for (double& x : probs) {
    x = std::exp(x - peak);
    total += x;
  }
  for (double& x : probs) x /= total;
  return std::log(total) + peak - target_logit;
}

double ConvexLM::sequence_loss(TokenSpan sequence) const {
  std::vector<double> probs(static_cast<std::size_t>(vocab_));
  double nll = 0.0;
  for (std::size_t p = 0; p < sequence.size(); ++p) {
    nll += softmax_nll(features(sequence, p), sequence[p], probs);
  }
  return nll / static_cast<double>(sequence.size());
}

void ConvexLM::accumulate_gradient(TokenSpan sequence, double scale,
                                   std::span<double> gradient) const {
  const auto v = static_cast<std::size_t>(vocab_);
  std::vector<double> probs(v);
  const double w = scale / static_cast<double>(sequence.size());
  for (std::size_t p = 0; p < sequence.size(); ++p) {
    const Position pos = features(sequence, p);
    softmax_nll(pos, sequence[p], probs);
    probs[sequence[p]] -= 1.0;
    for (int r = 0; r < pos.count; ++r) {
      double* g = gradient.data() + pos.rows[r] * v;
      for (std::size_t k = 0; k < v; ++k) g[k] += w * probs[k];
    }
  }
}

double ConvexLM::squared_gradient_norm(TokenSpan sequence) const {
  const auto v = static_cast<std::size_t>(vocab_);
  const std::size_t len = sequence.size();
  std::vector<double> dlogits(len * v);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;  // (row, position)
  entries.reserve(len * static_cast<std::size_t>(order_ + 1));
  for (std::size_t p = 0; p < len; ++p) {
    const Position pos = features(sequence, p);
    std::span<double> d(dlogits.data() + p * v, v);
    softmax_nll(pos, sequence[p], d);
    d[sequence[p]] -= 1.0;
    for (int r = 0; r < pos.count; ++r) {
      entries.emplace_back(pos.rows[r], static_cast<std::uint32_t>(p));
    }
  }
  std::sort(entries.begin(), entries.end());
  std::vector<double> acc(v);
  double norm2 = 0.0;
  for (std::size_t a = 0; a < entries.size();) {
    std::fill(acc.begin(), acc.end(), 0.0);
    std::size_t b = a;
    for (; b < entries.size() && entries[b].first == entries[a].first; ++b) {
      const double* d = dlogits.data() + entries[b].second * v;
      for (std::size_t k = 0; k < v; ++k) acc[k] += d[k];
    }
    for (double x : acc) norm2 += x * x;
    a = b;
  }
  const double inv_len = 1.0 / static_cast<double>(len);
  return norm2 * inv_len * inv_len;
}

void ConvexLM::sgd_step(std::span<const TokenSpan> batch, std::span<const double> coefficients,
                        double learning_rate, double weight_decay) {
  const auto v = static_cast<std::size_t>(vocab_);
  std::vector<Position> positions;
  std::vector<double> updates;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const TokenSpan seq = batch[b];
    const double w = learning_rate * coefficients[b] / static_cast<double>(seq.size());
    for (std::size_t p = 0; p < seq.size(); ++p) {
      positions.push_back(features(seq, p));
      updates.resize(updates.size() + v);
      std::span<double> d(updates.data() + updates.size() - v, v);
      softmax_nll(positions.back(), seq[p], d);
      d[seq[p]] -= 1.0;
      for (double& x : d) x *= w;
    }
  }
  if (learning_rate * weight_decay != 0.0) {
    const double shrink = 1.0 - learning_rate * weight_decay;
    for (double& x : theta_) x *= shrink;
  }
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const double* d = updates.data() + i * v;
    for (int r = 0; r < positions[i].count; ++r) {
      double* row = theta_.data() + positions[i].rows[r] * v;
      for (std::size_t k = 0; k < v; ++k) row[k] -= d[k];
    }
  }
}

std::vector<double> ConvexLM::next_token_log_probs(TokenSpan context) const {
  std::vector<double> probs(static_cast<std::size_t>(vocab_));
  softmax_nll(features(context, context.size()), 0, probs);
  for (double& x : probs) x = std::log(x);
  return probs;
}

std::vector<std::uint64_t> ConvexLM::dimensions() const {
  return {static_cast<std::uint64_t>(vocab_), static_cast<std::uint64_t>(order_)};
}

}  // namespace gdc
