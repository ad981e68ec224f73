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

#include "gdc/tiny_rnn.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "gdc/error.h"

namespace gdc {
namespace {

// Softmax of `z` in place; returns -log z[target] before normalization.
double softmax_nll(std::span<double> z, Token target) {
  const double peak = *std::max_element(z.begin(), z.end());
  const double target_logit = z[target];
  double total = 0.0;
  for (double& x : z) {
    x = std::exp(x - peak);
    total += x;
  }
  for (double& x : z) x /= total;
  return std::log(total) + peak - target_logit;
}

}  // namespace

TinyRNN::Layout TinyRNN::layout(int vocab_size, int hidden) {
  const auto v = static_cast<std::size_t>(vocab_size);
  const auto h = static_cast<std::size_t>(hidden);
  Layout l{};
  l.embed = 0;
  l.recur = l.embed + (v + 1) * h;
  l.bias = l.recur + h * h;
  l.out = l.bias + h;
  l.out_bias = l.out + v * h;
  l.total = l.out_bias + v;
  return l;
}

std::size_t TinyRNN::parameter_count(int vocab_size, int hidden) {
  return layout(vocab_size, hidden).total;
}

TinyRNN::TinyRNN(int vocab_size, int hidden, std::uint64_t seed, double init_scale)
    : vocab_(vocab_size), hidden_(hidden), at_(layout(vocab_size, hidden)) {
  if (vocab_size < 1 || vocab_size > kMaxVocabulary || hidden < 1) {
    throw Error(ErrorCode::kInvalidConfig, "TinyRNN needs vocabulary in [1, 256] and hidden >= 1");
  }
  theta_.assign(at_.total, 0.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double recur_scale = 0.5 / std::sqrt(static_cast<double>(hidden));
  for (std::size_t i = at_.embed; i < at_.recur; ++i) theta_[i] = init_scale * normal(rng);
  for (std::size_t i = at_.recur; i < at_.bias; ++i) theta_[i] = recur_scale * normal(rng);
  for (std::size_t i = at_.out; i < at_.out_bias; ++i) theta_[i] = init_scale * normal(rng);
}

TinyRNN::TinyRNN(int vocab_size, int hidden, std::vector<double> theta)
    : vocab_(vocab_size), hidden_(hidden), at_(layout(vocab_size, hidden)), theta_(std::move(theta)) {
  if (vocab_size < 1 || vocab_size > kMaxVocabulary || hidden < 1) {
    throw Error(ErrorCode::kMalformedHeader, "TinyRNN layout out of range");
  }
  if (theta_.size() != at_.total) {
    throw Error(ErrorCode::kDimensionMismatch, "TinyRNN parameter count does not match its layout");
  }
}

std::unique_ptr<Model> TinyRNN::clone() const { return std::make_unique<TinyRNN>(*this); }

void TinyRNN::forward(TokenSpan sequence, std::size_t steps, std::vector<double>& hidden) const {
  const auto h = static_cast<std::size_t>(hidden_);
  hidden.assign(steps * h, 0.0);
  const double* w = theta_.data() + at_.recur;
  const double* b = theta_.data() + at_.bias;
  for (std::size_t p = 0; p < steps; ++p) {
    const std::size_t input = p == 0 ? static_cast<std::size_t>(vocab_) : sequence[p - 1];
    const double* e = theta_.data() + at_.embed + input * h;
    double* out = hidden.data() + p * h;
    const double* prev = p == 0 ? nullptr : hidden.data() + (p - 1) * h;
    for (std::size_t i = 0; i < h; ++i) {
      double a = e[i] + b[i];
      if (prev != nullptr) {
        const double* wi = w + i * h;
        for (std::size_t j = 0; j < h; ++j) a += wi[j] * prev[j];
      }
      out[i] = std::tanh(a);
    }
  }
}

void TinyRNN::logits(const double* hstate, std::span<double> out) const {
  const auto h = static_cast<std::size_t>(hidden_);
  const double* u = theta_.data() + at_.out;
  const double* c = theta_.data() + at_.out_bias;
  for (std::size_t k = 0; k < out.size(); ++k) {
    double z = c[k];
    const double* uk = u + k * h;
    for (std::size_t j = 0; j < h; ++j) z += uk[j] * hstate[j];
    out[k] = z;
  }
}

double TinyRNN::sequence_loss(TokenSpan sequence) const {
  std::vector<double> hs;
  forward(sequence, sequence.size(), hs);
  std::vector<double> z(static_cast<std::size_t>(vocab_));
  double nll = 0.0;
  for (std::size_t p = 0; p < sequence.size(); ++p) {
    logits(hs.data() + p * static_cast<std::size_t>(hidden_), z);
    nll += softmax_nll(z, sequence[p]);
  }
  return nll / static_cast<double>(sequence.size());
}

void TinyRNN::accumulate_gradient(TokenSpan sequence, double scale,
                                  std::span<double> gradient) const {
  const auto h = static_cast<std::size_t>(hidden_);
  const auto v = static_cast<std::size_t>(vocab_);
  const std::size_t len = sequence.size();
  std::vector<double> hs;
  forward(sequence, len, hs);
  const double w = scale / static_cast<double>(len);
  const double* u = theta_.data() + at_.out;
  const double* rec = theta_.data() + at_.recur;
  double* g_embed = gradient.data() + at_.embed;
  double* g_recur = gradient.data() + at_.recur;
  double* g_bias = gradient.data() + at_.bias;
  double* g_out = gradient.data() + at_.out;
  double* g_out_bias = gradient.data() + at_.out_bias;

  std::vector<double> z(v), dh(h), dh_next(h, 0.0), da(h);
  for (std::size_t p = len; p-- > 0;) {
    const double* hp = hs.data() + p * h;
    logits(hp, z);
    softmax_nll(z, sequence[p]);
    z[sequence[p]] -= 1.0;
    std::copy(dh_next.begin(), dh_next.end(), dh.begin());
    for (std::size_t k = 0; k < v; ++k) {
      const double dz = w * z[k];
      g_out_bias[k] += dz;
      double* gu = g_out + k * h;
      const double* uk = u + k * h;
      for (std::size_t j = 0; j < h; ++j) {
        gu[j] += dz * hp[j];
        dh[j] += dz * uk[j];
      }
    }
    for (std::size_t i = 0; i < h; ++i) da[i] = dh[i] * (1.0 - hp[i] * hp[i]);
    const std::size_t input = p == 0 ? v : sequence[p - 1];
    double* ge = g_embed + input * h;
    for (std::size_t i = 0; i < h; ++i) {
      ge[i] += da[i];
      g_bias[i] += da[i];
    }
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    if (p > 0) {
      const double* hprev = hs.data() + (p - 1) * h;
      for (std::size_t i = 0; i < h; ++i) {
        double* gw = g_recur + i * h;
        const double* wi = rec + i * h;
        for (std::size_t j = 0; j < h; ++j) {
          gw[j] += da[i] * hprev[j];
          dh_next[j] += wi[j] * da[i];
        }
      }
    }
  }
}

double TinyRNN::squared_gradient_norm(TokenSpan sequence) const {
  std::vector<double> g(theta_.size(), 0.0);
  accumulate_gradient(sequence, 1.0, g);
  double norm2 = 0.0;
  for (double x : g) norm2 += x * x;
  return norm2;
}

void TinyRNN::sgd_step(std::span<const TokenSpan> batch, std::span<const double> coefficients,
                       double learning_rate, double weight_decay) {
  std::vector<double> g(theta_.size(), 0.0);
  for (std::size_t b = 0; b < batch.size(); ++b) accumulate_gradient(batch[b], coefficients[b], g);
  const double shrink = 1.0 - learning_rate * weight_decay;
  for (std::size_t i = 0; i < theta_.size(); ++i) {
    theta_[i] = shrink * theta_[i] - learning_rate * g[i];
  }
}

std::vector<double> TinyRNN::next_token_log_probs(TokenSpan context) const {
  std::vector<double> hs;
  forward(context, context.size() + 1, hs);
  std::vector<double> z(static_cast<std::size_t>(vocab_));
  logits(hs.data() + context.size() * static_cast<std::size_t>(hidden_), z);
  const double peak = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double x : z) total += std::exp(x - peak);
  const double log_total = std::log(total) + peak;
  for (double& x : z) x -= log_total;
  return z;
}

std::vector<std::uint64_t> TinyRNN::dimensions() const {
  return {static_cast<std::uint64_t>(vocab_), static_cast<std::uint64_t>(hidden_)};
}

}  // namespace gdc
