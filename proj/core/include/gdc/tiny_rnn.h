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

#ifndef GDC_TINY_RNN_H_
#define GDC_TINY_RNN_H_

#include <cstdint>
#include <memory>
#include <vector>

#include "gdc/model.h"

namespace gdc {

// Elman recurrent cell with a softmax read-out:
//   h_p = tanh(E[x_p] + W h_{p-1} + b),  logits_p = U h_p + c,
// where x_p is the previous token (a dedicated start symbol at p = 0).
class TinyRNN final : public Model {
 public:
  TinyRNN(int vocab_size, int hidden, std::uint64_t seed, double init_scale = 0.1);
  TinyRNN(int vocab_size, int hidden, std::vector<double> theta);

  ModelFamily family() const override { return ModelFamily::kTinyRNN; }
  int vocab_size() const override { return vocab_; }
  int hidden() const { return hidden_; }
  std::unique_ptr<Model> clone() const override;

  std::span<double> parameters() override { return theta_; }
  std::span<const double> parameters() const override { return theta_; }

  double sequence_loss(TokenSpan sequence) const override;
  void accumulate_gradient(TokenSpan sequence, double scale,
                           std::span<double> gradient) const override;
  double squared_gradient_norm(TokenSpan sequence) const override;
  void sgd_step(std::span<const TokenSpan> batch, std::span<const double> coefficients,
                double learning_rate, double weight_decay) override;
  std::vector<double> next_token_log_probs(TokenSpan context) const override;

  std::vector<std::uint64_t> dimensions() const override;
  std::vector<std::uint64_t> auxiliary() const override { return {}; }

  static std::size_t parameter_count(int vocab_size, int hidden);

 private:
  struct Layout {
    std::size_t embed, recur, bias, out, out_bias, total;
  };
  static Layout layout(int vocab_size, int hidden);
  // Hidden states h_0..h_{L-1} (row-major L x H) for the inputs of `sequence`.
  void forward(TokenSpan sequence, std::size_t steps, std::vector<double>& hidden) const;
  void logits(const double* h, std::span<double> out) const;

  int vocab_;
  int hidden_;
  Layout at_;
  std::vector<double> theta_;
};

}  // namespace gdc

#endif  // GDC_TINY_RNN_H_
