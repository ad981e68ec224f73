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

#ifndef GDC_CONVEX_LM_H_
#define GDC_CONVEX_LM_H_

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "gdc/model.h"

namespace gdc {

// Multinomial logistic next-token model. The logits for a position are
// the sum of a bias row and one weight row per context suffix of length
// 1..order that appears in the feature dictionary. The dictionary is fixed at
// construction from a set of sequences, so the loss is convex in theta.
class ConvexLM final : public Model {
 public:
  ConvexLM(int vocab_size, int order, std::span<const TokenSpan> dictionary_source,
           std::uint64_t seed, double init_scale = 0.01);
  // Rebuild from a serialized layout.
  ConvexLM(int vocab_size, int order, std::vector<std::uint64_t> keys,
           std::vector<double> theta);

  ModelFamily family() const override { return ModelFamily::kConvexLM; }
  int vocab_size() const override { return vocab_; }
  int order() const { return order_; }
  std::size_t feature_rows() const { return keys_.size() + 1; }
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
  std::vector<std::uint64_t> auxiliary() const override { return keys_; }

 private:
  struct Position {
    std::uint32_t rows[4];
    int count;
  };
  // Active feature rows for predicting sequence[p] (only sequence[0..p) used).
  Position features(TokenSpan sequence, std::size_t p) const;
  // Softmax probabilities into `probs`, returns -log p(target).
  double softmax_nll(const Position& pos, Token target, std::span<double> probs) const;
  std::uint64_t key(TokenSpan sequence, std::size_t p, int n) const;

  int vocab_;
  int order_;
  std::vector<std::uint64_t> keys_;
  std::unordered_map<std::uint64_t, std::uint32_t> rows_;
  std::vector<double> theta_;  // feature_rows() x vocab_, row 0 is the bias
};

}  // namespace gdc

#endif  // GDC_CONVEX_LM_H_
