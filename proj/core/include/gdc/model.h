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

#ifndef GDC_MODEL_H_
#define GDC_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gdc/corpus.h"

namespace gdc {

enum class ModelFamily : std::uint8_t {
  kConvexLM = 1,  // softmax over n-gram context indicators; convex in theta
  kTinyRNN = 2,   // single tanh recurrent cell + softmax; nonconvex
};

std::string_view model_family_name(ModelFamily family);
ModelFamily parse_model_family(std::string_view name);

// Autoregressive model over a small vocabulary. A sequence's loss is the mean
// per-token negative log-likelihood in nats; every token is predicted, the
// first one from an empty (beginning-of-sequence) context.
class Model {
 public:
  virtual ~Model() = default;

  virtual ModelFamily family() const = 0;
  virtual int vocab_size() const = 0;
  virtual std::unique_ptr<Model> clone() const = 0;

  virtual std::span<double> parameters() = 0;
  virtual std::span<const double> parameters() const = 0;
  void set_parameters(std::span<const double> theta);

  virtual double sequence_loss(TokenSpan sequence) const = 0;

  // Adds scale * d(sequence_loss)/d(theta) into `gradient` (size of theta).
  virtual void accumulate_gradient(TokenSpan sequence, double scale,
                                   std::span<double> gradient) const = 0;

  virtual double squared_gradient_norm(TokenSpan sequence) const = 0;

  // theta <- (1 - lr * weight_decay) * theta - lr * sum_i coeff_i * grad_i,
  // with every gradient taken at the pre-step theta.
  virtual void sgd_step(std::span<const TokenSpan> batch, std::span<const double> coefficients,
                        double learning_rate, double weight_decay) = 0;

  // Log-probabilities of the next token after `context`.
  virtual std::vector<double> next_token_log_probs(TokenSpan context) const = 0;

  // Family-specific integers needed to rebuild the parameter layout.
  virtual std::vector<std::uint64_t> dimensions() const = 0;
  // Family-specific lookup tables (n-gram keys for ConvexLM, empty otherwise).
  virtual std::vector<std::uint64_t> auxiliary() const = 0;
};

// Token-weighted mean loss over a set of sequences, in nats.
double mean_token_nll(const Model& model, std::span<const TokenSpan> sequences);

// Greedy continuation: the `count` most likely tokens after `prefix`.
std::vector<Token> greedy_decode(const Model& model, TokenSpan prefix, std::size_t count);

// Binary blob: "GDCP", u16 version (1), u8 family, u64 count + u64 dimensions,
// u64 count + u64 auxiliary keys, u64 count + float64 parameters, u32 CRC-32 of
// every preceding byte. Little-endian throughout.
std::string serialize_model(const Model& model);
std::unique_ptr<Model> deserialize_model(std::string_view bytes);
void save_model(const Model& model, const std::filesystem::path& path);
std::unique_ptr<Model> load_model(const std::filesystem::path& path);

}  // namespace gdc

#endif  // GDC_MODEL_H_
