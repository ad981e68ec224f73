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

#ifndef GDC_TRAINER_H_
#define GDC_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "gdc/corpus.h"
#include "gdc/intervention.h"
#include "gdc/loss_trace.h"
#include "gdc/model.h"

namespace gdc {

// Independent child seed for a named stream (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Which model to build and how to initialize it.
struct ModelSpec {
  ModelFamily family = ModelFamily::kConvexLM;
  int order = 3;      // ConvexLM context length
  int hidden = 32;    // TinyRNN state size
  double init_scale = 0.01;
};

// ConvexLM takes its feature dictionary from the corpus's train split.
std::unique_ptr<Model> make_model(const ModelSpec& spec, const Corpus& corpus, std::uint64_t seed);

enum class StepSchedule {
  kConstant,      // eta_t = learning_rate
  kInverseEpoch,  // eta_t = learning_rate / t
};

struct TrainConfig {
  std::size_t epochs = 40;
  std::size_t burn_in = 8;  // a plan takes over from epoch burn_in + 1
  double learning_rate = 1.0;
  StepSchedule schedule = StepSchedule::kConstant;
  std::size_t batch_size = 1;
  double weight_decay = 0.0;
  std::uint64_t seed = 1;
  bool record_snapshots = false;
  // Abort once an epoch's mean train loss exceeds this multiple of the
  // initial mean loss.
  double divergence_factor = 10.0;

  void validate() const;
  double step_size(std::size_t epoch) const;
};

struct TrainResult {
  std::unique_ptr<Model> model;
  LossTrace trace;                            // train samples, epochs 1..T
  std::vector<std::vector<double>> snapshots;  // epoch-end parameters when recorded
  double initial_mean_loss = 0.0;
  std::vector<double> epoch_mean_loss;
  std::size_t steps = 0;
};

// Mini-batch SGD. Each epoch draws N train indices i.i.d. from the sampling
// distribution (uniform, or the plan's from epoch burn_in + 1), steps on
// consecutive batches, then evaluates every train sample to fill one trace
// row. Removed samples are never drawn but still evaluated.
TrainResult train(const Model& initial, const Corpus& corpus, const TrainConfig& config,
                  const SamplingPlan* plan = nullptr);

// Same draws as train() with the same seed; draws of `removed_index` are
// dropped from their batch.
TrainResult train_leave_one_out(const Model& initial, const Corpus& corpus,
                                const TrainConfig& config, std::size_t removed_index,
                                const SamplingPlan* plan = nullptr);

// Inf(i) = sum over snapshots of ||grad loss_i||^2.
std::vector<double> influence_sums(const Model& model_template,
                                   std::span<const std::vector<double>> snapshots,
                                   std::span<const TokenSpan> samples);

struct StabilityEstimate {
  double beta_hat = 0.0;               // empirical lower estimate of beta
  std::vector<std::size_t> removed;    // train indices left out, one per replica
  std::vector<double> per_replica;     // max deviation per replica
};

// Trains `probes` leave-one-out replicas and reports the largest loss change
// over every train and held-out sample.
StabilityEstimate loo_stability_estimate(const Model& initial, const Corpus& corpus,
                                         const TrainConfig& config, std::size_t probes,
                                         std::uint64_t seed);

// Mean held-out loss minus mean train loss, per sample, in nats. With a plan
// the train mean is weighted by sampling probability times loss multiplier.
double generalization_gap(const Model& model, const Corpus& corpus,
                          const SamplingPlan* plan = nullptr);

std::vector<double> sample_losses(const Model& model, std::span<const TokenSpan> samples);

}  // namespace gdc

#endif  // GDC_TRAINER_H_
