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

#include "gdc/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include "gdc/convex_lm.h"
#include "gdc/error.h"
#include "gdc/parallel.h"
#include "gdc/tiny_rnn.h"

namespace gdc {
namespace {

// Plan arrays reordered to the corpus's train order.
struct AlignedPlan {
  std::vector<double> probabilities;
  std::vector<double> multipliers;
};

AlignedPlan align(const SamplingPlan& plan, const std::vector<std::string>& ids) {
  if (plan.size() != ids.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "plan covers " + std::to_string(plan.size()) + " samples, corpus has " +
                    std::to_string(ids.size()) + " train samples");
  }
  std::unordered_map<std::string, std::size_t> where;
  for (std::size_t i = 0; i < plan.size(); ++i) where.emplace(plan.sample_ids[i], i);
  AlignedPlan out;
  out.probabilities.resize(ids.size());
  out.multipliers.resize(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto it = where.find(ids[i]);
    if (it == where.end()) {
      throw Error(ErrorCode::kUnknownSample, "train sample '" + ids[i] + "' is not in the plan");
    }
    out.probabilities[i] = plan.probabilities[it->second];
    out.multipliers[i] = plan.loss_multipliers[it->second];
  }
  return out;
}

TrainResult run(const Model& initial, const Corpus& corpus, const TrainConfig& config,
                const SamplingPlan* plan, std::optional<std::size_t> skip) {
  config.validate();
  const auto sequences = corpus.train_sequences();
  const std::size_t n = sequences.size();
  if (n == 0) throw Error(ErrorCode::kEmptyInput, "corpus has no train samples");
  if (initial.vocab_size() != corpus.vocab_size()) {
    throw Error(ErrorCode::kDimensionMismatch, "model and corpus vocabularies differ");
  }
  const auto ids = corpus.train_ids();
  const SamplingPlan uniform = SamplingPlan::uniform(ids);
  const WeightedSampler uniform_sampler(uniform.probabilities, 0);
  std::optional<AlignedPlan> aligned;
  std::optional<WeightedSampler> plan_sampler;
  if (plan != nullptr) {
    aligned = align(*plan, ids);
    plan_sampler.emplace(aligned->probabilities, 0);
  }

  std::unique_ptr<Model> model = initial.clone();
  std::mt19937_64 rng(config.seed);
  const auto initial_losses = sample_losses(*model, sequences);
  const double initial_mean =
      std::accumulate(initial_losses.begin(), initial_losses.end(), 0.0) / static_cast<double>(n);

  std::vector<double> values;
  values.reserve(config.epochs * n);
  std::vector<std::vector<double>> snapshots;
  std::vector<double> epoch_means;
  std::vector<TokenSpan> batch;
  std::vector<double> coeffs;
  std::size_t steps = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const bool planned = aligned.has_value() && epoch > config.burn_in;
    const WeightedSampler& sampler = planned ? *plan_sampler : uniform_sampler;
    const double lr = config.step_size(epoch);
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t draws = std::min(config.batch_size, n - start);
      batch.clear();
      coeffs.clear();
      for (std::size_t d = 0; d < draws; ++d) {
        const std::size_t i = sampler.draw(rng);
        if (skip && *skip == i) continue;
        batch.push_back(sequences[i]);
        coeffs.push_back(planned ? aligned->multipliers[i] : 1.0);
      }
      if (batch.empty()) continue;
      for (double& c : coeffs) c /= static_cast<double>(batch.size());
      model->sgd_step(batch, coeffs, lr, config.weight_decay);
      ++steps;
    }
    const auto row = sample_losses(*model, sequences);
    const double mean = std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(n);
    if (!std::isfinite(mean) || mean > config.divergence_factor * initial_mean) {
      throw Error(ErrorCode::kDivergence,
                  "mean train loss " + std::to_string(mean) + " at epoch " +
                      std::to_string(epoch) + " exceeds " +
                      std::to_string(config.divergence_factor) + "x the initial " +
                      std::to_string(initial_mean));
    }
    values.insert(values.end(), row.begin(), row.end());
    epoch_means.push_back(mean);
    if (config.record_snapshots) {
      const auto theta = model->parameters();
      snapshots.emplace_back(theta.begin(), theta.end());
    }
  }
  TrainResult result{std::move(model), LossTrace(ids, config.epochs, std::move(values)),
                     std::move(snapshots), initial_mean, std::move(epoch_means), steps};
  return result;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::unique_ptr<Model> make_model(const ModelSpec& spec, const Corpus& corpus, std::uint64_t seed) {
  switch (spec.family) {
    case ModelFamily::kConvexLM: {
      const auto seqs = corpus.train_sequences();
      return std::make_unique<ConvexLM>(corpus.vocab_size(), spec.order, seqs, seed, spec.init_scale);
    }
    case ModelFamily::kTinyRNN:
      return std::make_unique<TinyRNN>(corpus.vocab_size(), spec.hidden, seed, spec.init_scale);
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown model family");
}

void TrainConfig::validate() const {
  if (epochs < 2) throw Error(ErrorCode::kInvalidConfig, "training needs at least 2 epochs");
  if (burn_in < 1 || burn_in >= epochs) {
    throw Error(ErrorCode::kInvalidConfig, "burn-in must satisfy 1 <= T_e < T");
  }
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::kInvalidConfig, "learning rate must be finite and >= 0");
  }
  if (batch_size < 1) throw Error(ErrorCode::kInvalidConfig, "batch size must be >= 1");
  if (!(weight_decay >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "weight decay must be >= 0");
  if (!(divergence_factor > 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "divergence factor must exceed 1");
  }
}

double TrainConfig::step_size(std::size_t epoch) const {
  return schedule == StepSchedule::kConstant ? learning_rate
                                             : learning_rate / static_cast<double>(epoch);
}

std::vector<double> sample_losses(const Model& model, std::span<const TokenSpan> samples) {
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = model.sequence_loss(samples[i]);
  return out;
}

TrainResult train(const Model& initial, const Corpus& corpus, const TrainConfig& config,
                  const SamplingPlan* plan) {
  return run(initial, corpus, config, plan, std::nullopt);
}

TrainResult train_leave_one_out(const Model& initial, const Corpus& corpus,
                                const TrainConfig& config, std::size_t removed_index,
                                const SamplingPlan* plan) {
  if (removed_index >= corpus.train().size()) {
    throw Error(ErrorCode::kBadRange, "leave-one-out index out of range");
  }
  return run(initial, corpus, config, plan, removed_index);
}

std::vector<double> influence_sums(const Model& model_template,
                                   std::span<const std::vector<double>> snapshots,
                                   std::span<const TokenSpan> samples) {
  if (snapshots.empty()) {
    throw Error(ErrorCode::kSnapshotsAbsent,
                "influence sums need per-epoch parameter snapshots (enable record_snapshots)");
  }
  std::vector<double> sums(samples.size(), 0.0);
  std::unique_ptr<Model> model = model_template.clone();
  for (const auto& theta : snapshots) {
    model->set_parameters(theta);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      sums[i] += model->squared_gradient_norm(samples[i]);
    }
  }
  return sums;
}

StabilityEstimate loo_stability_estimate(const Model& initial, const Corpus& corpus,
                                         const TrainConfig& config, std::size_t probes,
                                         std::uint64_t seed) {
  const std::size_t n = corpus.train().size();
  if (probes == 0 || probes > n) {
    throw Error(ErrorCode::kInvalidConfig, "probe count must lie in [1, N]");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < probes; ++k) {
    std::swap(order[k], order[k + static_cast<std::size_t>(rng() % (n - k))]);
  }
  StabilityEstimate est;
  est.removed.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(probes));

  std::vector<TokenSpan> probe_set = corpus.train_sequences();
  const auto heldout = corpus.heldout_sequences();
  probe_set.insert(probe_set.end(), heldout.begin(), heldout.end());

  const TrainResult base = train(initial, corpus, config);
  const auto base_losses = sample_losses(*base.model, probe_set);
  est.per_replica.assign(probes, 0.0);
  parallel_for(probes, [&](std::size_t k) {
    const TrainResult replica = train_leave_one_out(initial, corpus, config, est.removed[k]);
    const auto losses = sample_losses(*replica.model, probe_set);
    double worst = 0.0;
    for (std::size_t z = 0; z < losses.size(); ++z) {
      worst = std::max(worst, std::abs(losses[z] - base_losses[z]));
    }
    est.per_replica[k] = worst;
  });
  est.beta_hat = *std::max_element(est.per_replica.begin(), est.per_replica.end());
  return est;
}

double generalization_gap(const Model& model, const Corpus& corpus, const SamplingPlan* plan) {
  const auto train_seqs = corpus.train_sequences();
  const auto heldout_seqs = corpus.heldout_sequences();
  if (train_seqs.empty() || heldout_seqs.empty()) {
    throw Error(ErrorCode::kEmptyInput, "generalization gap needs train and held-out samples");
  }
  const auto heldout = sample_losses(model, heldout_seqs);
  const double heldout_mean =
      std::accumulate(heldout.begin(), heldout.end(), 0.0) / static_cast<double>(heldout.size());
  const auto train_losses = sample_losses(model, train_seqs);
  double train_mean = 0.0;
  if (plan == nullptr) {
    train_mean = std::accumulate(train_losses.begin(), train_losses.end(), 0.0) /
                 static_cast<double>(train_losses.size());
  } else {
    const AlignedPlan aligned = align(*plan, corpus.train_ids());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < train_losses.size(); ++i) {
      const double w = aligned.probabilities[i] * aligned.multipliers[i];
      num += w * train_losses[i];
      den += w;
    }
    train_mean = num / den;
  }
  return heldout_mean - train_mean;
}

}  // namespace gdc
