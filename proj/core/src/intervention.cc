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

#include "gdc/intervention.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gdc/error.h"

namespace gdc {
namespace {

// Water-fill the capped entries so none exceeds the cap share of the total.
void cap_upsampled(std::vector<double>& weights, const std::vector<std::uint8_t>& eligible) {
  if (weights.size() < kUpsampleCapMinSamples) return;
  std::vector<std::uint8_t> capped(weights.size(), 0);
  for (int iter = 0; iter < 64; ++iter) {
    double free_total = 0.0;
    std::size_t n_capped = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (capped[i]) {
        ++n_capped;
      } else {
        free_total += weights[i];
      }
    }
    const double denom = 1.0 - kUpsampleProbabilityCap * static_cast<double>(n_capped);
    if (denom <= 0.0) return;
    const double cap_weight = kUpsampleProbabilityCap * free_total / denom;
    bool changed = false;
    double total = free_total + cap_weight * static_cast<double>(n_capped);
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (capped[i]) {
        weights[i] = cap_weight;
      } else if (eligible[i] && weights[i] / total > kUpsampleProbabilityCap) {
        capped[i] = 1;
        changed = true;
      }
    }
    if (!changed) return;
  }
}

void finish(SamplingPlan& out) {
  const std::size_t n = out.weights.size();
  out.removed.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) out.removed[i] = out.weights[i] == 0.0 ? 1 : 0;
  if (out.removed_count() == n) {
    throw Error(ErrorCode::kEmptyPlan, "the plan removes every sample");
  }
  out.probabilities.assign(n, 0.0);
  out.loss_multipliers.assign(n, 1.0);
  if (out.mode == WeightingMode::kSampling) {
    const double total = std::accumulate(out.weights.begin(), out.weights.end(), 0.0);
    if (!(total > 0.0)) throw Error(ErrorCode::kEmptyPlan, "plan weights sum to zero");
    for (std::size_t i = 0; i < n; ++i) out.probabilities[i] = out.weights[i] / total;
  } else {
    const double retained = static_cast<double>(n - out.removed_count());
    for (std::size_t i = 0; i < n; ++i) {
      out.probabilities[i] = out.removed[i] ? 0.0 : 1.0 / retained;
      out.loss_multipliers[i] = out.removed[i] ? 0.0 : out.weights[i];
    }
  }
  out.validate();
}

}  // namespace

void InterventionPolicy::validate() const {
  if (!(gamma > 1.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::kInvalidConfig, "gamma must be > 1");
  }
  if (!(alpha_down >= 0.0 && alpha_down < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "alpha_down must lie in [0, 1)");
  }
}

std::size_t SamplingPlan::removed_count() const {
  return static_cast<std::size_t>(std::count(removed.begin(), removed.end(), 1));
}

std::vector<std::string> SamplingPlan::removed_ids() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < removed.size(); ++i) {
    if (removed[i]) out.push_back(sample_ids[i]);
  }
  return out;
}

SamplingPlan SamplingPlan::uniform(std::vector<std::string> sample_ids) {
  if (sample_ids.empty()) throw Error(ErrorCode::kEmptyPlan, "no samples to plan");
  SamplingPlan out;
  out.sample_ids = std::move(sample_ids);
  out.weights.assign(out.sample_ids.size(), 1.0);
  finish(out);
  return out;
}

void SamplingPlan::validate() const {
  const std::size_t n = sample_ids.size();
  if (weights.size() != n || probabilities.size() != n || removed.size() != n ||
      loss_multipliers.size() != n) {
    throw Error(ErrorCode::kInvalidConfig, "plan arrays differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i] < 0.0 || probabilities[i] < 0.0) {
      throw Error(ErrorCode::kInvalidConfig, "negative plan weight");
    }
    if (removed[i] && (weights[i] != 0.0 || probabilities[i] != 0.0)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "removed sample '" + sample_ids[i] + "' still carries weight");
    }
    total += probabilities[i];
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidConfig, "plan probabilities sum to " + std::to_string(total));
  }
  const bool reweights_loss = std::any_of(loss_multipliers.begin(), loss_multipliers.end(),
                                          [](double m) { return m != 1.0 && m != 0.0; });
  if (mode == WeightingMode::kSampling && reweights_loss) {
    throw Error(ErrorCode::kInvalidConfig,
                "sampling-mode plan must not also scale the loss");
  }
  if (mode == WeightingMode::kLossMultiplier) {
    const double retained = static_cast<double>(n - removed_count());
    for (std::size_t i = 0; i < n; ++i) {
      if (!removed[i] && std::abs(probabilities[i] - 1.0 / retained) > 1e-12) {
        throw Error(ErrorCode::kInvalidConfig,
                    "loss-multiplier plan must sample retained samples uniformly");
      }
    }
  }
}

SamplingPlan plan_from_weights(std::vector<std::string> sample_ids, std::vector<double> weights,
                               WeightingMode mode) {
  if (sample_ids.empty()) throw Error(ErrorCode::kEmptyPlan, "no samples to plan");
  if (sample_ids.size() != weights.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "plan ids and weights differ in length");
  }
  SamplingPlan out;
  out.mode = mode;
  out.sample_ids = std::move(sample_ids);
  out.weights = std::move(weights);
  finish(out);
  return out;
}

SamplingPlan plan(const CartographyMap& map, const InterventionPolicy& policy) {
  policy.validate();
  const std::size_t n = map.size();
  if (n == 0) throw Error(ErrorCode::kEmptyPlan, "no samples to plan");
  SamplingPlan out;
  out.mode = policy.mode;
  out.sample_ids = map.sample_ids;
  out.weights.resize(n);
  out.delta_alpha = 1.0 - policy.alpha_down;
  std::vector<std::uint8_t> upsampled(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    switch (map.quadrants[i]) {
      case Quadrant::kStableEasy:
        out.weights[i] = 1.0;
        break;
      case Quadrant::kAmbiguousHard:
        out.weights[i] = policy.gamma;
        upsampled[i] = 1;
        break;
      case Quadrant::kHotspotMemorized:
        out.weights[i] = policy.alpha_down;
        out.delta_alpha_total += 1.0 - policy.alpha_down;
        ++out.n_hot;
        break;
      case Quadrant::kNoisyOutlier:
        out.weights[i] = policy.remove_noisy ? 0.0 : 1.0;
        if (policy.remove_noisy) out.delta_alpha_total += 1.0;
        break;
    }
  }
  cap_upsampled(out.weights, upsampled);
  finish(out);
  return out;
}

std::vector<std::size_t> memorization_order(const CartographyMap& map) {
  std::vector<std::size_t> order(map.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (map.memorization[a] != map.memorization[b]) {
      return map.memorization[a] > map.memorization[b];
    }
    return map.difficulty[a] > map.difficulty[b];
  });
  return order;
}

SamplingPlan plan_top_memorized(const CartographyMap& map, double fraction,
                                double target_weight, WeightingMode mode) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "pruning fraction must lie in [0, 1]");
  }
  if (!(target_weight >= 0.0 && target_weight < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "target weight must lie in [0, 1)");
  }
  const std::size_t n = map.size();
  if (n == 0) throw Error(ErrorCode::kEmptyPlan, "no samples to plan");
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  SamplingPlan out;
  out.mode = mode;
  out.sample_ids = map.sample_ids;
  out.weights.assign(n, 1.0);
  out.delta_alpha = k > 0 ? 1.0 - target_weight : 0.0;
  const auto order = memorization_order(map);
  for (std::size_t r = 0; r < k; ++r) out.weights[order[r]] = target_weight;
  out.n_hot = k;
  out.delta_alpha_total = static_cast<double>(k) * out.delta_alpha;
  finish(out);
  return out;
}

double stability_gap_bound(double beta, double delta_alpha, std::size_t n_hot) {
  if (beta < 0.0 || delta_alpha < 0.0) {
    throw Error(ErrorCode::kInvalidConfig, "stability bound inputs must be >= 0");
  }
  return 2.0 * beta * delta_alpha * static_cast<double>(n_hot);
}

WeightedSampler::WeightedSampler(std::span<const double> weights, std::uint64_t seed)
    : rng_(seed) {
  if (weights.empty()) throw Error(ErrorCode::kEmptyInput, "sampler needs at least one weight");
  cumulative_.resize(weights.size());
  double running = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "negative sampler weight");
    running += weights[i];
    cumulative_[i] = running;
  }
  if (!(running > 0.0)) throw Error(ErrorCode::kEmptyPlan, "sampler weights sum to zero");
}

std::size_t WeightedSampler::draw(std::mt19937_64& rng) const {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  // Trailing zero-weight entries share the last cumulative value.
  auto idx = static_cast<std::size_t>(it - cumulative_.begin());
  while (idx > 0 && cumulative_[idx] == cumulative_[idx - 1]) --idx;
  return idx;
}

WeightedSampler apply_plan_to_sampler(const SamplingPlan& plan, std::uint64_t seed) {
  return WeightedSampler(plan.probabilities, seed);
}

}  // namespace gdc
