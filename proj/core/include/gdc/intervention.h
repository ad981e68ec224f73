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

#ifndef GDC_INTERVENTION_H_
#define GDC_INTERVENTION_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gdc/cartography.h"

namespace gdc {

// Where a down-weight takes effect. Exactly one mechanism is active per plan.
enum class WeightingMode {
  kSampling,        // weights reshape the sampling distribution
  kLossMultiplier,  // uniform sampling over retained samples, weights scale the loss
};

struct InterventionPolicy {
  double gamma = 2.0;       // up-sample factor for AmbiguousHard
  double alpha_down = 0.5;  // weight for HotspotMemorized
  bool remove_noisy = false;
  WeightingMode mode = WeightingMode::kSampling;

  void validate() const;
};

// No single sample may exceed this probability through up-sampling once the
// corpus has at least kUpsampleCapMinSamples samples.
inline constexpr double kUpsampleProbabilityCap = 0.05;
inline constexpr std::size_t kUpsampleCapMinSamples = 20;

struct SamplingPlan {
  WeightingMode mode = WeightingMode::kSampling;
  std::vector<std::string> sample_ids;
  std::vector<double> weights;           // 0 for removed samples
  std::vector<double> probabilities;     // sampling distribution, sums to 1
  std::vector<double> loss_multipliers;  // all 1 in sampling mode
  std::vector<std::uint8_t> removed;
  double delta_alpha = 0.0;              // per-example weight decrease on hotspots
  double delta_alpha_total = 0.0;        // aggregate pruned weight
  std::size_t n_hot = 0;

  std::size_t size() const { return sample_ids.size(); }
  std::size_t removed_count() const;
  std::vector<std::string> removed_ids() const;

  // Plan that changes nothing: every weight 1, uniform probabilities.
  static SamplingPlan uniform(std::vector<std::string> sample_ids);

  // Throws kInvalidConfig on a broken invariant (probabilities off by more than
  // 1e-9, removed samples with weight, both mechanisms active at once).
  void validate() const;
};

// Plan from explicit per-sample weights (0 removes). Delta fields stay zero.
SamplingPlan plan_from_weights(std::vector<std::string> sample_ids, std::vector<double> weights,
                               WeightingMode mode = WeightingMode::kSampling);

// Quadrant 0 keeps weight 1, quadrant 1 gets gamma (capped), quadrant 2 gets
// alpha_down, quadrant 3 gets 0 when remove_noisy and 1 otherwise.
SamplingPlan plan(const CartographyMap& map, const InterventionPolicy& policy);

// Targets the round(fraction * N) samples with the highest memorization score
// (ties: higher difficulty first, then input order) and gives them
// `target_weight`; 0 removes them. The targeted samples count as n_hot.
SamplingPlan plan_top_memorized(const CartographyMap& map, double fraction,
                                double target_weight = 0.0,
                                WeightingMode mode = WeightingMode::kSampling);

// Indices of `map` sorted by descending memorization score, with the tie
// order used by plan_top_memorized.
std::vector<std::size_t> memorization_order(const CartographyMap& map);

// Lower bound on the reduction in expected generalization gap from
// decreasing the weight of n_hot examples by delta_alpha each: 2*beta*da*n.
double stability_gap_bound(double beta, double delta_alpha, std::size_t n_hot);

// Deterministic i.i.d. draws from a discrete distribution by inverse CDF.
// Zero-probability entries are never returned.
class WeightedSampler {
 public:
  WeightedSampler(std::span<const double> weights, std::uint64_t seed);

  // Draws from the sampler's own stream.
  std::size_t next() { return draw(rng_); }
  // Draws from a caller-owned stream, leaving the internal one untouched.
  std::size_t draw(std::mt19937_64& rng) const;
  std::size_t size() const { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
  std::mt19937_64 rng_;
};

WeightedSampler apply_plan_to_sampler(const SamplingPlan& plan, std::uint64_t seed);

}  // namespace gdc

#endif  // GDC_INTERVENTION_H_
