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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "gdc/error.h"
#include "test_util.h"

namespace gdc {
namespace {

using testing::code_of;

CartographyMap map_with(const std::vector<Quadrant>& q, std::vector<double> m = {}) {
  CartographyMap map;
  const std::size_t n = q.size();
  for (std::size_t i = 0; i < n; ++i) map.sample_ids.push_back("s" + std::to_string(i));
  map.quadrants = q;
  map.difficulty.assign(n, 1.0);
  map.memorization = m.empty() ? std::vector<double>(n, 0.0) : std::move(m);
  map.coverage.assign(n, 1.0);
  map.fitted.assign(n, 1);
  map.epochs = 10;
  return map;
}

TEST(PlanTest, OnePerQuadrant) {
  const auto map = map_with({Quadrant::kStableEasy, Quadrant::kAmbiguousHard,
                             Quadrant::kHotspotMemorized, Quadrant::kNoisyOutlier});
  const SamplingPlan p = plan(map, {2.0, 0.5, true});
  EXPECT_EQ(p.weights, (std::vector<double>{1, 2, 0.5, 0}));
  EXPECT_NEAR(p.probabilities[0], 2.0 / 7.0, 1e-15);
  EXPECT_NEAR(p.probabilities[1], 4.0 / 7.0, 1e-15);
  EXPECT_NEAR(p.probabilities[2], 1.0 / 7.0, 1e-15);
  EXPECT_EQ(p.probabilities[3], 0.0);
  EXPECT_EQ(p.removed_ids(), std::vector<std::string>{"s3"});
  EXPECT_EQ(p.n_hot, 1u);
  EXPECT_DOUBLE_EQ(p.delta_alpha, 0.5);
  EXPECT_DOUBLE_EQ(p.delta_alpha_total, 1.5);
  EXPECT_NO_THROW(p.validate());
}

TEST(PlanTest, NoOpLimitIsUniform) {
  const auto map = map_with({Quadrant::kStableEasy, Quadrant::kAmbiguousHard,
                             Quadrant::kHotspotMemorized, Quadrant::kNoisyOutlier});
  const SamplingPlan p = plan(map, {1.0 + 1e-12, 1.0 - 1e-12, false});
  for (double pr : p.probabilities) EXPECT_NEAR(pr, 0.25, 1e-11);
  EXPECT_EQ(p.removed_count(), 0u);
}

TEST(PlanTest, AllRemovedIsEmptyPlan) {
  const auto map = map_with({Quadrant::kNoisyOutlier, Quadrant::kNoisyOutlier});
  EXPECT_EQ(code_of([&] { plan(map, {2.0, 0.5, true}); }), ErrorCode::kEmptyPlan);
}

TEST(PlanTest, PolicyValidation) {
  const auto map = map_with({Quadrant::kStableEasy});
  EXPECT_EQ(code_of([&] { plan(map, {1.0, 0.5, false}); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of([&] { plan(map, {2.0, 1.0, false}); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of([&] { plan(map, {2.0, -0.1, false}); }), ErrorCode::kInvalidConfig);
}

TEST(PlanTest, ProbabilitiesSumToOne) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<Quadrant> q(1 + rng() % 300);
    for (auto& x : q) x = static_cast<Quadrant>(rng() % 4);
    if (std::all_of(q.begin(), q.end(), [](Quadrant x) { return x == Quadrant::kNoisyOutlier; })) {
      q[0] = Quadrant::kStableEasy;
    }
    const InterventionPolicy pol{1.1 + (rng() % 50) / 10.0, (rng() % 10) / 10.0, rng() % 2 == 0};
    const SamplingPlan p = plan(map_with(q), pol);
    const double total = std::accumulate(p.probabilities.begin(), p.probabilities.end(), 0.0);
    EXPECT_NEAR(total, 1.0, 1e-9);
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (p.removed[i]) {
        EXPECT_EQ(p.weights[i], 0.0);
        EXPECT_EQ(p.probabilities[i], 0.0);
      }
    }
  }
}

TEST(PlanTest, UpsamplingIsCapped) {
  std::vector<Quadrant> q(40, Quadrant::kStableEasy);
  q[0] = Quadrant::kAmbiguousHard;
  for (int i = 1; i < 38; ++i) q[i] = Quadrant::kNoisyOutlier;
  const SamplingPlan p = plan(map_with(q), {50.0, 0.5, true});
  EXPECT_NEAR(p.probabilities[0], kUpsampleProbabilityCap, 1e-12);
  EXPECT_NEAR(p.probabilities[38], 0.475, 1e-12);
  const SamplingPlan tiny =
      plan(map_with({Quadrant::kAmbiguousHard, Quadrant::kStableEasy}), {50.0, 0.5, false});
  EXPECT_NEAR(tiny.probabilities[0], 50.0 / 51.0, 1e-12);
}

TEST(PlanTest, DeltaAlphaMonotone) {
  std::vector<Quadrant> q(30, Quadrant::kStableEasy);
  for (int i = 0; i < 6; ++i) q[i] = Quadrant::kHotspotMemorized;
  double previous = std::numeric_limits<double>::infinity();
  for (double a : {0.0, 0.2, 0.4, 0.6, 0.8, 0.99}) {
    const double total = plan(map_with(q), {2.0, a, false}).delta_alpha_total;
    EXPECT_LE(total, previous);
    previous = total;
  }
  double last = -1.0;
  for (int hot = 0; hot <= 12; ++hot) {
    std::vector<Quadrant> h(30, Quadrant::kStableEasy);
    for (int i = 0; i < hot; ++i) h[i] = Quadrant::kHotspotMemorized;
    const double total = plan(map_with(h), {2.0, 0.3, false}).delta_alpha_total;
    EXPECT_GE(total, last);
    last = total;
  }
}

TEST(PlanTest, LossMultiplierModeUsesOneMechanism) {
  const auto map = map_with({Quadrant::kStableEasy, Quadrant::kAmbiguousHard,
                             Quadrant::kHotspotMemorized, Quadrant::kNoisyOutlier});
  const SamplingPlan p = plan(map, {2.0, 0.5, true, WeightingMode::kLossMultiplier});
  EXPECT_NEAR(p.probabilities[0], 1.0 / 3.0, 1e-15);
  EXPECT_EQ(p.probabilities[3], 0.0);
  EXPECT_EQ(p.loss_multipliers, (std::vector<double>{1, 2, 0.5, 0}));
  SamplingPlan both = p;
  both.probabilities = {2.0 / 7, 4.0 / 7, 1.0 / 7, 0};
  EXPECT_EQ(code_of([&] { both.validate(); }), ErrorCode::kInvalidConfig);
}

TEST(PlanTopMemorizedTest, OrderAndCount) {
  const auto q = std::vector<Quadrant>(10, Quadrant::kStableEasy);
  auto map = map_with(q, {0.1, 0.5, 0.0, 0.5, 0.2, 0, 0, 0, 0, 0.3});
  map.difficulty[3] = 2.0;  // wins the tie with sample 1
  const auto order = memorization_order(map);
  EXPECT_EQ(std::vector<std::size_t>(order.begin(), order.begin() + 4),
            (std::vector<std::size_t>{3, 1, 9, 4}));
  const SamplingPlan p = plan_top_memorized(map, 0.3);
  EXPECT_EQ(p.n_hot, 3u);
  EXPECT_EQ(p.removed_ids(), (std::vector<std::string>{"s1", "s3", "s9"}));
  EXPECT_DOUBLE_EQ(p.delta_alpha_total, 3.0);
  const SamplingPlan none = plan_top_memorized(map, 0.0);
  EXPECT_EQ(none.n_hot, 0u);
  EXPECT_EQ(none.probabilities, SamplingPlan::uniform(map.sample_ids).probabilities);
  const SamplingPlan half = plan_top_memorized(map, 0.2, 0.5);
  EXPECT_EQ(half.removed_count(), 0u);
  EXPECT_DOUBLE_EQ(half.delta_alpha, 0.5);
}

TEST(BoundTest, FormulaAndLinearity) {
  EXPECT_NEAR(stability_gap_bound(0.1, 0.2, 5), 0.2, 1e-15);
  EXPECT_EQ(stability_gap_bound(0.0, 0.2, 5), 0.0);
  EXPECT_EQ(stability_gap_bound(0.1, 0.0, 5), 0.0);
  EXPECT_EQ(stability_gap_bound(0.1, 0.2, 0), 0.0);
  const double base = stability_gap_bound(0.3, 0.7, 4);
  for (double k : {2.0, 3.0, 10.0}) {
    EXPECT_NEAR(stability_gap_bound(0.3 * k, 0.7, 4), k * base, 1e-12);
    EXPECT_NEAR(stability_gap_bound(0.3, 0.7 * k, 4), k * base, 1e-12);
    EXPECT_NEAR(stability_gap_bound(0.3, 0.7, static_cast<std::size_t>(4 * k)), k * base, 1e-12);
  }
  EXPECT_EQ(code_of([] { stability_gap_bound(-1.0, 0.2, 1); }), ErrorCode::kInvalidConfig);
}

TEST(SamplerTest, UniformFrequencies) {
  const auto p = SamplingPlan::uniform({"a", "b", "c", "d"});
  WeightedSampler s = apply_plan_to_sampler(p, 5);
  std::vector<int> hits(4);
  for (int k = 0; k < 100000; ++k) ++hits[s.next()];
  for (int h : hits) EXPECT_NEAR(h / 1e5, 0.25, 0.01);
}

TEST(SamplerTest, ChiSquareAgainstPlan) {
  const auto map = map_with({Quadrant::kStableEasy, Quadrant::kAmbiguousHard,
                             Quadrant::kHotspotMemorized, Quadrant::kNoisyOutlier});
  const SamplingPlan p = plan(map, {2.0, 0.5, true});
  WeightedSampler s = apply_plan_to_sampler(p, 99);
  std::vector<double> hits(4);
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) hits[s.next()] += 1.0;
  EXPECT_EQ(hits[3], 0.0);
  double chi2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double expected = draws * p.probabilities[i];
    chi2 += (hits[i] - expected) * (hits[i] - expected) / expected;
  }
  // 2 degrees of freedom; 13.8 is the 0.999 quantile.
  EXPECT_LT(chi2, 13.8);
}

TEST(SamplerTest, SameSeedSameStream) {
  const std::vector<double> w{0.3, 1.0, 0.0, 2.5};
  WeightedSampler a(w, 42), b(w, 42), c(w, 43);
  int differ = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differ += x != c.next();
    EXPECT_NE(x, 2u);
  }
  EXPECT_GT(differ, 0);
}

}  // namespace
}  // namespace gdc
