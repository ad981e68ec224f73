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


#include "gdc/audit.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gdc/convex_lm.h"
#include "gdc/error.h"
#include "oracles.h"
#include "test_util.h"

namespace gdc {
namespace {

using testing::code_of;

TEST(AucTest, HandExample) {
  const std::vector<double> members{1, 2, 3}, nonmembers{2, 3, 4};
  // Pair enumeration: 3 + 2.5 + 1.5 wins out of 9.
  EXPECT_DOUBLE_EQ(oracle::pairwise_auc(members, nonmembers), 7.0 / 9.0);
  EXPECT_DOUBLE_EQ(auc_from_losses(members, nonmembers), 7.0 / 9.0);
}

TEST(AucTest, PerfectSeparationAndSymmetry) {
  EXPECT_EQ(auc_from_losses(std::vector<double>{0.1, 0.2}, std::vector<double>{0.3, 5.0}), 1.0);
  EXPECT_EQ(auc_from_losses(std::vector<double>{3.0, 4.0}, std::vector<double>{1.0}), 0.0);
  EXPECT_EQ(auc_from_losses(std::vector<double>{2.0, 2.0}, std::vector<double>{2.0}), 0.5);
}

TEST(AucTest, MatchesPairEnumerationWithTies) {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> a(1 + rng() % 30), b(1 + rng() % 30);
    for (double& x : a) x = static_cast<double>(rng() % 7);
    for (double& x : b) x = static_cast<double>(rng() % 7);
    EXPECT_NEAR(auc_from_losses(a, b), oracle::pairwise_auc(a, b), 1e-12);
  }
}

TEST(AucTest, InvariantUnderMonotoneTransforms) {
  std::mt19937_64 rng(32);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> a(80), b(90);
  for (double& x : a) x = n(rng);
  for (double& x : b) x = n(rng) + 0.4;
  const double base = auc_from_losses(a, b);
  auto f = [](std::vector<double> v) {
    for (double& x : v) x = std::exp(2.0 * x) + 7.0;
    return v;
  };
  EXPECT_DOUBLE_EQ(auc_from_losses(f(a), f(b)), base);
}

TEST(AucTest, ChanceLevelOnIdenticalDistributions) {
  std::mt19937_64 rng(33);
  std::gamma_distribution<double> g(2.0, 1.0);
  std::vector<double> a(200), b(200);
  for (double& x : a) x = g(rng);
  for (double& x : b) x = g(rng);
  EXPECT_NEAR(auc_from_losses(a, b), 0.5, 0.05);
  EXPECT_EQ(code_of([&] { auc_from_losses({}, b); }), ErrorCode::kEmptyInput);
}

TEST(PerplexityTest, UniformModelGivesVocabularySize) {
  Corpus c(64);
  c.add({"a", Split::kTrain, {1, 2, 3, 4, 5}});
  c.add({"b", Split::kHeldout, {9, 8, 7}});
  const auto m = make_model(ModelSpec{}, c, 1);
  std::vector<double> zero(m->parameters().size(), 0.0);
  m->set_parameters(zero);
  EXPECT_NEAR(perplexity(*m, c.heldout_sequences()), 64.0, 1e-9);
  EXPECT_EQ(code_of([&] { perplexity(*m, {}); }), ErrorCode::kEmptyInput);
}

TEST(PerplexityTest, TrainingLowersHeldoutPerplexity) {
  SyntheticCorpusConfig cc;
  cc.train_count = 150;
  cc.heldout_count = 40;
  const Corpus c = make_synthetic_corpus(cc);
  const auto init = make_model(ModelSpec{}, c, 2);
  TrainConfig t;
  t.epochs = 4;
  t.burn_in = 1;
  const TrainResult r = train(*init, c, t);
  const double before = perplexity(*init, c.heldout_sequences());
  const double after = perplexity(*r.model, c.heldout_sequences());
  EXPECT_GE(after, 1.0);
  EXPECT_LT(after, before);
}

TEST(ExtractionTest, UntrainedModelExtractsNothing) {
  SyntheticCorpusConfig cc;
  cc.train_count = 50;
  cc.heldout_count = 10;
  const Corpus c = inject_canaries(make_synthetic_corpus(cc), 5, 16, 1, 3);
  const auto init = make_model(ModelSpec{}, c, 4);
  const ExtractionResult r = extraction_attack(*init, c.canaries());
  EXPECT_EQ(r.success, 0.0);
  ASSERT_EQ(r.details.size(), 5u);
  EXPECT_EQ(r.details[0].prefix_length, 8u);
  EXPECT_EQ(r.details[0].suffix_length, 8u);
}

TEST(ExtractionTest, Errors) {
  Corpus c(8);
  c.add({"a", Split::kTrain, {1, 2, 3, 4}});
  const auto m = make_model(ModelSpec{}, c, 1);
  EXPECT_EQ(code_of([&] { extraction_attack(*m, c.canaries()); }), ErrorCode::kNoCanaries);
  const Corpus none = inject_canaries(c, 0, 4, 1, 1);
  EXPECT_EQ(code_of([&] { extraction_attack(*m, none.canaries()); }), ErrorCode::kNoCanaries);
  const Corpus one = inject_canaries(c, 1, 4, 1, 1);
  EXPECT_EQ(code_of([&] { extraction_attack(*m, one.canaries(), 1.0); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of([&] { extraction_attack(*m, one.canaries(), 0.1); }), ErrorCode::kInvalidConfig);
}

TEST(ExtractionTest, MemorizedCanaryIsExtracted) {
  Corpus c(16);
  c.add({"bg", Split::kTrain, {1, 2, 3, 1, 2, 3}});
  c.add({"h", Split::kHeldout, {3, 2, 1}});
  const Corpus with = inject_canaries(c, 1, 10, 1, 5);
  const auto init = make_model(ModelSpec{}, with, 1);
  TrainConfig t;
  t.epochs = 80;
  t.burn_in = 1;
  const TrainResult r = train(*init, with, t);
  const AuditReport rep = audit(*r.model, with);
  EXPECT_EQ(rep.extraction_success, 1.0);
  EXPECT_TRUE(rep.canaries[0].extracted);
  EXPECT_EQ(rep.canaries[0].matched_suffix_length, 5u);
}

TEST(AuditTest, ReportFieldsInRange) {
  SyntheticCorpusConfig cc;
  cc.train_count = 60;
  cc.heldout_count = 20;
  const Corpus c = leak_heldout(inject_canaries(make_synthetic_corpus(cc), 2, 16, 2, 1), 3, 2);
  const auto init = make_model(ModelSpec{}, c, 1);
  const AuditReport r = audit(*init, c);
  EXPECT_GE(r.perplexity, 1.0);
  EXPECT_GE(r.mi_auc, 0.0);
  EXPECT_LE(r.mi_auc, 1.0);
  ASSERT_TRUE(r.heldout_leakage.has_value());
  EXPECT_EQ(r.canaries.size(), 2u);
  EXPECT_EQ(r.model_family, "convex");
}

TEST(SweepTest, ZeroFractionReproducesBaseline) {
  SyntheticCorpusConfig cc;
  cc.train_count = 80;
  cc.heldout_count = 20;
  const Corpus c = inject_canaries(make_synthetic_corpus(cc), 2, 16, 2, 1);
  SweepConfig sc;
  sc.train.epochs = 5;
  sc.train.burn_in = 2;
  sc.cartography = CartographyConfig{2, EpsilonMode::kRelative, 0.3};
  sc.fractions = {0.0, 0.1};
  sc.seeds = {3, 4};
  const SweepCurve curve = prune_sweep(c, sc);
  ASSERT_EQ(curve.points.size(), 2u);
  EXPECT_EQ(curve.points[0].fraction, 0.0);
  EXPECT_EQ(curve.points[1].fraction, 0.1);
  ASSERT_EQ(curve.per_seed.size(), 2u);

  const auto init = make_model(sc.model, c, derive_seed(3, 0));
  TrainConfig t = sc.train;
  t.seed = derive_seed(3, 1);
  const AuditReport base = audit(*train(*init, c, t).model, c);
  EXPECT_EQ(curve.per_seed[0][0].extraction, base.extraction_success);
  EXPECT_EQ(curve.per_seed[0][0].perplexity, base.perplexity);
  EXPECT_EQ(curve.per_seed[0][0].perplexity_delta_pct, 0.0);
}

TEST(SweepTest, GridValidation) {
  Corpus c(8);
  c.add({"a", Split::kTrain, {1, 2, 3}});
  SweepConfig sc;
  sc.fractions = {0.1, 0.05};
  EXPECT_EQ(code_of([&] { prune_sweep(c, sc); }), ErrorCode::kInvalidConfig);
  sc.fractions = {0.0, 1.5};
  EXPECT_EQ(code_of([&] { prune_sweep(c, sc); }), ErrorCode::kInvalidConfig);
  sc.fractions = {0.0};
  sc.seeds.clear();
  EXPECT_EQ(code_of([&] { prune_sweep(c, sc); }), ErrorCode::kInvalidConfig);
}

}  // namespace
}  // namespace gdc
