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


#include "gdc/corpus.h"

#include <gtest/gtest.h>

#include <set>

#include "gdc/error.h"
#include "test_util.h"

namespace gdc {
namespace {

using testing::code_of;

SyntheticCorpusConfig small_config(std::uint64_t seed) {
  SyntheticCorpusConfig c;
  c.train_count = 120;
  c.heldout_count = 30;
  c.seed = seed;
  return c;
}

std::set<std::vector<Token>> ngrams(const std::vector<Token>& s, std::size_t n) {
  std::set<std::vector<Token>> out;
  for (std::size_t i = 0; i + n <= s.size(); ++i) out.emplace(s.begin() + i, s.begin() + i + n);
  return out;
}

TEST(CorpusTest, AddValidates) {
  Corpus c(4);
  c.add({"a", Split::kTrain, {0, 1, 3}});
  EXPECT_EQ(code_of([&] { c.add({"b", Split::kTrain, {0, 4}}); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of([&] { c.add({"c", Split::kTrain, {}}); }), ErrorCode::kEmptyInput);
  EXPECT_EQ(code_of([&] { c.add({"a", Split::kHeldout, {1}}); }), ErrorCode::kDuplicateCell);
  EXPECT_EQ(code_of([&] { c.add_canary_group({"g", {0}, {"nope"}}); }), ErrorCode::kUnknownSample);
  EXPECT_EQ(code_of([] { Corpus bad(0); }), ErrorCode::kInvalidConfig);
}

TEST(SyntheticCorpusTest, ShapeAndDeterminism) {
  const Corpus a = make_synthetic_corpus(small_config(3));
  EXPECT_EQ(a.train().size(), 120u);
  EXPECT_EQ(a.heldout().size(), 30u);
  for (const auto& s : a.train()) EXPECT_EQ(s.tokens.size(), 16u);
  EXPECT_EQ(a, make_synthetic_corpus(small_config(3)));
  EXPECT_FALSE(a == make_synthetic_corpus(small_config(4)));
}

TEST(CanaryTest, TwoDistinctCanaries) {
  const Corpus base = make_synthetic_corpus(small_config(5));
  const Corpus c = inject_canaries(base, 2, 12, 1, 9);
  ASSERT_EQ(c.canaries().size(), 2u);
  EXPECT_EQ(c.train().size(), base.train().size() + 2);
  EXPECT_NE(c.canaries()[0].tokens, c.canaries()[1].tokens);
  for (const auto& g : c.canaries()) {
    ASSERT_EQ(g.sample_ids.size(), 1u);
    ASSERT_NE(c.find(g.sample_ids[0]), nullptr);
    EXPECT_EQ(c.find(g.sample_ids[0])->split, Split::kTrain);
  }
}

TEST(CanaryTest, RepetitionsShareAGroup) {
  const Corpus c = inject_canaries(make_synthetic_corpus(small_config(5)), 3, 16, 3, 1);
  ASSERT_EQ(c.canaries().size(), 3u);
  for (const auto& g : c.canaries()) {
    ASSERT_EQ(g.sample_ids.size(), 3u);
    for (const auto& id : g.sample_ids) EXPECT_EQ(c.find(id)->tokens, g.tokens);
  }
}

TEST(CanaryTest, ZeroCountIsIdentityAndSeedIsDeterministic) {
  const Corpus base = make_synthetic_corpus(small_config(6));
  EXPECT_EQ(inject_canaries(base, 0, 16, 3, 1), base);
  EXPECT_EQ(inject_canaries(base, 4, 16, 2, 77), inject_canaries(base, 4, 16, 2, 77));
}

TEST(CanaryTest, AvoidsCorpusHalfLengthGrams) {
  const Corpus base = make_synthetic_corpus(small_config(7));
  const Corpus c = inject_canaries(base, 5, 10, 1, 2);
  std::set<std::vector<Token>> corpus_grams;
  for (const auto* split : {&base.train(), &base.heldout()}) {
    for (const auto& s : *split) {
      const auto g = ngrams(s.tokens, 5);
      corpus_grams.insert(g.begin(), g.end());
    }
  }
  for (const auto& g : c.canaries()) {
    for (const auto& gram : ngrams(g.tokens, 5)) EXPECT_FALSE(corpus_grams.contains(gram));
  }
}

TEST(CanaryTest, ExhaustedVocabulary) {
  Corpus tiny(2);
  tiny.add({"all", Split::kTrain, {0, 0, 1, 1, 0}});
  EXPECT_EQ(code_of([&] { inject_canaries(tiny, 1, 4, 1, 3); }), ErrorCode::kVocabularyExhausted);
}

TEST(LeakTest, CopiesHeldoutIntoTrain) {
  const Corpus base = make_synthetic_corpus(small_config(8));
  const Corpus c = leak_heldout(base, 4, 5);
  ASSERT_EQ(c.leaked().size(), 4u);
  for (const auto& l : c.leaked()) {
    EXPECT_EQ(c.find(l.train_id)->tokens, c.find(l.heldout_id)->tokens);
    EXPECT_EQ(c.find(l.train_id)->split, Split::kTrain);
  }
  EXPECT_EQ(code_of([&] { leak_heldout(base, 31, 5); }), ErrorCode::kInvalidConfig);
}

TEST(CorpusFormatTest, RoundTrip) {
  const Corpus c =
      leak_heldout(inject_canaries(make_synthetic_corpus(small_config(9)), 2, 16, 3, 4), 2, 1);
  const std::string text = write_corpus(c);
  EXPECT_EQ(read_corpus(text), c);
  EXPECT_EQ(write_corpus(read_corpus(text)), text);
  EXPECT_EQ(text.front(), '{');
}

TEST(CorpusFormatTest, Errors) {
  EXPECT_EQ(code_of([] { read_corpus("not json\n"); }), ErrorCode::kMalformedHeader);
  EXPECT_EQ(code_of([] { read_corpus("{\"format\":\"other\"}\n"); }), ErrorCode::kMalformedHeader);
  Corpus c(4);
  c.add({"a", Split::kTrain, {0, 1}});
  std::string text = write_corpus(c);
  EXPECT_EQ(code_of([&] { read_corpus(text + "1 2\n"); }), ErrorCode::kDimensionMismatch);
  const auto dir = testing::scratch_dir("corpus");
  save_corpus(c, dir / "c.gdcc");
  EXPECT_EQ(load_corpus(dir / "c.gdcc"), c);
  EXPECT_EQ(code_of([&] { load_corpus(dir / "none.gdcc"); }), ErrorCode::kIo);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace gdc
