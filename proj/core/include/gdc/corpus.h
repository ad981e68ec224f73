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

#ifndef GDC_CORPUS_H_
#define GDC_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace gdc {

using Token = std::uint16_t;
using TokenSpan = std::span<const Token>;

// Vocabularies stay small enough to pack three context symbols into a key.
inline constexpr int kMaxVocabulary = 256;

enum class Split { kTrain, kHeldout };

struct Sample {
  std::string id;
  Split split = Split::kTrain;
  std::vector<Token> tokens;
};

// One synthetic canary sequence and the train samples that carry it.
struct CanaryGroup {
  std::string id;
  std::vector<Token> tokens;
  std::vector<std::string> sample_ids;
};

// A held-out sequence copied into the training split.
struct LeakedSequence {
  std::string heldout_id;
  std::string train_id;
};

class Corpus {
 public:
  explicit Corpus(int vocab_size);

  int vocab_size() const { return vocab_size_; }
  const std::vector<Sample>& train() const { return train_; }
  const std::vector<Sample>& heldout() const { return heldout_; }
  const std::vector<CanaryGroup>& canaries() const { return canaries_; }
  const std::vector<LeakedSequence>& leaked() const { return leaked_; }

  // Rejects out-of-vocabulary tokens, empty sequences and reused ids.
  void add(Sample sample);
  void add_canary_group(CanaryGroup group);
  void add_leak(LeakedSequence leak);

  std::vector<std::string> train_ids() const;
  std::vector<TokenSpan> train_sequences() const;
  std::vector<TokenSpan> heldout_sequences() const;
  const Sample* find(const std::string& id) const;

  friend bool operator==(const Corpus& a, const Corpus& b);

 private:
  int vocab_size_;
  std::vector<Sample> train_;
  std::vector<Sample> heldout_;
  std::vector<CanaryGroup> canaries_;
  std::vector<LeakedSequence> leaked_;
};

// Background text: a sparse first-order Markov chain. Each token has
// `branching` successors; the first takes `top_probability` and the rest split
// the remainder evenly.
struct SyntheticCorpusConfig {
  int vocab_size = 64;
  std::size_t train_count = 1970;
  std::size_t heldout_count = 500;
  std::size_t length = 16;
  int branching = 4;
  double top_probability = 0.7;
  std::uint64_t seed = 1;
};

Corpus make_synthetic_corpus(const SyntheticCorpusConfig& config);

// Adds `count` uniformly random canaries of `length` tokens, each inserted
// `repetitions` times as distinct train samples. A canary is redrawn while any
// of its length/2-grams already occurs in the corpus; 1000 failed draws raise
// kVocabularyExhausted.
Corpus inject_canaries(const Corpus& corpus, std::size_t count, std::size_t length,
                       std::size_t repetitions, std::uint64_t seed);

// Copies `count` held-out sequences into the training split.
Corpus leak_heldout(const Corpus& corpus, std::size_t count, std::uint64_t seed);

// First line: JSON header (vocab size, sample ids and splits, canary registry,
// leaks). Then one line of whitespace-separated token ids per sample, in the
// header's order.
std::string write_corpus(const Corpus& corpus);
Corpus read_corpus(std::string_view text);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_corpus(const std::filesystem::path& path);

}  // namespace gdc

#endif  // GDC_CORPUS_H_
