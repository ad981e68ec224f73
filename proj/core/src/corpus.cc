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

#include <algorithm>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

#include "gdc/error.h"
#include "json.hpp"
#include "text_util.h"

namespace gdc {
namespace {

using nlohmann::json;

std::string ngram_key(TokenSpan tokens) {
  std::string key;
  key.reserve(tokens.size() * 2);
  for (Token t : tokens) {
    key.push_back(static_cast<char>(t & 0xff));
    key.push_back(static_cast<char>(t >> 8));
  }
  return key;
}

void collect_ngrams(TokenSpan tokens, std::size_t n, std::unordered_set<std::string>& out) {
  if (tokens.size() < n) return;
  for (std::size_t p = 0; p + n <= tokens.size(); ++p) out.insert(ngram_key(tokens.subspan(p, n)));
}

}  // namespace

Corpus::Corpus(int vocab_size) : vocab_size_(vocab_size) {
  if (vocab_size < 1 || vocab_size > kMaxVocabulary) {
    throw Error(ErrorCode::kInvalidConfig,
                "vocabulary size must lie in [1, " + std::to_string(kMaxVocabulary) + "]");
  }
}

void Corpus::add(Sample sample) {
  if (sample.tokens.empty()) {
    throw Error(ErrorCode::kEmptyInput, "sample '" + sample.id + "' has no tokens");
  }
  if (find(sample.id) != nullptr) {
    throw Error(ErrorCode::kDuplicateCell, "duplicate sample id '" + sample.id + "'");
  }
  for (Token t : sample.tokens) {
    if (t >= vocab_size_) {
      throw Error(ErrorCode::kInvalidConfig,
                  "token " + std::to_string(t) + " in sample '" + sample.id +
                      "' is outside the vocabulary of " + std::to_string(vocab_size_));
    }
  }
  (sample.split == Split::kTrain ? train_ : heldout_).push_back(std::move(sample));
}

void Corpus::add_canary_group(CanaryGroup group) {
  for (const auto& id : group.sample_ids) {
    const Sample* s = find(id);
    if (s == nullptr || s->split != Split::kTrain) {
      throw Error(ErrorCode::kUnknownSample,
                  "canary sample '" + id + "' is not a train sample");
    }
  }
  canaries_.push_back(std::move(group));
}

void Corpus::add_leak(LeakedSequence leak) {
  const Sample* h = find(leak.heldout_id);
  const Sample* t = find(leak.train_id);
  if (h == nullptr || t == nullptr || h->split != Split::kHeldout || t->split != Split::kTrain) {
    throw Error(ErrorCode::kUnknownSample, "leak '" + leak.heldout_id + "' -> '" +
                                               leak.train_id + "' does not match the splits");
  }
  leaked_.push_back(std::move(leak));
}

std::vector<std::string> Corpus::train_ids() const {
  std::vector<std::string> ids;
  ids.reserve(train_.size());
  for (const auto& s : train_) ids.push_back(s.id);
  return ids;
}

std::vector<TokenSpan> Corpus::train_sequences() const {
  std::vector<TokenSpan> out;
  out.reserve(train_.size());
  for (const auto& s : train_) out.emplace_back(s.tokens);
  return out;
}

std::vector<TokenSpan> Corpus::heldout_sequences() const {
  std::vector<TokenSpan> out;
  out.reserve(heldout_.size());
  for (const auto& s : heldout_) out.emplace_back(s.tokens);
  return out;
}

const Sample* Corpus::find(const std::string& id) const {
  for (const auto* split : {&train_, &heldout_}) {
    for (const auto& s : *split) {
      if (s.id == id) return &s;
    }
  }
  return nullptr;
}

bool operator==(const Corpus& a, const Corpus& b) {
  auto same_samples = [](const std::vector<Sample>& x, const std::vector<Sample>& y) {
    return std::equal(x.begin(), x.end(), y.begin(), y.end(), [](const Sample& p, const Sample& q) {
      return p.id == q.id && p.split == q.split && p.tokens == q.tokens;
    });
  };
  auto same_groups = std::equal(
      a.canaries_.begin(), a.canaries_.end(), b.canaries_.begin(), b.canaries_.end(),
      [](const CanaryGroup& p, const CanaryGroup& q) {
        return p.id == q.id && p.tokens == q.tokens && p.sample_ids == q.sample_ids;
      });
  auto same_leaks = std::equal(
      a.leaked_.begin(), a.leaked_.end(), b.leaked_.begin(), b.leaked_.end(),
      [](const LeakedSequence& p, const LeakedSequence& q) {
        return p.heldout_id == q.heldout_id && p.train_id == q.train_id;
      });
  return a.vocab_size_ == b.vocab_size_ && same_samples(a.train_, b.train_) &&
         same_samples(a.heldout_, b.heldout_) && same_groups && same_leaks;
}

Corpus make_synthetic_corpus(const SyntheticCorpusConfig& config) {
  if (config.branching < 1 || config.branching > config.vocab_size) {
    throw Error(ErrorCode::kInvalidConfig, "branching must lie in [1, vocab size]");
  }
  if (!(config.top_probability > 0.0 && config.top_probability <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "top probability must lie in (0, 1]");
  }
  if (config.length == 0 || config.train_count == 0) {
    throw Error(ErrorCode::kInvalidConfig, "corpus needs a positive length and train count");
  }
  Corpus corpus(config.vocab_size);
  std::mt19937_64 rng(config.seed);
  const auto v = static_cast<std::size_t>(config.vocab_size);
  const auto b = static_cast<std::size_t>(config.branching);

  // successors[a] and the matching cumulative distribution.
  std::vector<std::vector<Token>> successors(v);
  std::vector<double> cdf(b);
  {
    double acc = 0.0;
    const double rest = b > 1 ? (1.0 - config.top_probability) / static_cast<double>(b - 1) : 0.0;
    for (std::size_t k = 0; k < b; ++k) {
      acc += k == 0 ? (b > 1 ? config.top_probability : 1.0) : rest;
      cdf[k] = acc;
    }
  }
  std::vector<Token> pool(v);
  for (std::size_t a = 0; a < v; ++a) {
    std::iota(pool.begin(), pool.end(), Token{0});
    for (std::size_t k = 0; k < b; ++k) {
      const std::size_t j = k + static_cast<std::size_t>(rng() % (v - k));
      std::swap(pool[k], pool[j]);
    }
    successors[a].assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(b));
  }
  auto draw_sequence = [&]() {
    std::vector<Token> seq(config.length);
    seq[0] = static_cast<Token>(rng() % v);
    for (std::size_t p = 1; p < config.length; ++p) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * cdf.back();
      const auto k = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      seq[p] = successors[seq[p - 1]][std::min(k, b - 1)];
    }
    return seq;
  };
  for (std::size_t i = 0; i < config.train_count; ++i) {
    corpus.add({"s" + std::to_string(i), Split::kTrain, draw_sequence()});
  }
  for (std::size_t i = 0; i < config.heldout_count; ++i) {
    corpus.add({"h" + std::to_string(i), Split::kHeldout, draw_sequence()});
  }
  return corpus;
}

Corpus inject_canaries(const Corpus& corpus, std::size_t count, std::size_t length,
                       std::size_t repetitions, std::uint64_t seed) {
  Corpus out = corpus;
  if (count == 0) return out;
  if (length < 2 || repetitions < 1) {
    throw Error(ErrorCode::kInvalidConfig, "canaries need length >= 2 and repetitions >= 1");
  }
  const std::size_t n = length / 2;
  std::unordered_set<std::string> seen;
  for (const auto* split : {&corpus.train(), &corpus.heldout()}) {
    for (const auto& s : *split) collect_ngrams(s.tokens, n, seen);
  }
  std::mt19937_64 rng(seed);
  const auto v = static_cast<std::uint64_t>(corpus.vocab_size());
  const std::size_t first_group = corpus.canaries().size();
  for (std::size_t g = 0; g < count; ++g) {
    std::vector<Token> tokens(length);
    bool accepted = false;
    for (int attempt = 0; attempt < 1000 && !accepted; ++attempt) {
      for (auto& t : tokens) t = static_cast<Token>(rng() % v);
      std::unordered_set<std::string> own;
      collect_ngrams(tokens, n, own);
      accepted = std::none_of(own.begin(), own.end(),
                              [&](const std::string& k) { return seen.contains(k); });
    }
    if (!accepted) {
      throw Error(ErrorCode::kVocabularyExhausted,
                  "no canary of length " + std::to_string(length) + " avoids the corpus's " +
                      std::to_string(n) + "-grams after 1000 draws");
    }
    collect_ngrams(tokens, n, seen);
    CanaryGroup group;
    group.id = "canary" + std::to_string(first_group + g);
    group.tokens = tokens;
    for (std::size_t r = 0; r < repetitions; ++r) {
      std::string id = group.id + "-r" + std::to_string(r);
      out.add({id, Split::kTrain, tokens});
      group.sample_ids.push_back(std::move(id));
    }
    out.add_canary_group(std::move(group));
  }
  return out;
}

Corpus leak_heldout(const Corpus& corpus, std::size_t count, std::uint64_t seed) {
  Corpus out = corpus;
  if (count == 0) return out;
  if (count > corpus.heldout().size()) {
    throw Error(ErrorCode::kInvalidConfig, "cannot leak more sequences than the held-out split has");
  }
  std::vector<std::size_t> idx(corpus.heldout().size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng() % (idx.size() - k));
    std::swap(idx[k], idx[j]);
    const Sample& h = corpus.heldout()[idx[k]];
    std::string id = "leak-" + h.id;
    out.add({id, Split::kTrain, h.tokens});
    out.add_leak({h.id, std::move(id)});
  }
  return out;
}

std::string write_corpus(const Corpus& corpus) {
  json header;
  header["format"] = "gdc-corpus";
  header["version"] = 1;
  header["vocab_size"] = corpus.vocab_size();
  json samples = json::array();
  std::vector<const Sample*> order;
  for (const auto& s : corpus.train()) order.push_back(&s);
  for (const auto& s : corpus.heldout()) order.push_back(&s);
  for (const Sample* s : order) {
    samples.push_back({{"id", s->id}, {"split", s->split == Split::kTrain ? "train" : "heldout"}});
  }
  header["samples"] = std::move(samples);
  json canaries = json::array();
  for (const auto& g : corpus.canaries()) {
    canaries.push_back({{"id", g.id}, {"tokens", g.tokens}, {"sample_ids", g.sample_ids}});
  }
  header["canaries"] = std::move(canaries);
  json leaks = json::array();
  for (const auto& l : corpus.leaked()) {
    leaks.push_back({{"heldout_id", l.heldout_id}, {"train_id", l.train_id}});
  }
  header["leaked"] = std::move(leaks);

  std::string out = header.dump() + "\n";
  for (const Sample* s : order) {
    for (std::size_t p = 0; p < s->tokens.size(); ++p) {
      if (p > 0) out += ' ';
      out += std::to_string(s->tokens[p]);
    }
    out += '\n';
  }
  return out;
}

Corpus read_corpus(std::string_view text) {
  const std::size_t eol = text.find('\n');
  json header;
  try {
    header = json::parse(text.substr(0, eol));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedHeader, std::string("line 1: corpus header is not JSON: ") + e.what());
  }
  try {
    if (header.at("format") != "gdc-corpus" || header.at("version") != 1) {
      throw Error(ErrorCode::kMalformedHeader, "line 1: not a gdc-corpus v1 header");
    }
    Corpus corpus(header.at("vocab_size").get<int>());
    const auto& samples = header.at("samples");
    std::size_t pos = eol == std::string_view::npos ? text.size() : eol + 1;
    std::size_t line_no = 1;
    for (const auto& entry : samples) {
      ++line_no;
      if (pos >= text.size()) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "line " + std::to_string(line_no) + ": header lists " +
                        std::to_string(samples.size()) + " samples but the body ends early");
      }
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::istringstream in{std::string(text.substr(pos, end - pos))};
      pos = end + 1;
      Sample s;
      s.id = entry.at("id").get<std::string>();
      const std::string split = entry.at("split").get<std::string>();
      if (split != "train" && split != "heldout") {
        throw Error(ErrorCode::kMalformedHeader, "unknown split '" + split + "'");
      }
      s.split = split == "train" ? Split::kTrain : Split::kHeldout;
      std::string field;
      while (in >> field) {
        auto tok = internal::parse_int<unsigned>(field);
        if (!tok || *tok > 0xffff) {
          throw Error(ErrorCode::kMalformedHeader,
                      "line " + std::to_string(line_no) + ": bad token '" + field + "'");
        }
        s.tokens.push_back(static_cast<Token>(*tok));
      }
      corpus.add(std::move(s));
    }
    if (pos < text.size() && text.substr(pos).find_first_not_of(" \t\r\n") != std::string_view::npos) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "line " + std::to_string(line_no + 1) + ": header lists " +
                      std::to_string(samples.size()) + " samples but the body has more lines");
    }
    for (const auto& g : header.at("canaries")) {
      corpus.add_canary_group({g.at("id").get<std::string>(),
                               g.at("tokens").get<std::vector<Token>>(),
                               g.at("sample_ids").get<std::vector<std::string>>()});
    }
    if (header.contains("leaked")) {
      for (const auto& l : header.at("leaked")) {
        corpus.add_leak({l.at("heldout_id").get<std::string>(), l.at("train_id").get<std::string>()});
      }
    }
    return corpus;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedHeader, std::string("line 1: ") + e.what());
  }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write corpus '" + path.string() + "'");
  out << write_corpus(corpus);
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open corpus '" + path.string() + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return read_corpus(text);
}

}  // namespace gdc
