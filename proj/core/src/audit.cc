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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "gdc/error.h"
#include "gdc/parallel.h"

namespace gdc {

ExtractionResult extraction_attack(const Model& model, std::span<const CanaryGroup> canaries,
                                   double prefix_fraction) {
  if (canaries.empty()) throw Error(ErrorCode::kNoCanaries, "no canaries registered");
  if (!(prefix_fraction > 0.0 && prefix_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "prefix fraction must lie in (0, 1)");
  }
  ExtractionResult out;
  std::size_t hits = 0;
  for (const CanaryGroup& g : canaries) {
    const std::size_t len = g.tokens.size();
    std::size_t prefix = static_cast<std::size_t>(std::floor(prefix_fraction * static_cast<double>(len)));
    if (prefix < 1) {
      throw Error(ErrorCode::kInvalidConfig,
                  "prefix fraction leaves no prefix token for canary '" + g.id + "'");
    }
    prefix = std::min(prefix, len - 1);
    CanaryExtraction d;
    d.group_id = g.id;
    d.prefix_length = prefix;
    d.suffix_length = len - prefix;
    const TokenSpan all(g.tokens);
    const auto decoded = greedy_decode(model, all.first(prefix), d.suffix_length);
    while (d.matched_suffix_length < d.suffix_length &&
           decoded[d.matched_suffix_length] == g.tokens[prefix + d.matched_suffix_length]) {
      ++d.matched_suffix_length;
    }
    d.extracted = d.matched_suffix_length == d.suffix_length;
    hits += d.extracted ? 1 : 0;
    out.details.push_back(std::move(d));
  }
  out.success = static_cast<double>(hits) / static_cast<double>(canaries.size());
  return out;
}

double auc_from_losses(std::span<const double> member_losses,
                       std::span<const double> nonmember_losses) {
  if (member_losses.empty() || nonmember_losses.empty()) {
    throw Error(ErrorCode::kEmptyInput, "membership inference needs members and non-members");
  }
  // Rank all losses descending so that a lower loss earns a higher rank; the
  // member rank sum then gives U directly. Ties share their average rank.
  struct Entry {
    double loss;
    bool member;
  };
  std::vector<Entry> all;
  all.reserve(member_losses.size() + nonmember_losses.size());
  for (double l : member_losses) all.push_back({l, true});
  for (double l : nonmember_losses) all.push_back({l, false});
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.loss > b.loss; });
  double member_rank_sum = 0.0;
  for (std::size_t a = 0; a < all.size();) {
    std::size_t b = a;
    while (b < all.size() && all[b].loss == all[a].loss) ++b;
    const double avg_rank = (static_cast<double>(a + 1) + static_cast<double>(b)) / 2.0;
    for (std::size_t k = a; k < b; ++k) {
      if (all[k].member) member_rank_sum += avg_rank;
    }
    a = b;
  }
  const auto m = static_cast<double>(member_losses.size());
  const auto n = static_cast<double>(nonmember_losses.size());
  const double u = member_rank_sum - m * (m + 1.0) / 2.0;
  return u / (m * n);
}

double membership_inference_auc(const Model& model, std::span<const TokenSpan> members,
                                std::span<const TokenSpan> nonmembers) {
  if (members.empty() || nonmembers.empty()) {
    throw Error(ErrorCode::kEmptyInput, "membership inference needs members and non-members");
  }
  const auto a = sample_losses(model, members);
  const auto b = sample_losses(model, nonmembers);
  return auc_from_losses(a, b);
}

double perplexity(const Model& model, std::span<const TokenSpan> dataset) {
  if (dataset.empty()) throw Error(ErrorCode::kEmptyInput, "perplexity of an empty dataset");
  return std::exp(mean_token_nll(model, dataset));
}

AuditReport audit(const Model& model, const Corpus& corpus, const AuditConfig& config) {
  AuditReport r;
  r.config = config;
  r.model_family = std::string(model_family_name(model.family()));
  if (!corpus.canaries().empty()) {
    auto ex = extraction_attack(model, corpus.canaries(), config.prefix_fraction);
    r.extraction_success = ex.success;
    r.canaries = std::move(ex.details);
  }
  std::unordered_set<std::string> special;
  for (const auto& g : corpus.canaries()) special.insert(g.sample_ids.begin(), g.sample_ids.end());
  for (const auto& l : corpus.leaked()) special.insert(l.train_id);
  std::vector<TokenSpan> members;
  for (const auto& s : corpus.train()) {
    if (!special.contains(s.id)) members.emplace_back(s.tokens);
  }
  const auto nonmembers = corpus.heldout_sequences();
  if (!members.empty() && !nonmembers.empty()) {
    r.mi_auc = membership_inference_auc(model, members, nonmembers);
  }
  if (!nonmembers.empty()) r.perplexity = perplexity(model, nonmembers);
  r.train_perplexity = perplexity(model, corpus.train_sequences());
  if (!corpus.leaked().empty()) {
    std::vector<CanaryGroup> leaks;
    for (const auto& l : corpus.leaked()) {
      leaks.push_back({l.heldout_id, corpus.find(l.heldout_id)->tokens, {l.train_id}});
    }
    r.heldout_leakage = extraction_attack(model, leaks, config.prefix_fraction).success;
  }
  return r;
}

SweepCurve prune_sweep(const Corpus& corpus, const SweepConfig& config) {
  if (config.fractions.empty() || config.seeds.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "sweep needs at least one fraction and one seed");
  }
  for (std::size_t k = 0; k < config.fractions.size(); ++k) {
    const double f = config.fractions[k];
    if (!(f >= 0.0 && f <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "sweep fractions must lie in [0, 1]");
    if (k > 0 && !(f > config.fractions[k - 1])) {
      throw Error(ErrorCode::kInvalidConfig, "sweep fractions must be strictly increasing");
    }
  }
  const std::size_t n_seeds = config.seeds.size();
  const std::size_t n_points = config.fractions.size();

  struct Baseline {
    std::unique_ptr<Model> initial;
    TrainConfig train;
    CartographyMap map;
    AuditReport report;
  };
  std::vector<Baseline> base(n_seeds);
  parallel_for(n_seeds, [&](std::size_t s) {
    Baseline& b = base[s];
    b.initial = make_model(config.model, corpus, derive_seed(config.seeds[s], 0));
    b.train = config.train;
    b.train.seed = derive_seed(config.seeds[s], 1);
    const TrainResult run = train(*b.initial, corpus, b.train);
    b.map = build_map(run.trace, config.cartography);
    b.report = audit(*run.model, corpus, config.audit);
  });

  SweepCurve curve;
  curve.seeds = config.seeds;
  curve.per_seed.assign(n_seeds, std::vector<SweepPoint>(n_points));
  parallel_for(n_seeds * n_points, [&](std::size_t task) {
    const std::size_t s = task / n_points;
    const std::size_t k = task % n_points;
    const Baseline& b = base[s];
    const SamplingPlan plan =
        plan_top_memorized(b.map, config.fractions[k], config.target_weight, config.mode);
    AuditReport report;
    if (plan.n_hot == 0) {
      report = b.report;
    } else {
      const TrainResult run = train(*b.initial, corpus, b.train, &plan);
      report = audit(*run.model, corpus, config.audit);
    }
    SweepPoint& p = curve.per_seed[s][k];
    p.fraction = config.fractions[k];
    p.extraction = report.extraction_success;
    p.mi_auc = report.mi_auc;
    p.perplexity = report.perplexity;
    p.perplexity_delta_pct = (report.perplexity / b.report.perplexity - 1.0) * 100.0;
  });

  curve.points.resize(n_points);
  for (std::size_t k = 0; k < n_points; ++k) {
    SweepPoint& p = curve.points[k];
    p = SweepPoint{config.fractions[k], 0.0, 0.0, 0.0, 0.0};
    for (std::size_t s = 0; s < n_seeds; ++s) {
      const SweepPoint& q = curve.per_seed[s][k];
      p.extraction += q.extraction;
      p.perplexity_delta_pct += q.perplexity_delta_pct;
      p.mi_auc += q.mi_auc;
      p.perplexity += q.perplexity;
    }
    const auto ns = static_cast<double>(n_seeds);
    p.extraction /= ns;
    p.perplexity_delta_pct /= ns;
    p.mi_auc /= ns;
    p.perplexity /= ns;
  }
  return curve;
}

}  // namespace gdc
