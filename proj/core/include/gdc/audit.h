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

#ifndef GDC_AUDIT_H_
#define GDC_AUDIT_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gdc/cartography.h"
#include "gdc/corpus.h"
#include "gdc/intervention.h"
#include "gdc/model.h"
#include "gdc/trainer.h"

namespace gdc {

struct CanaryExtraction {
  std::string group_id;
  std::size_t prefix_length = 0;
  std::size_t suffix_length = 0;
  std::size_t matched_suffix_length = 0;  // leading tokens decoded correctly
  bool extracted = false;
};

struct ExtractionResult {
  double success = 0.0;
  std::vector<CanaryExtraction> details;
};

// Greedy-decodes each canary's suffix from its first
// max(1, floor(prefix_fraction * length)) tokens; success needs an exact match.
ExtractionResult extraction_attack(const Model& model, std::span<const CanaryGroup> canaries,
                                   double prefix_fraction = 0.5);

// Mann-Whitney AUC of "member" scored by lower loss; ties count one half.
double auc_from_losses(std::span<const double> member_losses,
                       std::span<const double> nonmember_losses);

double membership_inference_auc(const Model& model, std::span<const TokenSpan> members,
                                std::span<const TokenSpan> nonmembers);

// exp of the token-weighted mean negative log-likelihood.
double perplexity(const Model& model, std::span<const TokenSpan> dataset);

struct AuditConfig {
  double prefix_fraction = 0.5;
};

struct AuditReport {
  AuditConfig config;
  std::string model_family;
  double extraction_success = 0.0;
  double mi_auc = 0.5;
  double perplexity = 1.0;        // held-out
  double train_perplexity = 1.0;
  std::optional<double> heldout_leakage;  // extraction rate of leaked held-out sequences
  std::vector<CanaryExtraction> canaries;
};

// Members are the train samples that are neither canaries nor leaks;
// non-members are the held-out samples.
AuditReport audit(const Model& model, const Corpus& corpus, const AuditConfig& config = {});

struct SweepPoint {
  double fraction = 0.0;
  double extraction = 0.0;
  double perplexity_delta_pct = 0.0;
  double mi_auc = 0.5;
  double perplexity = 1.0;
};

struct SweepCurve {
  std::vector<SweepPoint> points;                 // mean over seeds
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<SweepPoint>> per_seed;  // [seed][fraction]
};

struct SweepConfig {
  ModelSpec model;
  TrainConfig train;
  CartographyConfig cartography;
  std::vector<double> fractions{0.0, 0.05, 0.10, 0.20};
  std::vector<std::uint64_t> seeds{1};
  double target_weight = 0.0;  // weight given to the pruned samples
  WeightingMode mode = WeightingMode::kSampling;
  AuditConfig audit;
};

// Per seed: train a baseline for T epochs, map it, then for each fraction f
// rerun with the top-f memorization mass pruned from epoch T_e + 1 and audit.
SweepCurve prune_sweep(const Corpus& corpus, const SweepConfig& config);

}  // namespace gdc

#endif  // GDC_AUDIT_H_
