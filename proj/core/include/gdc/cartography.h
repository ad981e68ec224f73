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

#ifndef GDC_CARTOGRAPHY_H_
#define GDC_CARTOGRAPHY_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gdc/loss_trace.h"

namespace gdc {

// Indices follow the intervention order: 1 is up-sampled, 2 down-weighted,
// 3 removed, 0 kept.
enum class Quadrant : std::uint8_t {
  kStableEasy = 0,
  kAmbiguousHard = 1,
  kHotspotMemorized = 2,
  kNoisyOutlier = 3,
};

std::string_view quadrant_name(Quadrant q);

enum class EpsilonMode {
  kAbsolute,  // epsilon_value is the threshold itself
  kRelative,  // threshold = smallest present cell + epsilon_value
};

struct CartographyConfig {
  std::size_t burn_in = 1;
  EpsilonMode epsilon_mode = EpsilonMode::kAbsolute;
  double epsilon_value = 0.0;
  double alpha_d = 0.75;
  double alpha_m = 0.75;

  // Throws kInvalidConfig unless 1 <= burn_in < epochs, epsilon_value >= 0
  // and both percentiles lie strictly inside (0, 1).
  void validate(std::size_t epochs) const;
};

// Samples whose coverage falls below this are scored but left out of the
// percentile fit.
inline constexpr double kMinFitCoverage = 0.5;

struct CartographyMap {
  CartographyConfig config;
  std::vector<std::string> sample_ids;
  std::vector<double> difficulty;
  std::vector<double> memorization;
  std::vector<double> coverage;
  std::vector<std::uint8_t> fitted;
  std::vector<Quadrant> quadrants;
  double tau_d = 0.0;
  double tau_m = 0.0;
  double epsilon = 0.0;
  std::size_t epochs = 0;

  std::size_t size() const { return sample_ids.size(); }
  std::array<std::size_t, 4> quadrant_counts() const;
  // True when tau_m sits at 0, so every sample with a single forget event is
  // classified as memorized.
  bool degenerate_tau_m() const { return tau_m == 0.0; }
};

// d_i: mean of the present cells in epochs 1..burn_in.
std::vector<double> difficulty_scores(const LossTrace& trace, std::size_t burn_in);

// m_i: fraction of the T-1 transitions where the loss goes from strictly below
// epsilon to strictly above it. Missing cells carry the last observation
// forward, so a gap never produces an event.
std::vector<double> memorization_scores(const LossTrace& trace, double epsilon);

double resolve_epsilon(const LossTrace& trace, const CartographyConfig& config);

// Nearest-rank percentile: the smallest element v with #{x <= v} / N >= alpha.
double percentile_threshold(std::span<const double> values, double alpha);

Quadrant classify(double difficulty, double memorization, double tau_d, double tau_m);

std::vector<Quadrant> partition(std::span<const double> difficulty,
                                std::span<const double> memorization,
                                double tau_d, double tau_m);

CartographyMap build_map(const LossTrace& trace, const CartographyConfig& config);

}  // namespace gdc

#endif  // GDC_CARTOGRAPHY_H_
