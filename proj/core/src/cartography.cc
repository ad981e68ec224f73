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

#include "gdc/cartography.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gdc/error.h"

namespace gdc {

std::string_view quadrant_name(Quadrant q) {
  switch (q) {
    case Quadrant::kStableEasy: return "StableEasy";
    case Quadrant::kAmbiguousHard: return "AmbiguousHard";
    case Quadrant::kHotspotMemorized: return "HotspotMemorized";
    case Quadrant::kNoisyOutlier: return "NoisyOutlier";
  }
  return "Unknown";
}

void CartographyConfig::validate(std::size_t epochs) const {
  if (burn_in < 1 || burn_in >= epochs) {
    throw Error(ErrorCode::kInvalidConfig,
                "burn-in " + std::to_string(burn_in) + " must satisfy 1 <= T_e < T=" +
                    std::to_string(epochs));
  }
  if (!(epsilon_value >= 0.0) || !std::isfinite(epsilon_value)) {
    throw Error(ErrorCode::kInvalidConfig, "epsilon must be finite and >= 0");
  }
  auto inside = [](double a) { return a > 0.0 && a < 1.0; };
  if (!inside(alpha_d) || !inside(alpha_m)) {
    throw Error(ErrorCode::kInvalidConfig,
                "percentiles must lie strictly inside (0, 1)");
  }
}

std::array<std::size_t, 4> CartographyMap::quadrant_counts() const {
  std::array<std::size_t, 4> counts{};
  for (Quadrant q : quadrants) ++counts[static_cast<std::size_t>(q)];
  return counts;
}

std::vector<double> difficulty_scores(const LossTrace& trace, std::size_t burn_in) {
  if (burn_in < 1 || burn_in >= trace.epochs()) {
    throw Error(ErrorCode::kInvalidConfig,
                "burn-in " + std::to_string(burn_in) + " must satisfy 1 <= T_e < T=" +
                    std::to_string(trace.epochs()));
  }
  const std::size_t n = trace.samples();
  std::vector<double> sum(n, 0.0);
  std::vector<std::size_t> hits(n, 0);
  for (std::size_t t = 1; t <= burn_in; ++t) {
    const auto row = trace.row(t);
    if (trace.complete()) {
      for (std::size_t i = 0; i < n; ++i) sum[i] += row[i];
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!trace.present(t, i)) continue;
      sum[i] += row[i];
      ++hits[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t count = trace.complete() ? burn_in : hits[i];
    if (count == 0) {
      throw Error(ErrorCode::kZeroCoverage,
                  "sample '" + trace.sample_ids()[i] +
                      "' has no present cell in the burn-in window");
    }
    sum[i] /= static_cast<double>(count);
  }
  return sum;
}

std::vector<double> memorization_scores(const LossTrace& trace, double epsilon) {
  const std::size_t n = trace.samples();
  const std::size_t t_count = trace.epochs();
  std::vector<std::uint32_t> events(n, 0);
  if (trace.complete()) {
    auto prev = trace.row(1);
    for (std::size_t t = 2; t <= t_count; ++t) {
      const auto next = trace.row(t);
      for (std::size_t i = 0; i < n; ++i) {
        events[i] += (prev[i] < epsilon && next[i] > epsilon) ? 1u : 0u;
      }
      prev = next;
    }
  } else {
    constexpr double kUnseen = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> last(n, kUnseen);
    for (std::size_t t = 1; t <= t_count; ++t) {
      const auto row = trace.row(t);
      for (std::size_t i = 0; i < n; ++i) {
        if (!trace.present(t, i)) continue;
        // NaN compares false, so a leading gap never fires.
        events[i] += (last[i] < epsilon && row[i] > epsilon) ? 1u : 0u;
        last[i] = row[i];
      }
    }
  }
  std::vector<double> m(n);
  const double transitions = static_cast<double>(t_count - 1);
  for (std::size_t i = 0; i < n; ++i) m[i] = static_cast<double>(events[i]) / transitions;
  return m;
}

double resolve_epsilon(const LossTrace& trace, const CartographyConfig& config) {
  if (config.epsilon_mode == EpsilonMode::kAbsolute) return config.epsilon_value;
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t t = 1; t <= trace.epochs(); ++t) {
    const auto row = trace.row(t);
    for (std::size_t i = 0; i < trace.samples(); ++i) {
      if (trace.present(t, i)) lowest = std::min(lowest, row[i]);
    }
  }
  if (!std::isfinite(lowest)) {
    throw Error(ErrorCode::kEmptyInput, "relative epsilon needs at least one present cell");
  }
  return lowest + config.epsilon_value;
}

double percentile_threshold(std::span<const double> values, double alpha) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "percentile of an empty array");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "percentile must lie strictly inside (0, 1)");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double nd = static_cast<double>(n);
  // ceil(alpha*N) can be off by one when alpha*N rounds up past an integer;
  // settle on the smallest rank k with k/N >= alpha.
  auto rank = static_cast<std::size_t>(std::ceil(alpha * nd));
  rank = std::clamp<std::size_t>(rank, 1, n);
  while (rank > 1 && static_cast<double>(rank - 1) / nd >= alpha) --rank;
  while (rank < n && static_cast<double>(rank) / nd < alpha) ++rank;
  return sorted[rank - 1];
}

Quadrant classify(double difficulty, double memorization, double tau_d, double tau_m) {
  const bool hard = difficulty > tau_d;
  const bool memorized = memorization > tau_m;
  if (!hard && !memorized) return Quadrant::kStableEasy;
  if (hard && !memorized) return Quadrant::kAmbiguousHard;
  if (!hard) return Quadrant::kHotspotMemorized;
  return Quadrant::kNoisyOutlier;
}

std::vector<Quadrant> partition(std::span<const double> difficulty,
                                std::span<const double> memorization,
                                double tau_d, double tau_m) {
  if (difficulty.size() != memorization.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "difficulty and memorization arrays differ in length");
  }
  std::vector<Quadrant> out(difficulty.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = classify(difficulty[i], memorization[i], tau_d, tau_m);
  }
  return out;
}

CartographyMap build_map(const LossTrace& trace, const CartographyConfig& config) {
  config.validate(trace.epochs());
  CartographyMap map;
  map.config = config;
  map.epochs = trace.epochs();
  map.sample_ids = trace.sample_ids();
  map.epsilon = resolve_epsilon(trace, config);
  map.difficulty = difficulty_scores(trace, config.burn_in);
  map.memorization = memorization_scores(trace, map.epsilon);

  const std::size_t n = trace.samples();
  map.coverage.resize(n);
  map.fitted.resize(n);
  std::vector<double> fit_d, fit_m;
  fit_d.reserve(n);
  fit_m.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    map.coverage[i] = trace.coverage(i);
    map.fitted[i] = map.coverage[i] >= kMinFitCoverage ? 1 : 0;
    if (map.fitted[i]) {
      fit_d.push_back(map.difficulty[i]);
      fit_m.push_back(map.memorization[i]);
    }
  }
  if (fit_d.empty()) {
    throw Error(ErrorCode::kZeroCoverage,
                "no sample reaches the minimum coverage for threshold fitting");
  }
  map.tau_d = percentile_threshold(fit_d, config.alpha_d);
  map.tau_m = percentile_threshold(fit_m, config.alpha_m);
  map.quadrants = partition(map.difficulty, map.memorization, map.tau_d, map.tau_m);
  return map;
}

}  // namespace gdc
