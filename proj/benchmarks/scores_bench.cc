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

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "gdc/cartography.h"
#include "gdc/intervention.h"
#include "gdc/loss_trace.h"

namespace {

gdc::LossTrace make_trace(std::size_t n, std::size_t t) {
  std::mt19937_64 rng(n * 31 + t);
  std::normal_distribution<double> noise(0.0, 0.4);
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = "s" + std::to_string(i);
  std::vector<double> v(n * t);
  for (std::size_t e = 0; e < t; ++e) {
    for (std::size_t i = 0; i < n; ++i) {
      v[e * n + i] = std::abs(3.0 / (1.0 + 0.1 * e) + noise(rng));
    }
  }
  return gdc::LossTrace(std::move(ids), t, std::move(v));
}

void BM_DifficultyScores(benchmark::State& state) {
  const auto trace = make_trace(state.range(0), 40);
  for (auto _ : state) benchmark::DoNotOptimize(gdc::difficulty_scores(trace, 8));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DifficultyScores)->RangeMultiplier(4)->Range(1 << 10, 1 << 18);

void BM_MemorizationScores(benchmark::State& state) {
  const auto trace = make_trace(state.range(0), 40);
  for (auto _ : state) benchmark::DoNotOptimize(gdc::memorization_scores(trace, 1.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MemorizationScores)->RangeMultiplier(4)->Range(1 << 10, 1 << 18);

void BM_BuildMap(benchmark::State& state) {
  const auto trace = make_trace(state.range(0), 40);
  const gdc::CartographyConfig cfg{8, gdc::EpsilonMode::kRelative, 0.3, 0.75, 0.75};
  for (auto _ : state) benchmark::DoNotOptimize(gdc::build_map(trace, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildMap)->RangeMultiplier(4)->Range(1 << 10, 1 << 18);

void BM_PercentileThreshold(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  std::vector<double> v(state.range(0));
  for (double& x : v) x = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(gdc::percentile_threshold(v, 0.75));
}
BENCHMARK(BM_PercentileThreshold)->RangeMultiplier(8)->Range(1 << 10, 1 << 20);

void BM_SamplerDraw(benchmark::State& state) {
  std::vector<double> w(state.range(0));
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 + static_cast<double>(i % 7);
  gdc::WeightedSampler sampler(w, 3);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.next());
}
BENCHMARK(BM_SamplerDraw)->Arg(2000)->Arg(200000);

}  // namespace

BENCHMARK_MAIN();
