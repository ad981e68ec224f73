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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gdc/audit.h"
#include "gdc/cartography.h"
#include "gdc/checksum.h"
#include "gdc/cli/commands.h"
#include "gdc/corpus.h"
#include "gdc/intervention.h"
#include "gdc/trace_io.h"
#include "gdc/trainer.h"
#include "json.hpp"
#include "oracles.h"

namespace {

using namespace gdc;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Random complete trace on a coarse grid so that equality with epsilon
// happens often.
LossTrace random_trace(std::mt19937_64& rng, std::size_t t, std::size_t n,
                       oracle::Grid* grid) {
  std::uniform_int_distribution<int> level(0, 12);
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = "x" + std::to_string(i);
  std::vector<double> v(t * n);
  grid->assign(t, std::vector<double>(n));
  for (std::size_t e = 0; e < t; ++e) {
    for (std::size_t i = 0; i < n; ++i) {
      const double x = level(rng) * 0.25 + (rng() % 7 == 0 ? 1e-3 * (rng() % 1000) : 0.0);
      v[e * n + i] = x;
      (*grid)[e][i] = x;
    }
  }
  return LossTrace(std::move(ids), t, std::move(v));
}

Verdict criterion1() {
  std::mt19937_64 rng(20261016);
  std::size_t mismatched_events = 0, mismatched_means = 0, cells = 0;
  double worst_rel = 0.0;
  const auto start = Clock::now();
  for (int k = 0; k < 100; ++k) {
    const std::size_t t = 2 + rng() % 49;
    const std::size_t n = 1 + rng() % 200;
    oracle::Grid grid;
    const LossTrace trace = random_trace(rng, t, n, &grid);
    const std::size_t burn_in = 1 + rng() % (t - 1);
    const double eps = (rng() % 13) * 0.25;
    const auto d = difficulty_scores(trace, burn_in);
    const auto m = memorization_scores(trace, eps);
    for (std::size_t i = 0; i < n; ++i) {
      const double want_d = oracle::mean_of_first(grid, i, burn_in);
      const double rel = want_d == 0.0 ? std::abs(d[i]) : std::abs(d[i] - want_d) / want_d;
      worst_rel = std::max(worst_rel, rel);
      if (rel > 1e-12) ++mismatched_means;
      const int events = oracle::forget_events(grid, i, eps);
      const long got = std::lround(m[i] * static_cast<double>(t - 1));
      if (got != events || m[i] != events / static_cast<double>(t - 1)) ++mismatched_events;
      ++cells;
    }
  }
  const double elapsed = seconds_since(start);
  return {mismatched_events == 0 && mismatched_means == 0 && elapsed < 5.0,
          fmt("%zu samples, event mismatches %zu, mean mismatches %zu, worst rel %.2e, %.2fs",
              cells, mismatched_events, mismatched_means, worst_rel, elapsed)};
}

Verdict criterion2() {
  std::size_t arrays = 0, mismatches = 0;
  std::vector<double> alphas;
  for (int a = 1; a < 20; ++a) alphas.push_back(a / 20.0);
  for (std::size_t n = 1; n <= 8; ++n) {
    for (std::size_t k = 1; k < n; ++k) alphas.push_back(static_cast<double>(k) / n);
  }
  for (std::size_t n = 1; n <= 8; ++n) {
    std::size_t combos = 1;
    for (std::size_t i = 0; i < n; ++i) combos *= 3;
    for (std::size_t code = 0; code < combos; ++code) {
      std::vector<double> v(n);
      std::size_t c = code;
      for (std::size_t i = 0; i < n; ++i, c /= 3) v[i] = static_cast<double>(c % 3) * 0.5;
      ++arrays;
      for (double alpha : alphas) {
        if (percentile_threshold(v, alpha) != oracle::nearest_rank(v, alpha)) ++mismatches;
      }
    }
  }
  const double td = 2.0, tm = 0.25;
  const bool boundary =
      classify(td, tm, td, tm) == Quadrant::kStableEasy &&
      classify(std::nextafter(td, 9.0), tm, td, tm) == Quadrant::kAmbiguousHard &&
      classify(td, std::nextafter(tm, 9.0), td, tm) == Quadrant::kHotspotMemorized &&
      classify(std::nextafter(td, 9.0), std::nextafter(tm, 9.0), td, tm) ==
          Quadrant::kNoisyOutlier;

  // A whole map whose scores sit exactly on both thresholds.
  std::vector<std::string> ids{"a", "b", "c", "d"};
  const std::vector<double> vals{1, 1, 1, 3, 2, 2, 2, 2, 1, 1, 1, 3};
  const CartographyMap map = build_map(LossTrace(ids, 3, vals), {1, EpsilonMode::kAbsolute, 1.5, 0.75, 0.75});
  const bool map_boundary = map.quadrants[0] == Quadrant::kStableEasy;
  return {mismatches == 0 && boundary && map_boundary,
          fmt("%zu arrays x %zu percentiles, %zu mismatches, boundary %s", arrays, alphas.size(),
              mismatches, boundary && map_boundary ? "ok" : "wrong")};
}

double time_scores(std::size_t n, std::size_t t) {
  std::mt19937_64 rng(n);
  std::normal_distribution<double> noise(0.0, 0.3);
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = std::to_string(i);
  std::vector<double> v(n * t);
  for (double& x : v) x = std::abs(2.0 + noise(rng));
  const LossTrace trace(std::move(ids), t, std::move(v));
  double total = 0.0;
  volatile double sink = 0.0;
  for (int r = 0; r < 5; ++r) {
    const auto start = Clock::now();
    const auto d = difficulty_scores(trace, 8);
    const auto m = memorization_scores(trace, 2.0);
    total += seconds_since(start);
    sink = sink + d[0] + m[0];
  }
  return total / 5.0;
}

Verdict criterion3() {
  const std::size_t t = 40;
  time_scores(25000, t);  // warm up
  const double small = time_scores(50000, t);
  const double large = time_scores(100000, t);
  const double ratio = large / small;

  // Informational: share of map construction spent on the percentile sorts.
  std::string sort_note;
  for (std::size_t n : {std::size_t{10000}, std::size_t{200000}}) {
    std::mt19937_64 rng(n);
    std::normal_distribution<double> noise(0.0, 0.3);
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = std::to_string(i);
    std::vector<double> v(n * t);
    for (double& x : v) x = std::abs(2.0 + noise(rng));
    const LossTrace trace(std::move(ids), t, std::move(v));
    auto start = Clock::now();
    const auto d = difficulty_scores(trace, 8);
    const auto m = memorization_scores(trace, 2.0);
    const double scores = seconds_since(start);
    start = Clock::now();
    const double td = percentile_threshold(d, 0.75);
    const double tm = percentile_threshold(m, 0.75);
    const double fit = seconds_since(start);
    start = Clock::now();
    const auto q = partition(d, m, td, tm);
    const double part = seconds_since(start);
    (void)q;
    sort_note += fmt(" N=%zu sort share %.0f%%;", n, 100.0 * fit / (scores + fit + part));
  }
  std::printf("INFO criterion 3:%s\n", sort_note.c_str());
  return {ratio <= 2.5, fmt("N 50000 -> 100000 at T=%zu: %.4fs -> %.4fs, ratio %.2f", t, small,
                            large, ratio)};
}

Verdict criterion4() {
  const auto start = Clock::now();
  std::vector<double> reductions, ppl;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const cli::DemoSetup setup = cli::default_demo_setup(seed);
    const Corpus corpus = cli::build_demo_corpus(setup);
    SweepConfig cfg = cli::demo_sweep_config(setup);
    cfg.fractions = {0.0, 0.10};
    const SweepCurve curve = prune_sweep(corpus, cfg);
    const SweepPoint& base = curve.points[0];
    const SweepPoint& pruned = curve.points[1];
    const double red =
        base.extraction > 0.0 ? 1.0 - pruned.extraction / base.extraction : 0.0;
    reductions.push_back(red);
    ppl.push_back(pruned.perplexity_delta_pct);
    per_seed += fmt(" %.2f->%.2f", base.extraction, pruned.extraction);
  }
  const double elapsed = seconds_since(start);
  const double med_red = oracle::median(reductions);
  const double med_ppl = oracle::median(ppl);
  return {med_red >= 0.40 && med_ppl <= 2.0 && elapsed < 600.0,
          fmt("extraction%s; median reduction %.0f%%, median ppl increase %.2f%%, %.0fs",
              per_seed.c_str(), 100.0 * med_red, med_ppl, elapsed)};
}

// Spearman correlation of memorization against mean squared gradient norm.
double rank_proxy(const CartographyMap& map, const std::vector<double>& influence,
                  std::size_t epochs, std::uint64_t seed, std::size_t* used,
                  double* slope = nullptr) {
  std::vector<std::size_t> positive, zero;
  for (std::size_t i = 0; i < map.size(); ++i) {
    (map.memorization[i] > 0.0 ? positive : zero).push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::shuffle(zero.begin(), zero.end(), rng);
  zero.resize(std::min(zero.size(), positive.size()));
  std::vector<double> m, inf;
  for (const auto* group : {&positive, &zero}) {
    for (std::size_t i : *group) {
      m.push_back(map.memorization[i]);
      inf.push_back(influence[i] / static_cast<double>(epochs));
    }
  }
  *used = m.size();
  if (slope != nullptr) {
    // Least-squares c in m = c * Inf / T, for inspection only.
    double xy = 0.0, xx = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) {
      xy += m[k] * inf[k];
      xx += inf[k] * inf[k];
    }
    *slope = xx > 0.0 ? xy / xx : 0.0;
  }
  return oracle::spearman(m, inf);
}

Verdict criterion5() {
  std::vector<double> rho, rho_demo;
  std::string per_seed, fitted;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const cli::DemoSetup setup = cli::default_demo_setup(seed);
    const Corpus corpus = cli::build_demo_corpus(setup);
    TrainConfig tc = setup.train;
    tc.record_snapshots = true;
    const auto initial = make_model(setup.model, corpus, derive_seed(seed, 0));
    const TrainResult run = train(*initial, corpus, tc);
    const auto influence = influence_sums(*initial, run.snapshots, corpus.train_sequences());

    CartographyConfig cc = setup.cartography;
    cc.epsilon_value = 1.0;
    std::size_t used = 0;
    double c = 0.0;
    rho.push_back(rank_proxy(build_map(run.trace, cc), influence, tc.epochs, seed, &used, &c));
    fitted += fmt(" %.3g", c);
    per_seed += fmt(" %.2f(n=%zu)", rho.back(), used);
    std::size_t unused = 0;
    rho_demo.push_back(
        rank_proxy(build_map(run.trace, setup.cartography), influence, tc.epochs, seed, &unused));
  }
  std::printf("INFO criterion 5: at the demo epsilon (relative 0.3) median Spearman %.2f\n",
              oracle::median(rho_demo));
  std::printf("INFO criterion 5: fitted c per seed%s\n", fitted.c_str());
  const double med = oracle::median(rho);
  return {med >= 0.3, fmt("relative epsilon 1.0, Spearman per seed%s; median %.2f",
                          per_seed.c_str(), med)};
}

Verdict criterion6() {
  double sum_reduction = 0.0, sum_bound = 0.0;
  int positive_bounds = 0;
  const int runs = 20;
  for (int r = 0; r < runs; ++r) {
    const std::uint64_t seed = 1000 + r;
    SyntheticCorpusConfig cc;
    cc.seed = seed;
    cc.train_count = 400;
    cc.heldout_count = 200;
    const Corpus corpus = inject_canaries(make_synthetic_corpus(cc), 3, 16, 3, seed + 100);
    const auto initial = make_model(ModelSpec{}, corpus, seed);
    TrainConfig tc;
    tc.seed = seed;
    tc.epochs = 20;
    tc.burn_in = 4;
    const TrainResult base = train(*initial, corpus, tc);
    CartographyConfig cart{4, EpsilonMode::kRelative, 0.3, 0.75, 0.75};
    const SamplingPlan p = plan_top_memorized(build_map(base.trace, cart), 0.10);
    const TrainResult pruned = train(*initial, corpus, tc, &p);
    const double reduction =
        generalization_gap(*base.model, corpus) - generalization_gap(*pruned.model, corpus, &p);
    const StabilityEstimate st = loo_stability_estimate(*initial, corpus, tc, 1, seed);
    const double bound = stability_gap_bound(st.beta_hat, p.delta_alpha_total, p.n_hot);
    sum_reduction += reduction;
    sum_bound += bound;
    positive_bounds += bound > 0.0 ? 1 : 0;
  }
  const double mean_reduction = sum_reduction / runs;
  const double mean_bound = sum_bound / runs;
  const bool agree = (mean_reduction > 0.0) == (mean_bound > 0.0);
  return {mean_reduction >= 0.0 && agree,
          fmt("%d paired runs, mean gap reduction %.4f nats, mean bound %.4f, bound > 0 in %d/%d",
              runs, mean_reduction, mean_bound, positive_bounds, runs)};
}

std::vector<std::pair<std::string, std::string>> demo_checksums(const std::filesystem::path& root) {
  std::ostringstream out, err;
  cli::DemoOptions o;
  o.seed = 7;
  o.out = root;
  const cli::CommandOutcome r = cli::cmd_demo(o, out, err);
  if (r.exit_code != 0) return {};
  std::ifstream in(r.run_dir / "manifest.json");
  const auto manifest = nlohmann::json::parse(in);
  std::vector<std::pair<std::string, std::string>> sums;
  for (const auto& f : manifest["outputs"]) {
    const std::string path = f["path"];
    const std::string recorded = f["crc32"];
    const std::string actual = crc32_hex(file_crc32(r.run_dir / path));
    sums.emplace_back(path, recorded == actual ? actual : "stale");
  }
  return sums;
}

Verdict criterion7() {
  std::mt19937_64 rng(77);
  std::size_t exact = 0;
  const std::size_t trials = 50;
  for (std::size_t k = 0; k < trials; ++k) {
    const std::size_t t = 2 + rng() % 30, n = 1 + rng() % 100;
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = "id" + std::to_string(rng() % 100000) + "_" + std::to_string(i);
    std::vector<double> v(t * n);
    std::uniform_real_distribution<double> u(0.0, 20.0);
    for (double& x : v) x = u(rng);
    const LossTrace trace(ids, t, v);
    const std::string bytes = emit(trace, TraceFormat::kBinary);
    const LossTrace back = ingest(bytes, TraceFormat::kBinary);
    const bool same_bits = back.sample_ids() == ids && back.epochs() == t &&
                           std::memcmp(back.values().data(), v.data(), v.size() * sizeof(double)) == 0 &&
                           emit(back, TraceFormat::kBinary) == bytes;
    exact += same_bits ? 1 : 0;
  }

  const auto root = std::filesystem::temp_directory_path() /
                    ("gdc-acceptance-" + std::to_string(std::random_device{}()));
  const auto first = demo_checksums(root / "a");
  const auto second = demo_checksums(root / "b");
  std::filesystem::remove_all(root);
  bool fresh = !first.empty();
  for (const auto& [path, sum] : first) fresh = fresh && sum != "stale";
  const bool same = fresh && first == second;
  return {exact == trials && same,
          fmt("binary round trips %zu/%zu bit-exact; demo twice: %zu artifacts, checksums %s",
              exact, trials, first.size(), same ? "identical" : "differ")};
}

Verdict criterion8() {
  // One canary repeated among a little background text, trained hard.
  SyntheticCorpusConfig cc;
  cc.seed = 8;
  cc.train_count = 40;
  cc.heldout_count = 10;
  const Corpus single = inject_canaries(make_synthetic_corpus(cc), 1, 16, 5, 9);
  TrainConfig tc;
  tc.epochs = 60;
  tc.burn_in = 4;
  tc.seed = 3;
  const auto init = make_model(ModelSpec{}, single, 5);
  const TrainResult fit = train(*init, single, tc);
  const double overfit = extraction_attack(*fit.model, single.canaries()).success;

  SyntheticCorpusConfig cc2;
  cc2.seed = 9;
  cc2.train_count = 200;
  cc2.heldout_count = 400;
  const Corpus many = inject_canaries(make_synthetic_corpus(cc2), 10, 16, 3, 10);
  const auto untrained = make_model(ModelSpec{}, many, 11);
  const double cold = extraction_attack(*untrained, many.canaries()).success;

  // Members and non-members both unseen draws from the same source.
  tc.epochs = 10;
  const TrainResult other = train(*untrained, many, tc);
  const auto held = many.heldout_sequences();
  const std::span<const TokenSpan> all(held);
  const double auc = membership_inference_auc(*other.model, all.first(200), all.subspan(200, 200));
  return {overfit == 1.0 && cold == 0.0 && std::abs(auc - 0.5) <= 0.05,
          fmt("overfit extraction %.2f, untrained %.2f, same-distribution MI-AUC %.3f at n=200",
              overfit, cold, auc)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"score oracle equivalence", criterion1},
      {"percentile and quadrant boundaries", criterion2},
      {"linear score computation", criterion3},
      {"canary extraction at 10% pruning", criterion4},
      {"memorization vs gradient-norm rank proxy", criterion5},
      {"gap reduction vs stability bound sign", criterion6},
      {"determinism and binary round trip", criterion7},
      {"attack sanity", criterion8},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::printf("%s criterion %zu (%s): %s\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first,
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
