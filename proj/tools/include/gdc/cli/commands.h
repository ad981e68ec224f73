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


#ifndef GDC_CLI_COMMANDS_H_
#define GDC_CLI_COMMANDS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gdc/audit.h"
#include "gdc/cartography.h"
#include "gdc/corpus.h"
#include "gdc/intervention.h"
#include "gdc/trainer.h"

namespace gdc::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitDivergence = 4;

struct CommandOutcome {
  int exit_code = kExitOk;
  std::filesystem::path run_dir;  // empty when the command failed early
};

// The desk-scale canary experiment reproduced by `demo`.
struct DemoSetup {
  std::uint64_t seed = 1;
  SyntheticCorpusConfig corpus;
  std::size_t canary_groups = 10;
  std::size_t canary_length = 16;
  std::size_t canary_repetitions = 3;
  ModelSpec model;
  TrainConfig train;
  CartographyConfig cartography;
  double prune_fraction = 0.05;
  double target_weight = 0.0;  // 0 removes the pruned samples
  WeightingMode mode = WeightingMode::kSampling;
  std::vector<double> sweep{0.0, 0.05, 0.10, 0.20};
  AuditConfig audit;
};

DemoSetup default_demo_setup(std::uint64_t seed);

// Background corpus plus canaries, all derived from setup.seed.
Corpus build_demo_corpus(const DemoSetup& setup);

// The sweep configuration `demo` runs for its own seed.
SweepConfig demo_sweep_config(const DemoSetup& setup);

struct IngestOptions {
  std::filesystem::path trace;
  std::filesystem::path out = "runs";
};

struct AnalyzeOptions {
  std::filesystem::path trace;
  std::filesystem::path out = "runs";
  CartographyConfig config{8, EpsilonMode::kAbsolute, 0.0, 0.75, 0.75};
  std::size_t table_rows = 20;
};

struct PlanOptions {
  std::filesystem::path map;
  std::filesystem::path out = "runs";
  InterventionPolicy policy;
  // When set, prune the top fraction by memorization instead of the
  // quadrant policy.
  std::optional<double> top_fraction;
  double target_weight = 0.0;
};

struct TrainOptions {
  std::optional<std::filesystem::path> corpus;  // synthetic demo corpus when absent
  std::optional<std::filesystem::path> plan;
  std::filesystem::path out = "runs";
  ModelSpec model;
  TrainConfig train;
  std::uint64_t seed = 1;
  bool snapshots = false;  // also write per-sample influence sums
};

struct AuditOptions {
  std::filesystem::path model;
  std::filesystem::path corpus;
  std::filesystem::path out = "runs";
  AuditConfig config;
};

struct ReportOptions {
  std::filesystem::path run;  // directory holding earlier artifacts
  std::filesystem::path out = "runs";
};

struct DemoOptions {
  std::uint64_t seed = 1;
  std::filesystem::path out = "runs";
  double prune_fraction = 0.05;
  double target_weight = 0.0;
  WeightingMode mode = WeightingMode::kSampling;
};

CommandOutcome cmd_ingest(const IngestOptions& options, std::ostream& out, std::ostream& err);
CommandOutcome cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err);
CommandOutcome cmd_plan(const PlanOptions& options, std::ostream& out, std::ostream& err);
CommandOutcome cmd_train(const TrainOptions& options, std::ostream& out, std::ostream& err);
CommandOutcome cmd_audit(const AuditOptions& options, std::ostream& out, std::ostream& err);
CommandOutcome cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err);
CommandOutcome cmd_demo(const DemoOptions& options, std::ostream& out, std::ostream& err);

// Parses argv and dispatches; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gdc::cli

#endif  // GDC_CLI_COMMANDS_H_
