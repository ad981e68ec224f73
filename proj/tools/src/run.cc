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


#include <map>
#include <string>

#include "CLI11.hpp"
#include "gdc/cli/commands.h"
#include "gdc/model.h"

namespace gdc::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"gdc: loss-trace cartography, hotspot pruning and privacy audits"};
  app.require_subcommand(1);

  const std::map<std::string, EpsilonMode> epsilon_modes{{"absolute", EpsilonMode::kAbsolute},
                                                         {"relative", EpsilonMode::kRelative}};
  const std::map<std::string, WeightingMode> weighting_modes{
      {"sampling", WeightingMode::kSampling}, {"loss", WeightingMode::kLossMultiplier}};
  const std::map<std::string, ModelFamily> families{{"convex", ModelFamily::kConvexLM},
                                                    {"rnn", ModelFamily::kTinyRNN}};
  const std::map<std::string, StepSchedule> schedules{{"constant", StepSchedule::kConstant},
                                                      {"inverse", StepSchedule::kInverseEpoch}};

  IngestOptions ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Validate a loss trace and store it as binary");
  c_ingest->add_option("--trace", ingest.trace, "Trace file (text or binary)")->required();
  c_ingest->add_option("--out", ingest.out, "Output root");

  AnalyzeOptions analyze;
  auto* c_analyze = app.add_subcommand("analyze", "Build the cartography map of a trace");
  c_analyze->add_option("--trace", analyze.trace, "Trace file")->required();
  c_analyze->add_option("--burn-in", analyze.config.burn_in, "Burn-in epochs T_e");
  c_analyze->add_option("--alpha-d", analyze.config.alpha_d, "Difficulty percentile");
  c_analyze->add_option("--alpha-m", analyze.config.alpha_m, "Memorization percentile");
  c_analyze->add_option("--epsilon", analyze.config.epsilon_value, "Forget threshold or margin")
      ->required();
  c_analyze->add_option("--epsilon-mode", analyze.config.epsilon_mode, "absolute or relative")
      ->transform(CLI::CheckedTransformer(epsilon_modes, CLI::ignore_case));
  c_analyze->add_option("--rows", analyze.table_rows, "Rows in the printed table");
  c_analyze->add_option("--out", analyze.out, "Output root");

  PlanOptions plan;
  double top_fraction = -1.0;
  auto* c_plan = app.add_subcommand("plan", "Turn a map into a sampling plan");
  c_plan->add_option("--map", plan.map, "map.json from analyze")->required();
  c_plan->add_option("--gamma", plan.policy.gamma, "Weight for AmbiguousHard");
  c_plan->add_option("--alpha-down", plan.policy.alpha_down, "Weight for HotspotMemorized");
  c_plan->add_flag("--remove-noisy", plan.policy.remove_noisy, "Drop NoisyOutlier samples");
  c_plan->add_option("--mode", plan.policy.mode, "sampling or loss")
      ->transform(CLI::CheckedTransformer(weighting_modes, CLI::ignore_case));
  auto* top_opt = c_plan->add_option("--top-fraction", top_fraction,
                                     "Prune this fraction by memorization instead");
  c_plan->add_option("--target-weight", plan.target_weight, "Weight of pruned samples");
  c_plan->add_option("--out", plan.out, "Output root");

  TrainOptions train_opts;
  std::string corpus_path, plan_path;
  auto* c_train = app.add_subcommand("train", "Train a reference model and record its trace");
  auto* corpus_opt = c_train->add_option("--corpus", corpus_path, "Corpus file (default: synthetic)");
  auto* plan_opt = c_train->add_option("--plan", plan_path, "plan.json applied after burn-in");
  c_train->add_option("--model", train_opts.model.family, "convex or rnn")
      ->transform(CLI::CheckedTransformer(families, CLI::ignore_case));
  c_train->add_option("--order", train_opts.model.order, "ConvexLM context length");
  c_train->add_option("--hidden", train_opts.model.hidden, "TinyRNN state size");
  c_train->add_option("--epochs", train_opts.train.epochs, "Epochs T");
  c_train->add_option("--burn-in", train_opts.train.burn_in, "Burn-in epochs T_e");
  c_train->add_option("--lr", train_opts.train.learning_rate, "Step size");
  c_train->add_option("--schedule", train_opts.train.schedule, "constant or inverse")
      ->transform(CLI::CheckedTransformer(schedules, CLI::ignore_case));
  c_train->add_option("--batch", train_opts.train.batch_size, "Batch size");
  c_train->add_option("--weight-decay", train_opts.train.weight_decay, "L2 weight decay");
  c_train->add_option("--seed", train_opts.seed, "Seed");
  c_train->add_flag("--snapshots", train_opts.snapshots, "Write influence sums");
  c_train->add_option("--out", train_opts.out, "Output root");

  AuditOptions audit_opts;
  auto* c_audit = app.add_subcommand("audit", "Extraction, membership inference and perplexity");
  c_audit->add_option("--model", audit_opts.model, "Parameter file")->required();
  c_audit->add_option("--corpus", audit_opts.corpus, "Corpus file")->required();
  c_audit->add_option("--prefix-fraction", audit_opts.config.prefix_fraction, "Prompt share");
  c_audit->add_option("--out", audit_opts.out, "Output root");

  ReportOptions report;
  auto* c_report = app.add_subcommand("report", "Summarize the artifacts of a run directory");
  c_report->add_option("--run", report.run, "Run directory")->required();
  c_report->add_option("--out", report.out, "Output root");

  DemoOptions demo;
  auto* c_demo = app.add_subcommand("demo", "End-to-end canary experiment");
  c_demo->add_option("--seed", demo.seed, "Seed");
  c_demo->add_option("--out", demo.out, "Output root");
  c_demo->add_option("--prune-fraction", demo.prune_fraction, "Share pruned by memorization");
  c_demo->add_option("--target-weight", demo.target_weight, "Weight of pruned samples");
  c_demo->add_option("--mode", demo.mode, "sampling or loss")
      ->transform(CLI::CheckedTransformer(weighting_modes, CLI::ignore_case));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*c_ingest) return cmd_ingest(ingest, out, err).exit_code;
  if (*c_analyze) return cmd_analyze(analyze, out, err).exit_code;
  if (*c_plan) {
    if (*top_opt) plan.top_fraction = top_fraction;
    return cmd_plan(plan, out, err).exit_code;
  }
  if (*c_train) {
    if (*corpus_opt) train_opts.corpus = corpus_path;
    if (*plan_opt) train_opts.plan = plan_path;
    return cmd_train(train_opts, out, err).exit_code;
  }
  if (*c_audit) return cmd_audit(audit_opts, out, err).exit_code;
  if (*c_report) return cmd_report(report, out, err).exit_code;
  return cmd_demo(demo, out, err).exit_code;
}

}  // namespace gdc::cli
