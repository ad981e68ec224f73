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


#include "gdc/cli/commands.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <memory>
#include <sstream>

#include "gdc/checksum.h"
#include "gdc/cli/manifest.h"
#include "gdc/error.h"
#include "gdc/model.h"
#include "gdc/serialization.h"
#include "gdc/trace_io.h"
#include "json.hpp"

namespace gdc::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kBadRange:
      return kExitConfig;
    case ErrorCode::kDivergence:
      return kExitDivergence;
    default:
      return kExitInput;
  }
}

// Runs `body` and converts library errors into exit codes.
template <typename Body>
CommandOutcome guarded(std::string_view command, std::ostream& err, Body&& body) {
  CommandOutcome outcome;
  try {
    outcome.run_dir = body();
  } catch (const Error& e) {
    err << "gdc " << command << ": " << e.what() << '\n';
    outcome.exit_code = exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "gdc " << command << ": internal error: " << e.what() << '\n';
    outcome.exit_code = 1;
  }
  return outcome;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::string_view epsilon_mode_name(EpsilonMode mode) {
  return mode == EpsilonMode::kAbsolute ? "absolute" : "relative";
}

std::string_view weighting_mode_name(WeightingMode mode) {
  return mode == WeightingMode::kSampling ? "sampling" : "loss_multiplier";
}

json cartography_json(const CartographyConfig& c) {
  return {{"burn_in", c.burn_in},
          {"epsilon_mode", epsilon_mode_name(c.epsilon_mode)},
          {"epsilon", c.epsilon_value},
          {"alpha_d", c.alpha_d},
          {"alpha_m", c.alpha_m}};
}

json model_json(const ModelSpec& m) {
  return {{"family", model_family_name(m.family)},
          {"order", m.order},
          {"hidden", m.hidden},
          {"init_scale", m.init_scale}};
}

json train_json(const TrainConfig& t) {
  return {{"epochs", t.epochs},
          {"burn_in", t.burn_in},
          {"learning_rate", t.learning_rate},
          {"schedule", t.schedule == StepSchedule::kConstant ? "constant" : "inverse_epoch"},
          {"batch_size", t.batch_size},
          {"weight_decay", t.weight_decay},
          {"seed", t.seed},
          {"divergence_factor", t.divergence_factor}};
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string plan_summary(const SamplingPlan& p) {
  std::ostringstream os;
  os << "samples " << p.size() << "  targeted " << p.n_hot << "  removed "
     << p.removed_count() << "  delta_alpha_total " << fixed(p.delta_alpha_total) << "  mode "
     << weighting_mode_name(p.mode) << '\n';
  return os.str();
}

std::string train_summary(const TrainResult& r) {
  json j;
  j["initial_mean_loss"] = r.initial_mean_loss;
  j["epoch_mean_loss"] = r.epoch_mean_loss;
  j["steps"] = r.steps;
  return j.dump(2) + "\n";
}

std::string influence_csv(const LossTrace& trace, const std::vector<double>& inf) {
  std::ostringstream os;
  os << std::setprecision(17) << "sample_id,influence\n";
  for (std::size_t i = 0; i < inf.size(); ++i) os << trace.sample_ids()[i] << ',' << inf[i] << '\n';
  return os.str();
}

}  // namespace

DemoSetup default_demo_setup(std::uint64_t seed) {
  DemoSetup s;
  s.seed = seed;
  s.corpus.seed = derive_seed(seed, 10);
  s.train.epochs = 40;
  s.train.burn_in = 8;
  s.train.seed = derive_seed(seed, 1);
  s.cartography.burn_in = 8;
  s.cartography.epsilon_mode = EpsilonMode::kRelative;
  s.cartography.epsilon_value = 0.3;
  return s;
}

Corpus build_demo_corpus(const DemoSetup& setup) {
  const Corpus background = make_synthetic_corpus(setup.corpus);
  return inject_canaries(background, setup.canary_groups, setup.canary_length,
                         setup.canary_repetitions, derive_seed(setup.seed, 11));
}

SweepConfig demo_sweep_config(const DemoSetup& setup) {
  SweepConfig c;
  c.model = setup.model;
  c.train = setup.train;
  c.cartography = setup.cartography;
  c.fractions = setup.sweep;
  c.seeds = {setup.seed};
  c.target_weight = setup.target_weight;
  c.mode = setup.mode;
  c.audit = setup.audit;
  return c;
}

CommandOutcome cmd_ingest(const IngestOptions& o, std::ostream& out, std::ostream& err) {
  return guarded("ingest", err, [&] {
    const LossTrace trace = read_trace_file(o.trace);
    RunManifest m("ingest", make_run_dir(o.out, 0));
    m.set_config({{"trace", o.trace.string()}});
    m.add_input(o.trace);
    m.mark("read");

    std::size_t missing = 0;
    double min_coverage = 1.0;
    for (std::size_t i = 0; i < trace.samples(); ++i) {
      min_coverage = std::min(min_coverage, trace.coverage(i));
      for (std::size_t t = 1; t <= trace.epochs(); ++t) missing += trace.present(t, i) ? 0 : 1;
    }
    if (missing == 0) {
      m.write_artifact("trace.gdct", emit(trace, TraceFormat::kBinary));
    } else {
      m.write_artifact("trace.txt", emit(trace, TraceFormat::kText));
    }
    json summary = {{"epochs", trace.epochs()},
                    {"samples", trace.samples()},
                    {"missing_cells", missing},
                    {"min_coverage", min_coverage}};
    m.write_artifact("summary.json", summary.dump(2) + "\n");
    m.mark("write");
    m.save();
    out << "T=" << trace.epochs() << " N=" << trace.samples() << " missing=" << missing
        << " min_coverage=" << fixed(min_coverage) << '\n'
        << "run " << m.run_dir().string() << '\n';
    return m.run_dir();
  });
}

CommandOutcome cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
  return guarded("analyze", err, [&] {
    const LossTrace trace = read_trace_file(o.trace);
    const CartographyMap map = build_map(trace, o.config);
    RunManifest m("analyze", make_run_dir(o.out, 0));
    m.set_config(cartography_json(o.config));
    m.add_input(o.trace);
    m.mark("map");
    m.write_artifact("map.json", map_to_json(map));
    m.mark("write");
    m.save();
    out << render_map_table(map, o.table_rows) << "run " << m.run_dir().string() << '\n';
    return m.run_dir();
  });
}

CommandOutcome cmd_plan(const PlanOptions& o, std::ostream& out, std::ostream& err) {
  return guarded("plan", err, [&] {
    const CartographyMap map = map_from_json(read_file(o.map));
    SamplingPlan p;
    json config;
    if (o.top_fraction) {
      p = plan_top_memorized(map, *o.top_fraction, o.target_weight, o.policy.mode);
      config = {{"top_fraction", *o.top_fraction},
                {"target_weight", o.target_weight},
                {"mode", weighting_mode_name(o.policy.mode)}};
    } else {
      p = plan(map, o.policy);
      config = {{"gamma", o.policy.gamma},
                {"alpha_down", o.policy.alpha_down},
                {"remove_noisy", o.policy.remove_noisy},
                {"mode", weighting_mode_name(o.policy.mode)}};
    }
    RunManifest m("plan", make_run_dir(o.out, 0));
    m.set_config(config);
    m.add_input(o.map);
    m.write_artifact("plan.json", plan_to_json(p));
    m.mark("plan");
    m.save();
    out << plan_summary(p) << "run " << m.run_dir().string() << '\n';
    return m.run_dir();
  });
}

CommandOutcome cmd_train(const TrainOptions& o, std::ostream& out, std::ostream& err) {
  return guarded("train", err, [&] {
    TrainConfig config = o.train;
    config.seed = derive_seed(o.seed, 1);
    config.record_snapshots = o.snapshots;
    config.validate();
    const Corpus corpus =
        o.corpus ? load_corpus(*o.corpus) : build_demo_corpus(default_demo_setup(o.seed));
    std::optional<SamplingPlan> p;
    if (o.plan) p = plan_from_json(read_file(*o.plan));

    RunManifest m("train", make_run_dir(o.out, o.seed));
    json cfg = {{"model", model_json(o.model)}, {"train", train_json(config)}};
    cfg["corpus"] = o.corpus ? o.corpus->string() : std::string("synthetic");
    m.set_config(cfg);
    m.add_seed(o.seed);
    if (o.corpus) m.add_input(*o.corpus);
    if (o.plan) m.add_input(*o.plan);
    if (!o.corpus) m.write_artifact("corpus.gdcc", write_corpus(corpus));

    const auto initial = make_model(o.model, corpus, derive_seed(o.seed, 0));
    const TrainResult r = train(*initial, corpus, config, p ? &*p : nullptr);
    m.mark("train");
    m.write_artifact("model.gdcp", serialize_model(*r.model));
    m.write_artifact("trace.gdct", emit(r.trace, TraceFormat::kBinary));
    m.write_artifact("train.json", train_summary(r));
    if (o.snapshots) {
      const auto inf = influence_sums(*initial, r.snapshots, corpus.train_sequences());
      m.write_artifact("influence.csv", influence_csv(r.trace, inf));
      m.mark("influence");
    }
    m.save();
    out << "epochs " << config.epochs << "  initial loss " << fixed(r.initial_mean_loss)
        << "  final loss " << fixed(r.epoch_mean_loss.back()) << '\n'
        << "run " << m.run_dir().string() << '\n';
    return m.run_dir();
  });
}

CommandOutcome cmd_audit(const AuditOptions& o, std::ostream& out, std::ostream& err) {
  return guarded("audit", err, [&] {
    const auto model = load_model(o.model);
    const Corpus corpus = load_corpus(o.corpus);
    const AuditReport report = audit(*model, corpus, o.config);
    RunManifest m("audit", make_run_dir(o.out, 0));
    m.set_config({{"prefix_fraction", o.config.prefix_fraction}});
    m.add_input(o.model);
    m.add_input(o.corpus);
    m.mark("audit");
    m.write_artifact("report.json", report_to_json(report));
    m.save();
    out << render_report_table(report) << "run " << m.run_dir().string() << '\n';
    return m.run_dir();
  });
}

CommandOutcome cmd_report(const ReportOptions& o, std::ostream& out, std::ostream& err) {
  return guarded("report", err, [&] {
    if (!fs::is_directory(o.run)) {
      throw Error(ErrorCode::kIo, "not a run directory: '" + o.run.string() + "'");
    }
    std::ostringstream md;
    md << "# Run " << o.run.filename().string() << "\n\n";
    RunManifest m("report", make_run_dir(o.out, 0));
    m.set_config({{"run", o.run.string()}});
    bool any = false;
    if (fs::exists(o.run / "map.json")) {
      m.add_input(o.run / "map.json");
      md << "## Map\n\n```\n" << render_map_table(map_from_json(read_file(o.run / "map.json")))
         << "```\n\n";
      any = true;
    }
    if (fs::exists(o.run / "plan.json")) {
      m.add_input(o.run / "plan.json");
      md << "## Plan\n\n```\n" << plan_summary(plan_from_json(read_file(o.run / "plan.json")))
         << "```\n\n";
      any = true;
    }
    for (const char* name : {"report.json", "report_baseline.json", "report_pruned.json"}) {
      const fs::path p = o.run / name;
      if (!fs::exists(p)) continue;
      m.add_input(p);
      const json r = json::parse(read_file(p));
      md << "## " << name << "\n\n";
      for (const char* key : {"extraction_success", "mi_auc", "perplexity", "train_perplexity"}) {
        if (r.contains(key)) md << "- " << key << ": " << fixed(r[key].get<double>()) << '\n';
      }
      md << '\n';
      any = true;
    }
    if (fs::exists(o.run / "sweep.csv")) {
      m.add_input(o.run / "sweep.csv");
      md << "## Sweep\n\n```\n" << read_file(o.run / "sweep.csv") << "```\n";
      any = true;
    }
    if (!any) throw Error(ErrorCode::kEmptyInput, "no known artifacts in '" + o.run.string() + "'");
    m.write_artifact("report.md", md.str());
    m.save();
    out << md.str() << "run " << m.run_dir().string() << '\n';
    return m.run_dir();
  });
}

CommandOutcome cmd_demo(const DemoOptions& o, std::ostream& out, std::ostream& err) {
  return guarded("demo", err, [&] {
    DemoSetup setup = default_demo_setup(o.seed);
    setup.prune_fraction = o.prune_fraction;
    setup.target_weight = o.target_weight;
    setup.mode = o.mode;
    if (!(o.prune_fraction >= 0.0 && o.prune_fraction <= 1.0)) {
      throw Error(ErrorCode::kInvalidConfig, "--prune-fraction must lie in [0, 1]");
    }
    setup.train.validate();
    setup.cartography.validate(setup.train.epochs);

    RunManifest m("demo", make_run_dir(o.out, o.seed));
    json cfg = {{"seed", o.seed},
                {"corpus",
                 {{"vocab_size", setup.corpus.vocab_size},
                  {"train", setup.corpus.train_count},
                  {"heldout", setup.corpus.heldout_count},
                  {"length", setup.corpus.length},
                  {"branching", setup.corpus.branching},
                  {"top_probability", setup.corpus.top_probability}}},
                {"canaries",
                 {{"groups", setup.canary_groups},
                  {"length", setup.canary_length},
                  {"repetitions", setup.canary_repetitions}}},
                {"model", model_json(setup.model)},
                {"train", train_json(setup.train)},
                {"cartography", cartography_json(setup.cartography)},
                {"prune_fraction", setup.prune_fraction},
                {"target_weight", setup.target_weight},
                {"mode", weighting_mode_name(setup.mode)},
                {"sweep", setup.sweep},
                {"prefix_fraction", setup.audit.prefix_fraction}};
    m.set_config(cfg);
    m.add_seed(o.seed);

    const Corpus corpus = build_demo_corpus(setup);
    m.write_artifact("corpus.gdcc", write_corpus(corpus));
    m.mark("corpus");

    const auto initial = make_model(setup.model, corpus, derive_seed(o.seed, 0));
    const TrainResult base = train(*initial, corpus, setup.train);
    m.write_artifact("model_baseline.gdcp", serialize_model(*base.model));
    m.write_artifact("trace_baseline.gdct", emit(base.trace, TraceFormat::kBinary));
    m.mark("baseline");

    const CartographyMap map = build_map(base.trace, setup.cartography);
    m.write_artifact("map.json", map_to_json(map));
    const SamplingPlan p =
        plan_top_memorized(map, setup.prune_fraction, setup.target_weight, setup.mode);
    m.write_artifact("plan.json", plan_to_json(p));
    m.mark("cartography");

    std::unique_ptr<Model> pruned_model;
    if (p.n_hot == 0) {
      pruned_model = base.model->clone();
      m.write_artifact("trace_pruned.gdct", emit(base.trace, TraceFormat::kBinary));
    } else {
      TrainResult pruned = train(*initial, corpus, setup.train, &p);
      m.write_artifact("trace_pruned.gdct", emit(pruned.trace, TraceFormat::kBinary));
      pruned_model = std::move(pruned.model);
    }
    m.write_artifact("model_pruned.gdcp", serialize_model(*pruned_model));
    m.mark("pruned");

    const AuditReport before = audit(*base.model, corpus, setup.audit);
    const AuditReport after = audit(*pruned_model, corpus, setup.audit);
    m.write_artifact("report_baseline.json", report_to_json(before));
    m.write_artifact("report_pruned.json", report_to_json(after));
    m.mark("audit");

    const SweepCurve curve = prune_sweep(corpus, demo_sweep_config(setup));
    m.write_artifact("sweep.json", sweep_to_json(curve));
    m.write_artifact("sweep.csv", sweep_to_csv(curve));
    m.mark("sweep");
    m.save();

    const double ppl_delta = (after.perplexity / before.perplexity - 1.0) * 100.0;
    out << render_map_table(map, 10) << '\n'
        << "pruned " << p.n_hot << " of " << p.size() << " samples (fraction "
        << fixed(setup.prune_fraction, 2) << ")\n"
        << "extraction  baseline " << fixed(before.extraction_success, 2) << "  pruned "
        << fixed(after.extraction_success, 2) << '\n'
        << "perplexity  baseline " << fixed(before.perplexity) << "  pruned "
        << fixed(after.perplexity) << "  delta " << fixed(ppl_delta, 2) << "%\n\n"
        << render_sweep_table(curve) << "run " << m.run_dir().string() << '\n';
    return m.run_dir();
  });
}

}  // namespace gdc::cli
