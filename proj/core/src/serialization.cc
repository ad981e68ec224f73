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

#include "gdc/serialization.h"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "gdc/error.h"
#include "json.hpp"

namespace gdc {
namespace {

using ojson = nlohmann::ordered_json;

std::string line(const char* fmt, auto... args) {
  char buf[256];
  const int n = std::snprintf(buf, sizeof(buf), fmt, args...);
  return std::string(buf, static_cast<std::size_t>(std::clamp(n, 0, 255))) + "\n";
}

const char* mode_name(WeightingMode mode) {
  return mode == WeightingMode::kSampling ? "sampling" : "loss_multiplier";
}

WeightingMode parse_mode(const std::string& s) {
  if (s == "sampling") return WeightingMode::kSampling;
  if (s == "loss_multiplier") return WeightingMode::kLossMultiplier;
  throw Error(ErrorCode::kMalformedHeader, "unknown weighting mode '" + s + "'");
}

ojson parse_document(std::string_view text, const char* format) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const ojson::exception& e) {
    throw Error(ErrorCode::kMalformedHeader, std::string("not JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != format || doc.value("version", 0) != 1) {
    throw Error(ErrorCode::kMalformedHeader, std::string("not a ") + format + " v1 document");
  }
  return doc;
}

}  // namespace

std::string map_to_json(const CartographyMap& map) {
  ojson doc;
  doc["format"] = "gdc-map";
  doc["version"] = 1;
  doc["config"] = {
      {"burn_in", map.config.burn_in},
      {"epsilon_mode", map.config.epsilon_mode == EpsilonMode::kAbsolute ? "absolute" : "relative"},
      {"epsilon_value", map.config.epsilon_value},
      {"alpha_d", map.config.alpha_d},
      {"alpha_m", map.config.alpha_m},
  };
  doc["epochs"] = map.epochs;
  doc["epsilon"] = map.epsilon;
  doc["tau_d"] = map.tau_d;
  doc["tau_m"] = map.tau_m;
  const auto counts = map.quadrant_counts();
  ojson summary;
  for (std::size_t q = 0; q < 4; ++q) {
    summary[std::string(quadrant_name(static_cast<Quadrant>(q)))] = counts[q];
  }
  summary["degenerate_tau_m"] = map.degenerate_tau_m();
  summary["excluded_from_fit"] =
      static_cast<std::size_t>(std::count(map.fitted.begin(), map.fitted.end(), 0));
  doc["summary"] = std::move(summary);
  ojson samples = ojson::array();
  for (std::size_t i = 0; i < map.size(); ++i) {
    samples.push_back({
        {"sample_id", map.sample_ids[i]},
        {"d", map.difficulty[i]},
        {"m", map.memorization[i]},
        {"quadrant", static_cast<int>(map.quadrants[i])},
        {"coverage", map.coverage[i]},
        {"fitted", map.fitted[i] != 0},
    });
  }
  doc["samples"] = std::move(samples);
  return doc.dump(1) + "\n";
}

CartographyMap map_from_json(std::string_view text) {
  const ojson doc = parse_document(text, "gdc-map");
  try {
    CartographyMap map;
    const auto& c = doc.at("config");
    map.config.burn_in = c.at("burn_in").get<std::size_t>();
    const auto mode = c.at("epsilon_mode").get<std::string>();
    if (mode != "absolute" && mode != "relative") {
      throw Error(ErrorCode::kMalformedHeader, "unknown epsilon mode '" + mode + "'");
    }
    map.config.epsilon_mode = mode == "absolute" ? EpsilonMode::kAbsolute : EpsilonMode::kRelative;
    map.config.epsilon_value = c.at("epsilon_value").get<double>();
    map.config.alpha_d = c.at("alpha_d").get<double>();
    map.config.alpha_m = c.at("alpha_m").get<double>();
    map.epochs = doc.at("epochs").get<std::size_t>();
    map.epsilon = doc.at("epsilon").get<double>();
    map.tau_d = doc.at("tau_d").get<double>();
    map.tau_m = doc.at("tau_m").get<double>();
    for (const auto& s : doc.at("samples")) {
      map.sample_ids.push_back(s.at("sample_id").get<std::string>());
      map.difficulty.push_back(s.at("d").get<double>());
      map.memorization.push_back(s.at("m").get<double>());
      const int q = s.at("quadrant").get<int>();
      if (q < 0 || q > 3) throw Error(ErrorCode::kMalformedHeader, "quadrant out of range");
      map.quadrants.push_back(static_cast<Quadrant>(q));
      map.coverage.push_back(s.value("coverage", 1.0));
      map.fitted.push_back(s.value("fitted", true) ? 1 : 0);
    }
    for (std::size_t i = 0; i < map.size(); ++i) {
      if (map.quadrants[i] != classify(map.difficulty[i], map.memorization[i], map.tau_d, map.tau_m)) {
        throw Error(ErrorCode::kMalformedHeader,
                    "quadrant of '" + map.sample_ids[i] + "' disagrees with its scores");
      }
    }
    return map;
  } catch (const ojson::exception& e) {
    throw Error(ErrorCode::kMalformedHeader, std::string("map document: ") + e.what());
  }
}

std::string plan_to_json(const SamplingPlan& plan) {
  ojson doc;
  doc["format"] = "gdc-plan";
  doc["version"] = 1;
  doc["mode"] = mode_name(plan.mode);
  ojson weights = ojson::object();
  for (std::size_t i = 0; i < plan.size(); ++i) weights[plan.sample_ids[i]] = plan.weights[i];
  doc["weights"] = std::move(weights);
  doc["removed"] = plan.removed_ids();
  doc["delta_alpha"] = plan.delta_alpha;
  doc["delta_alpha_total"] = plan.delta_alpha_total;
  doc["n_hot"] = plan.n_hot;
  return doc.dump(1) + "\n";
}

SamplingPlan plan_from_json(std::string_view text) {
  const ojson doc = parse_document(text, "gdc-plan");
  try {
    std::vector<std::string> ids;
    std::vector<double> weights;
    for (const auto& [id, w] : doc.at("weights").items()) {
      ids.push_back(id);
      weights.push_back(w.get<double>());
    }
    SamplingPlan plan = plan_from_weights(std::move(ids), std::move(weights),
                                          parse_mode(doc.at("mode").get<std::string>()));
    plan.delta_alpha = doc.at("delta_alpha").get<double>();
    plan.delta_alpha_total = doc.at("delta_alpha_total").get<double>();
    plan.n_hot = doc.at("n_hot").get<std::size_t>();
    const auto removed = doc.at("removed").get<std::vector<std::string>>();
    if (removed != plan.removed_ids()) {
      throw Error(ErrorCode::kMalformedHeader, "removed list disagrees with zero weights");
    }
    return plan;
  } catch (const ojson::exception& e) {
    throw Error(ErrorCode::kMalformedHeader, std::string("plan document: ") + e.what());
  }
}

std::string report_to_json(const AuditReport& report) {
  ojson doc;
  doc["format"] = "gdc-audit";
  doc["version"] = 1;
  doc["config"] = {{"prefix_fraction", report.config.prefix_fraction},
                   {"model_family", report.model_family}};
  doc["extraction_success"] = report.extraction_success;
  doc["mi_auc"] = report.mi_auc;
  doc["perplexity"] = report.perplexity;
  doc["train_perplexity"] = report.train_perplexity;
  doc["heldout_leakage"] = report.heldout_leakage ? ojson(*report.heldout_leakage) : ojson(nullptr);
  ojson canaries = ojson::array();
  for (const auto& c : report.canaries) {
    canaries.push_back({{"group_id", c.group_id},
                        {"prefix_length", c.prefix_length},
                        {"suffix_length", c.suffix_length},
                        {"matched_suffix_length", c.matched_suffix_length},
                        {"extracted", c.extracted}});
  }
  doc["canaries"] = std::move(canaries);
  return doc.dump(1) + "\n";
}

std::string sweep_to_json(const SweepCurve& curve) {
  auto point = [](const SweepPoint& p) {
    return ojson{{"fraction", p.fraction},
                 {"extraction", p.extraction},
                 {"perplexity_delta_pct", p.perplexity_delta_pct},
                 {"mi_auc", p.mi_auc},
                 {"perplexity", p.perplexity}};
  };
  ojson doc;
  doc["format"] = "gdc-sweep";
  doc["version"] = 1;
  doc["seeds"] = curve.seeds;
  ojson points = ojson::array();
  for (const auto& p : curve.points) points.push_back(point(p));
  doc["points"] = std::move(points);
  ojson per_seed = ojson::array();
  for (const auto& row : curve.per_seed) {
    ojson r = ojson::array();
    for (const auto& p : row) r.push_back(point(p));
    per_seed.push_back(std::move(r));
  }
  doc["per_seed"] = std::move(per_seed);
  return doc.dump(1) + "\n";
}

std::string sweep_to_csv(const SweepCurve& curve) {
  std::string out = "fraction,extraction,perplexity_delta_pct\n";
  for (const auto& p : curve.points) {
    out += line("%.6g,%.6g,%.6g", p.fraction, p.extraction, p.perplexity_delta_pct);
  }
  return out;
}

std::string render_map_table(const CartographyMap& map, std::size_t max_rows) {
  std::string out;
  out += line("samples %zu  epochs %zu  burn-in %zu", map.size(), map.epochs, map.config.burn_in);
  out += line("epsilon %.6g  tau_d %.6g (alpha_d %.3g)  tau_m %.6g (alpha_m %.3g)", map.epsilon,
              map.tau_d, map.config.alpha_d, map.tau_m, map.config.alpha_m);
  if (map.degenerate_tau_m()) out += "note: tau_m = 0, any forget event marks a sample memorized\n";
  const auto counts = map.quadrant_counts();
  for (std::size_t q = 0; q < 4; ++q) {
    out += line("  %-17s %zu", std::string(quadrant_name(static_cast<Quadrant>(q))).c_str(), counts[q]);
  }
  std::vector<std::size_t> order(map.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return map.memorization[a] > map.memorization[b];
  });
  const std::size_t rows = max_rows == 0 ? map.size() : std::min(max_rows, map.size());
  out += line("%-24s %12s %10s  %s", "sample_id", "d", "m", "quadrant");
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t i = order[r];
    out += line("%-24s %12.6f %10.6f  %s", map.sample_ids[i].c_str(), map.difficulty[i],
                map.memorization[i], std::string(quadrant_name(map.quadrants[i])).c_str());
  }
  return out;
}

std::string render_sweep_table(const SweepCurve& curve) {
  std::string out = line("%-10s %12s %14s %10s", "fraction", "extraction", "ppl_delta_pct", "mi_auc");
  for (const auto& p : curve.points) {
    out += line("%-10.4g %12.4f %14.4f %10.4f", p.fraction, p.extraction, p.perplexity_delta_pct, p.mi_auc);
  }
  return out;
}

std::string render_report_table(const AuditReport& report) {
  std::string out;
  out += line("model               %s", report.model_family.c_str());
  out += line("extraction_success  %.4f", report.extraction_success);
  out += line("mi_auc              %.4f", report.mi_auc);
  out += line("perplexity          %.4f", report.perplexity);
  out += line("train_perplexity    %.4f", report.train_perplexity);
  if (report.heldout_leakage) out += line("heldout_leakage     %.4f", *report.heldout_leakage);
  for (const auto& c : report.canaries) {
    out += line("  %-12s prefix %zu  matched %zu/%zu  %s", c.group_id.c_str(), c.prefix_length,
                c.matched_suffix_length, c.suffix_length, c.extracted ? "EXTRACTED" : "-");
  }
  return out;
}

}  // namespace gdc
