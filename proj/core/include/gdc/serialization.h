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

#ifndef GDC_SERIALIZATION_H_
#define GDC_SERIALIZATION_H_

#include <cstddef>
#include <string>
#include <string_view>

#include "gdc/audit.h"
#include "gdc/cartography.h"
#include "gdc/intervention.h"

namespace gdc {

// JSON documents. Key order is fixed, so equal inputs serialize to equal bytes.
std::string map_to_json(const CartographyMap& map);
CartographyMap map_from_json(std::string_view text);

std::string plan_to_json(const SamplingPlan& plan);
SamplingPlan plan_from_json(std::string_view text);

std::string report_to_json(const AuditReport& report);
std::string sweep_to_json(const SweepCurve& curve);

// `fraction,extraction,perplexity_delta_pct` with a header row.
std::string sweep_to_csv(const SweepCurve& curve);

// Threshold summary, quadrant counts and up to `max_rows` sample rows
// (0 = all), highest memorization first.
std::string render_map_table(const CartographyMap& map, std::size_t max_rows = 20);
std::string render_sweep_table(const SweepCurve& curve);
std::string render_report_table(const AuditReport& report);

}  // namespace gdc

#endif  // GDC_SERIALIZATION_H_
