// Copyright 2026 The Framebias Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Report envelope shared by every command:
//
//   {
//     "tool_version": "...",
//     "command": "audit" | "filter" | "filter-one" | "eval" | "simulate" | ...,
//     "timestamp": "YYYY-MM-DDTHH:MM:SSZ",
//     "config": { ...flags echoed... },
//     "payload_type": "audit" | "filter" | "metrics" | "sweep" | ...,
//     "payload": { ... }
//   }
//
// Floating-point fields are printed with exactly six decimals; undefined
// statistics are null. Key order is fixed, so reruns differ only in the
// timestamp line.

#ifndef FRAMEBIAS_REPORT_H_
#define FRAMEBIAS_REPORT_H_

#include <string>
#include <string_view>

#include "json.hpp"

#include "framebias/bias_audit.h"
#include "framebias/debias_filter.h"
#include "framebias/relevance_metrics.h"
#include "framebias/simulator.h"

namespace framebias {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kToolVersion = "0.1.0";

Json ToJson(const ActionClass& action_class);
Json ToJson(const ClassStats& stats);
Json ToJson(const LengthHistogram& histogram);
Json ToJson(const GlobalLengthSummary& summary);
Json ToJson(const FilterReport& report);
Json ToJson(const MetricsReport& report);
Json ToJson(const SimConfig& config);
Json ToJson(const SweepReport& report);

Json AuditPayload(const Dataset& dataset, int64_t min_count,
                  const LengthHistogram& histogram,
                  const std::optional<ActionClass>& histogram_class);

Json MakeEnvelope(std::string_view command, Json config,
                  std::string_view payload_type, Json payload);

// Current UTC time, RFC 3339 with second precision.
std::string UtcTimestamp();

// Deterministic pretty printer; see the header comment for the number rule.
std::string RenderJson(const Json& value);

}  // namespace framebias

#endif  // FRAMEBIAS_REPORT_H_
