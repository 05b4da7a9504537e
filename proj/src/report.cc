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

#include "framebias/report.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>

#include "framebias/error.h"

namespace framebias {
namespace {

Json Optional(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json QueryAverageJson(const QueryAverage& avg) {
  Json j;
  j["mean"] = avg.mean;
  j["evaluated_queries"] = avg.evaluated;
  j["degenerate_queries"] = avg.degenerate;
  return j;
}

double MeanOf(const std::vector<int64_t>& v) {
  if (v.empty()) return 0;
  double total = 0;
  for (int64_t x : v) total += static_cast<double>(x);
  return total / static_cast<double>(v.size());
}

Json DirectionJson(const DirectionMetrics& m) {
  Json j;
  j["ndcg"] = QueryAverageJson(m.ndcg);
  j["map"] = QueryAverageJson(m.map);
  j["recall_at_1"] = Optional(m.recall_at_1);
  j["recall_at_5"] = Optional(m.recall_at_5);
  j["recall_at_10"] = Optional(m.recall_at_10);
  j["gt_queries"] = m.gt_ranks.size();
  j["mean_gt_rank"] = Optional(m.mean_gt_rank);
  j["median_gt_rank"] = Optional(m.median_gt_rank);
  if (m.gt_ranks.empty()) {
    j["mean_gt_rank_optimistic"] = nullptr;
    j["mean_gt_rank_pessimistic"] = nullptr;
  } else {
    j["mean_gt_rank_optimistic"] = MeanOf(m.gt_ranks_optimistic);
    j["mean_gt_rank_pessimistic"] = MeanOf(m.gt_ranks_pessimistic);
  }
  j["gt_query_ids"] = m.gt_query_ids;
  j["gt_ranks"] = m.gt_ranks;
  return j;
}

Json ConditionJson(const ConditionMetrics& m) {
  Json j;
  j["mean_gt_rank"] = m.mean_gt_rank;
  j["recall_at_10"] = m.recall_at_10;
  j["mean_topk_length"] = m.mean_topk_length;
  j["removed"] = m.removed;
  j["classes_touched"] = m.classes_touched;
  return j;
}

void AppendEscaped(std::string& out, const Json& string_value) {
  out += string_value.dump(-1, ' ', false,
                           nlohmann::ordered_json::error_handler_t::replace);
}

bool IsScalar(const Json& v) { return !v.is_object() && !v.is_array(); }

void Render(const Json& v, int indent, std::string& out) {
  const std::string pad(static_cast<size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<size_t>(indent + 1) * 2, ' ');
  switch (v.type()) {
    case Json::value_t::null:
      out += "null";
      return;
    case Json::value_t::boolean:
      out += v.get<bool>() ? "true" : "false";
      return;
    case Json::value_t::number_integer:
      out += std::to_string(v.get<int64_t>());
      return;
    case Json::value_t::number_unsigned:
      out += std::to_string(v.get<uint64_t>());
      return;
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) {
        out += "null";
        return;
      }
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.6f", d);
      // Avoid printing "-0.000000".
      if (std::string_view(buf) == "-0.000000") {
        out += "0.000000";
      } else {
        out += buf;
      }
      return;
    }
    case Json::value_t::string:
      AppendEscaped(out, v);
      return;
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(v.begin(), v.end(), IsScalar);
      if (flat) {
        out += "[";
        bool first = true;
        for (const Json& e : v) {
          if (!first) out += ", ";
          first = false;
          Render(e, indent + 1, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const Json& e : v) {
        if (!first) out += ",\n";
        first = false;
        out += inner;
        Render(e, indent + 1, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : v.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner;
        AppendEscaped(out, Json(key));
        out += ": ";
        Render(value, indent + 1, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    default:
      out += "null";
  }
}

}  // namespace

Json ToJson(const ActionClass& action_class) {
  Json j;
  j["verb_class"] = action_class.verb;
  j["noun_class"] = action_class.noun;
  return j;
}

Json ToJson(const ClassStats& stats) {
  Json j = ToJson(stats.action_class);
  j["train_count"] = stats.train_count;
  j["test_count"] = stats.test_count;
  j["train_mean_len"] = Optional(stats.train_mean_len);
  j["test_mean_len"] = Optional(stats.test_mean_len);
  j["discrepancy"] = Optional(stats.discrepancy);
  return j;
}

Json ToJson(const LengthHistogram& histogram) {
  Json j;
  j["bin_width"] = histogram.bin_width;
  Json bins = Json::array();
  for (const HistogramBin& b : histogram.bins) {
    bins.push_back(Json::array({b.bin_start, b.train_count, b.test_count}));
  }
  j["bins"] = std::move(bins);
  return j;
}

Json ToJson(const GlobalLengthSummary& summary) {
  Json j;
  j["train_mean"] = summary.train_mean;
  j["test_mean"] = summary.test_mean;
  j["train_count"] = summary.train_count;
  j["test_count"] = summary.test_count;
  return j;
}

Json ToJson(const FilterReport& report) {
  Json j;
  Json totals;
  totals["removed_count"] = report.removed_count;
  totals["classes_touched"] = report.classes_touched;
  totals["removed_fraction"] = report.removed_fraction;
  j["totals"] = std::move(totals);
  j["removed_clip_ids"] = report.removed_clip_ids;
  Json per_class = Json::array();
  for (const ClassFilterOutcome& o : report.per_class) {
    Json c = ToJson(o.action_class);
    c["stop_reason"] = StopReasonName(o.stop_reason);
    c["removed"] = o.removed.size();
    c["before"] = ToJson(o.before);
    c["after"] = ToJson(o.after);
    per_class.push_back(std::move(c));
  }
  j["per_class"] = std::move(per_class);
  return j;
}

Json ToJson(const MetricsReport& report) {
  Json j;
  j["avg_ndcg"] = report.avg_ndcg;
  j["avg_map"] = report.avg_map;
  j["t2v"] = DirectionJson(report.t2v);
  j["v2t"] = DirectionJson(report.v2t);
  return j;
}

Json ToJson(const SimConfig& c) {
  Json j;
  j["num_classes"] = c.num_classes;
  j["train_per_class"] = c.train_per_class;
  j["test_per_class"] = c.test_per_class;
  j["train_len_mean"] = c.train_len_mean;
  j["test_len_mean"] = c.test_len_mean;
  j["len_stddev"] = c.len_stddev;
  j["class_len_spread"] = c.class_len_spread;
  j["bias_strength"] = c.bias_strength;
  j["noise_stddev"] = c.noise_stddev;
  j["num_len_buckets"] = c.num_len_buckets;
  j["seed"] = c.seed;
  j["generator"] = kGeneratorName;
  return j;
}

Json ToJson(const SweepReport& report) {
  Json j;
  Json summary = Json::array();
  for (const AlphaSummary& s : report.alphas) {
    Json a;
    a["alpha"] = s.alpha;
    a["seeds_gt_rank_improved"] = s.seeds_gt_rank_improved;
    a["seeds_total"] = report.seeds.size();
    a["mean_gt_rank_before"] = s.mean_gt_rank_before;
    a["mean_gt_rank_after"] = s.mean_gt_rank_after;
    a["mean_topk_length_before"] = s.mean_topk_length_before;
    a["mean_topk_length_after"] = s.mean_topk_length_after;
    summary.push_back(std::move(a));
  }
  j["alpha_summary"] = std::move(summary);
  Json ablation;
  ablation["fraction"] = report.options.ablation_fraction;
  ablation["seeds_remove_long_lowers_topk"] =
      report.seeds_remove_long_lowers_topk;
  ablation["seeds_remove_short_raises_topk"] =
      report.seeds_remove_short_raises_topk;
  j["ablation_summary"] = std::move(ablation);

  Json seeds = Json::array();
  for (const SeedResult& r : report.seeds) {
    Json s;
    s["seed"] = r.seed;
    s["baseline"] = ConditionJson(r.baseline);
    Json filtered = Json::array();
    for (size_t a = 0; a < r.filtered.size(); ++a) {
      Json f = ConditionJson(r.filtered[a]);
      f["alpha"] = report.options.alphas[a];
      filtered.push_back(std::move(f));
    }
    s["filtered"] = std::move(filtered);
    const AblationResult& ab = r.ablation;
    Json abj = ToJson(ab.action_class);
    abj["baseline_train_mean"] = ab.baseline_train_mean;
    abj["long_removed_train_mean"] = ab.long_removed_train_mean;
    abj["short_removed_train_mean"] = ab.short_removed_train_mean;
    abj["baseline_topk_length"] = ab.baseline_topk_length;
    abj["long_removed_topk_length"] = ab.long_removed_topk_length;
    abj["short_removed_topk_length"] = ab.short_removed_topk_length;
    abj["baseline_mean_gt_rank"] = ab.baseline_mean_gt_rank;
    abj["long_removed_mean_gt_rank"] = ab.long_removed_mean_gt_rank;
    abj["short_removed_mean_gt_rank"] = ab.short_removed_mean_gt_rank;
    s["ablation"] = std::move(abj);
    seeds.push_back(std::move(s));
  }
  j["seeds"] = std::move(seeds);
  return j;
}

Json AuditPayload(const Dataset& dataset, int64_t min_count,
                  const LengthHistogram& histogram,
                  const std::optional<ActionClass>& histogram_class) {
  Json j;
  j["clip_count"] = dataset.size();
  j["class_count"] = dataset.index().size();
  try {
    j["global"] = ToJson(ComputeGlobalSummary(dataset));
  } catch (const Error&) {
    // One split is empty; the rest of the audit is still meaningful.
    j["global"] = nullptr;
  }
  Json stats = Json::array();
  for (const ClassStats& s : ComputeClassStats(dataset)) {
    stats.push_back(ToJson(s));
  }
  j["class_stats"] = std::move(stats);
  Json table = Json::array();
  for (const ClassStats& s : DiscrepancyTable(dataset, min_count)) {
    table.push_back(ToJson(s));
  }
  j["discrepancy_table"] = std::move(table);
  Json hist = ToJson(histogram);
  hist["class"] = histogram_class ? ToJson(*histogram_class) : Json("all");
  j["histogram"] = std::move(hist);
  return j;
}

Json MakeEnvelope(std::string_view command, Json config,
                  std::string_view payload_type, Json payload) {
  Json j;
  j["tool_version"] = kToolVersion;
  j["command"] = command;
  j["timestamp"] = UtcTimestamp();
  j["config"] = std::move(config);
  j["payload_type"] = payload_type;
  j["payload"] = std::move(payload);
  return j;
}

std::string UtcTimestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string RenderJson(const Json& value) {
  std::string out;
  Render(value, 0, out);
  out.push_back('\n');
  return out;
}

}  // namespace framebias
