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

#include "framebias/relevance_metrics.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "framebias/error.h"

namespace framebias {
namespace {

void CheckSameLength(std::span<const double> scores,
                     std::span<const double> relevance) {
  if (scores.size() != relevance.size()) {
    Fail(ErrorCode::kShape, "score row has " + std::to_string(scores.size()) +
                                " items but relevance row has " +
                                std::to_string(relevance.size()));
  }
  if (scores.empty()) Fail(ErrorCode::kPrecondition, "empty gallery");
}

void CheckCompatible(const SimilarityMatrix& sim, const RelevancyMatrix& rel) {
  if (sim.rows() != rel.rows() || sim.cols() != rel.cols()) {
    Fail(ErrorCode::kShape,
         "similarity is " + std::to_string(sim.rows()) + " x " +
             std::to_string(sim.cols()) + " but relevancy is " +
             std::to_string(rel.rows()) + " x " + std::to_string(rel.cols()));
  }
}

bool AnyAtLeast(std::span<const double> values, double threshold) {
  return std::any_of(values.begin(), values.end(),
                     [&](double v) { return v >= threshold; });
}

using QueryScorer =
    std::function<double(std::span<const double>, std::span<const double>)>;

// Mean of `scorer` over queries whose relevance row reaches `min_relevance`.
QueryAverage AverageOneDirection(const SimilarityMatrix& sim,
                                 const RelevancyMatrix& rel,
                                 double min_relevance,
                                 const QueryScorer& scorer) {
  QueryAverage out;
  double total = 0;
  for (size_t q = 0; q < sim.rows(); ++q) {
    if (!AnyAtLeast(rel.row(q), min_relevance)) {
      ++out.degenerate;
      continue;
    }
    total += scorer(sim.row(q), rel.row(q));
    ++out.evaluated;
  }
  if (out.evaluated == 0) {
    Fail(ErrorCode::kDegenerate, "no query has a relevant gallery item");
  }
  out.mean = total / static_cast<double>(out.evaluated);
  return out;
}

QueryAverage AverageDirections(const SimilarityMatrix& sim,
                               const RelevancyMatrix& rel,
                               Direction direction, double min_relevance,
                               const QueryScorer& scorer) {
  CheckCompatible(sim, rel);
  switch (direction) {
    case Direction::kT2V:
      return AverageOneDirection(sim, rel, min_relevance, scorer);
    case Direction::kV2T:
      return AverageOneDirection(sim.Transposed(), rel.Transposed(),
                                 min_relevance, scorer);
    case Direction::kAvg: {
      const QueryAverage t2v =
          AverageOneDirection(sim, rel, min_relevance, scorer);
      const QueryAverage v2t = AverageOneDirection(
          sim.Transposed(), rel.Transposed(), min_relevance, scorer);
      return {(t2v.mean + v2t.mean) / 2.0, t2v.evaluated + v2t.evaluated,
              t2v.degenerate + v2t.degenerate};
    }
  }
  return {};
}

// For non-negative relevance, rel >= kPositive is exactly rel > 0.
constexpr double kPositive = std::numeric_limits<double>::denorm_min();

double Median(std::vector<int64_t> values) {
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  if (n % 2 == 1) return static_cast<double>(values[n / 2]);
  return (static_cast<double>(values[n / 2 - 1]) +
          static_cast<double>(values[n / 2])) /
         2.0;
}

}  // namespace

RelevancyMatrix BuildRelevancy(std::span<const ActionClass> queries,
                               std::span<const ActionClass> gallery) {
  if (queries.empty() || gallery.empty()) {
    Fail(ErrorCode::kPrecondition, "relevancy needs non-empty class lists");
  }
  std::vector<std::string> row_ids, col_ids;
  for (size_t i = 0; i < queries.size(); ++i) row_ids.push_back(std::to_string(i));
  for (size_t j = 0; j < gallery.size(); ++j) col_ids.push_back(std::to_string(j));
  std::vector<double> values;
  values.reserve(queries.size() * gallery.size());
  for (const ActionClass& q : queries) {
    for (const ActionClass& g : gallery) values.push_back(ClassRelevance(q, g));
  }
  return RelevancyMatrix(std::move(row_ids), std::move(col_ids),
                         std::move(values));
}

RelevancyMatrix BuildRelevancyFor(const SimilarityMatrix& sim,
                                  const Dataset& dataset) {
  auto classes = [&](const std::vector<std::string>& ids) {
    std::vector<ActionClass> out;
    out.reserve(ids.size());
    for (const std::string& id : ids) out.push_back(ClassOf(dataset.Get(id)));
    return out;
  };
  const std::vector<ActionClass> rows = classes(sim.row_ids());
  const std::vector<ActionClass> cols = classes(sim.col_ids());
  std::vector<double> values;
  values.reserve(rows.size() * cols.size());
  for (const ActionClass& q : rows) {
    for (const ActionClass& g : cols) values.push_back(ClassRelevance(q, g));
  }
  return RelevancyMatrix(sim.row_ids(), sim.col_ids(), std::move(values));
}

std::vector<size_t> RankGallery(std::span<const double> scores) {
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  return order;
}

GtRanks GtRankAt(std::span<const double> scores, size_t gt_index) {
  const double gt = scores[gt_index];
  int64_t above = 0, tied_before = 0, tied_after = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] > gt) {
      ++above;
    } else if (scores[i] == gt && i != gt_index) {
      ++(i < gt_index ? tied_before : tied_after);
    }
  }
  return {above + tied_before + 1, above + 1,
          above + tied_before + tied_after + 1};
}

int64_t GtRank(const SimilarityMatrix& sim, size_t query_index,
               std::string_view gt_gallery_id) {
  if (query_index >= sim.rows()) {
    Fail(ErrorCode::kNotFound,
         "query index " + std::to_string(query_index) + " is out of range");
  }
  const auto col = sim.FindCol(gt_gallery_id);
  if (!col) {
    Fail(ErrorCode::kNotFound,
         "gallery id '" + std::string(gt_gallery_id) + "' is not a column");
  }
  return GtRankAt(sim.row(query_index), *col).standard;
}

double RecallAtK(std::span<const int64_t> ranks, int64_t k) {
  if (k < 1) Fail(ErrorCode::kPrecondition, "recall cutoff k must be >= 1");
  if (ranks.empty()) Fail(ErrorCode::kPrecondition, "no ranks to score");
  const auto hits = std::count_if(ranks.begin(), ranks.end(),
                                  [&](int64_t r) { return r <= k; });
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double NdcgQuery(std::span<const double> scores,
                 std::span<const double> relevance,
                 std::optional<int64_t> depth) {
  CheckSameLength(scores, relevance);
  if (depth && *depth < 1) {
    Fail(ErrorCode::kPrecondition, "nDCG depth must be >= 1");
  }
  const size_t cutoff =
      depth ? std::min(scores.size(), static_cast<size_t>(*depth))
            : scores.size();

  std::vector<double> ideal(relevance.begin(), relevance.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = 0;
  for (size_t i = 0; i < cutoff; ++i) idcg += ideal[i] / std::log2(i + 2.0);
  if (!(idcg > 0)) {
    Fail(ErrorCode::kDegenerate, "query has no relevant gallery item");
  }

  const std::vector<size_t> order = RankGallery(scores);
  double dcg = 0;
  for (size_t i = 0; i < cutoff; ++i) {
    dcg += relevance[order[i]] / std::log2(i + 2.0);
  }
  return dcg / idcg;
}

double AveragePrecision(std::span<const double> scores,
                        std::span<const double> relevance, double threshold) {
  CheckSameLength(scores, relevance);
  const std::vector<size_t> order = RankGallery(scores);
  int64_t hits = 0;
  double sum = 0;
  for (size_t i = 0; i < order.size(); ++i) {
    if (relevance[order[i]] >= threshold) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  if (hits == 0) {
    Fail(ErrorCode::kDegenerate, "query has no relevant gallery item");
  }
  return sum / static_cast<double>(hits);
}

std::string_view DirectionName(Direction direction) {
  switch (direction) {
    case Direction::kT2V:
      return "t2v";
    case Direction::kV2T:
      return "v2t";
    case Direction::kAvg:
      return "avg";
  }
  return "unknown";
}

QueryAverage NdcgAverage(const SimilarityMatrix& sim,
                         const RelevancyMatrix& rel, Direction direction,
                         std::optional<int64_t> depth) {
  return AverageDirections(
      sim, rel, direction, kPositive,
      [&](std::span<const double> s, std::span<const double> r) {
        return NdcgQuery(s, r, depth);
      });
}

QueryAverage MapAverage(const SimilarityMatrix& sim,
                        const RelevancyMatrix& rel, double threshold,
                        Direction direction) {
  return AverageDirections(
      sim, rel, direction, threshold,
      [&](std::span<const double> s, std::span<const double> r) {
        return AveragePrecision(s, r, threshold);
      });
}

double TopKAvgLength(const SimilarityMatrix& sim, const Dataset& dataset,
                     size_t query_index, int64_t k) {
  if (query_index >= sim.rows()) {
    Fail(ErrorCode::kNotFound,
         "query index " + std::to_string(query_index) + " is out of range");
  }
  if (k < 1 || static_cast<size_t>(k) > sim.cols()) {
    Fail(ErrorCode::kPrecondition, "k must lie in [1, gallery size]");
  }
  const std::vector<size_t> order = RankGallery(sim.row(query_index));
  int64_t total = 0;
  for (int64_t i = 0; i < k; ++i) {
    total += FrameLength(dataset.Get(sim.col_ids()[order[i]]));
  }
  return static_cast<double>(total) / static_cast<double>(k);
}

std::vector<InspectRow> InspectQuery(const SimilarityMatrix& sim,
                                     const Dataset& dataset,
                                     std::string_view query_id, int64_t k) {
  const auto row = sim.FindRow(query_id);
  if (!row) {
    Fail(ErrorCode::kNotFound,
         "query id '" + std::string(query_id) + "' is not a matrix row");
  }
  if (k < 1) Fail(ErrorCode::kPrecondition, "top-k must be >= 1");
  const ActionClass query_class = ClassOf(dataset.Get(query_id));
  const std::vector<size_t> order = RankGallery(sim.row(*row));
  const size_t n = std::min(order.size(), static_cast<size_t>(k));

  std::vector<InspectRow> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const std::string& id = sim.col_ids()[order[i]];
    const ClipRecord& clip = dataset.Get(id);
    out.push_back({static_cast<int64_t>(i + 1), id, sim.at(*row, order[i]),
                   clip.caption, FrameLength(clip),
                   ClassRelevance(query_class, ClassOf(clip)),
                   id == query_id});
  }
  return out;
}

DirectionMetrics EvaluateDirection(const SimilarityMatrix& sim,
                                   const RelevancyMatrix& rel,
                                   const MetricsOptions& options) {
  DirectionMetrics out;
  out.ndcg = NdcgAverage(sim, rel, Direction::kT2V, options.ndcg_depth);
  out.map = MapAverage(sim, rel, options.map_threshold, Direction::kT2V);
  for (size_t q = 0; q < sim.rows(); ++q) {
    const auto gt = sim.FindCol(sim.row_ids()[q]);
    if (!gt) continue;
    const GtRanks ranks = GtRankAt(sim.row(q), *gt);
    out.gt_query_ids.push_back(sim.row_ids()[q]);
    out.gt_ranks.push_back(ranks.standard);
    out.gt_ranks_optimistic.push_back(ranks.optimistic);
    out.gt_ranks_pessimistic.push_back(ranks.pessimistic);
  }
  if (!out.gt_ranks.empty()) {
    out.recall_at_1 = RecallAtK(out.gt_ranks, 1);
    out.recall_at_5 = RecallAtK(out.gt_ranks, 5);
    out.recall_at_10 = RecallAtK(out.gt_ranks, 10);
    double total = 0;
    for (int64_t r : out.gt_ranks) total += static_cast<double>(r);
    out.mean_gt_rank = total / static_cast<double>(out.gt_ranks.size());
    out.median_gt_rank = Median(out.gt_ranks);
  }
  return out;
}

MetricsReport EvaluateRetrieval(const SimilarityMatrix& sim,
                                const RelevancyMatrix& rel,
                                const MetricsOptions& options) {
  CheckCompatible(sim, rel);
  MetricsReport report;
  report.t2v = EvaluateDirection(sim, rel, options);
  report.v2t = EvaluateDirection(sim.Transposed(), rel.Transposed(), options);
  report.avg_ndcg = (report.t2v.ndcg.mean + report.v2t.ndcg.mean) / 2.0;
  report.avg_map = (report.t2v.map.mean + report.v2t.map.mean) / 2.0;
  return report;
}

}  // namespace framebias
