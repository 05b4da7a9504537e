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

// Ranking metrics over similarity matrices with graded (verb/noun) relevance.
//
// All rankings order the gallery by descending score; equal scores keep
// ascending gallery index. Averages are accumulated in ascending query order.

#ifndef FRAMEBIAS_RELEVANCE_METRICS_H_
#define FRAMEBIAS_RELEVANCE_METRICS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "framebias/dataset.h"
#include "framebias/matrix.h"

namespace framebias {

// Relevance between two classes: 0.5 * (verb match + noun match).
inline double ClassRelevance(const ActionClass& a, const ActionClass& b) {
  return 0.5 * ((a.verb == b.verb ? 1.0 : 0.0) + (a.noun == b.noun ? 1.0 : 0.0));
}

// Row/column ids are the stringified positions ("0", "1", ...). Throws
// kPrecondition on an empty list.
RelevancyMatrix BuildRelevancy(std::span<const ActionClass> queries,
                               std::span<const ActionClass> gallery);

// Same construction with ids taken from `sim` and classes looked up in
// `dataset`. Throws kNotFound naming the first id missing from the dataset.
RelevancyMatrix BuildRelevancyFor(const SimilarityMatrix& sim,
                                  const Dataset& dataset);

// Gallery indices, best first.
std::vector<size_t> RankGallery(std::span<const double> scores);

struct GtRanks {
  int64_t standard = 0;     // ties broken by ascending gallery index
  int64_t optimistic = 0;   // GT placed before every tied item
  int64_t pessimistic = 0;  // GT placed after every tied item
};

GtRanks GtRankAt(std::span<const double> scores, size_t gt_index);

// 1-based rank of `gt_gallery_id` for the given query row. Throws kNotFound
// for an id missing from the columns.
int64_t GtRank(const SimilarityMatrix& sim, size_t query_index,
               std::string_view gt_gallery_id);

// Fraction of ranks <= k. Throws kPrecondition for k < 1 or empty input.
double RecallAtK(std::span<const int64_t> ranks, int64_t k);

// DCG with discount 1/log2(i + 1) over the first `depth` ranks (all when
// unset), normalized by the ideal ordering. Throws kDegenerate when every
// relevance is zero and kShape on a length mismatch.
double NdcgQuery(std::span<const double> scores,
                 std::span<const double> relevance,
                 std::optional<int64_t> depth = std::nullopt);

// Relevance is binarized as rel >= threshold. Throws kDegenerate when no item
// is relevant.
double AveragePrecision(std::span<const double> scores,
                        std::span<const double> relevance, double threshold);

enum class Direction { kT2V, kV2T, kAvg };

std::string_view DirectionName(Direction direction);

struct QueryAverage {
  double mean = 0;
  int64_t evaluated = 0;   // non-degenerate queries
  int64_t degenerate = 0;  // skipped: nothing relevant
};

// Mean over non-degenerate queries; kV2T works on the transposed matrices and
// kAvg is the mean of the two directions (counts summed). Throws kShape when
// the matrices disagree in dimensions and kDegenerate when a direction has no
// usable query.
QueryAverage NdcgAverage(const SimilarityMatrix& sim,
                         const RelevancyMatrix& rel, Direction direction,
                         std::optional<int64_t> depth = std::nullopt);
QueryAverage MapAverage(const SimilarityMatrix& sim,
                        const RelevancyMatrix& rel, double threshold,
                        Direction direction);

// Mean frame length of the top-k gallery clips for one query. Throws
// kNotFound for a gallery id missing from the dataset and kPrecondition for k
// outside [1, cols].
double TopKAvgLength(const SimilarityMatrix& sim, const Dataset& dataset,
                     size_t query_index, int64_t k);

struct InspectRow {
  int64_t rank = 0;
  std::string gallery_id;
  double score = 0;
  std::string caption;
  int64_t frame_length = 0;
  double relevance = 0;
  bool is_ground_truth = false;  // gallery id equals the query id
};

// Top-k listing for a query (k clamped to the gallery size). Relevance is
// measured against the query clip's class.
std::vector<InspectRow> InspectQuery(const SimilarityMatrix& sim,
                                     const Dataset& dataset,
                                     std::string_view query_id, int64_t k);

struct DirectionMetrics {
  QueryAverage ndcg;
  QueryAverage map;
  // Queries whose id also labels a gallery item, in row order.
  std::vector<std::string> gt_query_ids;
  std::vector<int64_t> gt_ranks;
  std::vector<int64_t> gt_ranks_optimistic;
  std::vector<int64_t> gt_ranks_pessimistic;
  // Empty when no query has a ground-truth item.
  std::optional<double> recall_at_1, recall_at_5, recall_at_10;
  std::optional<double> mean_gt_rank;
  std::optional<double> median_gt_rank;
};

struct MetricsOptions {
  double map_threshold = 1.0;
  std::optional<int64_t> ndcg_depth;
};

struct MetricsReport {
  DirectionMetrics t2v;
  DirectionMetrics v2t;
  double avg_ndcg = 0;
  double avg_map = 0;
};

// Ground truth for a query is the gallery item carrying the same id.
DirectionMetrics EvaluateDirection(const SimilarityMatrix& sim,
                                   const RelevancyMatrix& rel,
                                   const MetricsOptions& options);

MetricsReport EvaluateRetrieval(const SimilarityMatrix& sim,
                                const RelevancyMatrix& rel,
                                const MetricsOptions& options);

}  // namespace framebias

#endif  // FRAMEBIAS_RELEVANCE_METRICS_H_
