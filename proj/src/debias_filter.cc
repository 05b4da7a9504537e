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

#include "framebias/debias_filter.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "framebias/error.h"

namespace framebias {
namespace {

using Wide = __int128;

Wide Abs(Wide v) { return v < 0 ? -v : v; }

int64_t SumLengths(const Dataset& dataset, const std::vector<size_t>& pos) {
  int64_t total = 0;
  for (size_t p : pos) total += FrameLength(dataset.clips()[p]);
  return total;
}

// Same double arithmetic as ClassStats so reports and the stopping rule agree.
bool WithinMargin(int64_t train_sum, size_t train_n, int64_t test_sum,
                  size_t test_n, double alpha) {
  const double train_mean =
      static_cast<double>(train_sum) / static_cast<double>(train_n);
  const double test_mean =
      static_cast<double>(test_sum) / static_cast<double>(test_n);
  return std::abs(train_mean - test_mean) <= alpha;
}

struct GreedyOutcome {
  std::vector<size_t> removed;  // dataset positions, removal order
  StopReason reason;
};

// Target mean is test_sum / test_n. Every gap below is scaled by a common
// positive factor so candidates compare as exact integers.
GreedyOutcome GreedyMeanMatch(const Dataset& dataset,
                              std::vector<size_t> train, int64_t test_sum,
                              size_t test_n, const FilterConfig& config) {
  GreedyOutcome out;
  const Wide m = static_cast<Wide>(test_n);
  const Wide t = test_sum;
  int64_t sum = SumLengths(dataset, train);

  while (true) {
    const size_t n = train.size();
    if (WithinMargin(sum, n, test_sum, test_n, config.alpha)) {
      out.reason = StopReason::kWithinMargin;
      return out;
    }
    if (static_cast<int64_t>(n) - 1 < config.min_class_size) {
      out.reason = StopReason::kSizeFloor;
      return out;
    }
    // |mean_after - target| * (n - 1) * m for each candidate.
    size_t best = 0;
    Wide best_gap = -1;
    Wide best_spread = 0;
    for (size_t i = 0; i < n; ++i) {
      const ClipRecord& clip = dataset.clips()[train[i]];
      const int64_t len = FrameLength(clip);
      const Wide gap =
          Abs(m * (static_cast<Wide>(sum) - len) - t * static_cast<Wide>(n - 1));
      const Wide spread = Abs(m * len - t);
      bool better = best_gap < 0 || gap < best_gap;
      if (!better && gap == best_gap) {
        if (spread != best_spread) {
          better = spread > best_spread;
        } else {
          better = clip.clip_id < dataset.clips()[train[best]].clip_id;
        }
      }
      if (better) {
        best = i;
        best_gap = gap;
        best_spread = spread;
      }
    }
    // Strict decrease: gap_after / ((n-1) m) < gap_now / (n m).
    const Wide gap_now = Abs(m * static_cast<Wide>(sum) - t * static_cast<Wide>(n));
    if (best_gap * static_cast<Wide>(n) >=
        gap_now * static_cast<Wide>(n - 1)) {
      out.reason = StopReason::kNoImprovement;
      return out;
    }
    sum -= FrameLength(dataset.clips()[train[best]]);
    out.removed.push_back(train[best]);
    train.erase(train.begin() + static_cast<std::ptrdiff_t>(best));
  }
}

// Drops `removed` positions, keeping survivors in their original order.
Dataset WithoutPositions(const Dataset& dataset,
                         const std::unordered_set<size_t>& removed) {
  std::vector<ClipRecord> kept;
  kept.reserve(dataset.size() - removed.size());
  for (size_t i = 0; i < dataset.size(); ++i) {
    if (!removed.contains(i)) kept.push_back(dataset.clips()[i]);
  }
  return Dataset(std::move(kept));
}

ClassStats StatsAfter(const Dataset& dataset, const ActionClass& action_class,
                      const ClassMembers& members,
                      const std::unordered_set<size_t>& removed) {
  ClassMembers remaining;
  remaining.test = members.test;
  for (size_t p : members.train) {
    if (!removed.contains(p)) remaining.train.push_back(p);
  }
  return StatsForMembers(dataset, action_class, remaining);
}

void FinishReport(const Dataset& dataset, FilterReport& report) {
  report.removed_count = static_cast<int64_t>(report.removed_clip_ids.size());
  report.classes_touched = 0;
  for (const ClassFilterOutcome& outcome : report.per_class) {
    if (!outcome.removed.empty()) ++report.classes_touched;
  }
  report.removed_fraction =
      dataset.empty() ? 0.0
                      : static_cast<double>(report.removed_count) /
                            static_cast<double>(dataset.size());
}

}  // namespace

void ValidateFilterConfig(const FilterConfig& config) {
  if (!(config.alpha >= 0.0)) {
    Fail(ErrorCode::kPrecondition, "alpha must be >= 0");
  }
  if (config.min_class_size < 1) {
    Fail(ErrorCode::kPrecondition, "min_class_size must be >= 1");
  }
}

std::string_view StopReasonName(StopReason reason) {
  switch (reason) {
    case StopReason::kWithinMargin:
      return "within_margin";
    case StopReason::kSizeFloor:
      return "size_floor";
    case StopReason::kNoImprovement:
      return "no_improvement";
    case StopReason::kSkippedNoTest:
      return "skipped_no_test";
    case StopReason::kSkippedNoTrain:
      return "skipped_no_train";
    case StopReason::kFractionRemoved:
      return "fraction_removed";
  }
  return "unknown";
}

FilterResult FilterMargin(const Dataset& dataset, const FilterConfig& config) {
  ValidateFilterConfig(config);
  FilterReport report;
  std::unordered_set<size_t> removed;

  for (const auto& [action_class, members] : dataset.index()) {
    ClassFilterOutcome outcome;
    outcome.action_class = action_class;
    outcome.before = StatsForMembers(dataset, action_class, members);
    if (members.test.empty()) {
      outcome.stop_reason = StopReason::kSkippedNoTest;
    } else if (members.train.empty()) {
      outcome.stop_reason = StopReason::kSkippedNoTrain;
    } else {
      GreedyOutcome greedy =
          GreedyMeanMatch(dataset, members.train,
                          SumLengths(dataset, members.test),
                          members.test.size(), config);
      outcome.stop_reason = greedy.reason;
      for (size_t p : greedy.removed) {
        removed.insert(p);
        outcome.removed.push_back(dataset.clips()[p].clip_id);
        report.removed_clip_ids.push_back(dataset.clips()[p].clip_id);
      }
    }
    outcome.after = StatsAfter(dataset, action_class, members, removed);
    report.per_class.push_back(std::move(outcome));
  }
  FinishReport(dataset, report);
  return {WithoutPositions(dataset, removed), std::move(report)};
}

int64_t SingleClassRemovalCount(int64_t train_count, double fraction) {
  // The slack absorbs representation error, e.g. (31.0 / 88) * 88.
  const auto k = static_cast<int64_t>(
      std::ceil(fraction * static_cast<double>(train_count) - 1e-9));
  return std::clamp<int64_t>(k, 1, train_count);
}

FilterResult FilterSingleClass(const Dataset& dataset,
                               const ActionClass& action_class,
                               RemovalMode mode, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    Fail(ErrorCode::kPrecondition, "fraction must lie in (0, 1)");
  }
  const ClassMembers* members = dataset.Members(action_class);
  if (members == nullptr) {
    Fail(ErrorCode::kNotFound,
         "action class " + ToString(action_class) + " is not in the dataset");
  }
  if (members->train.size() < 2) {
    Fail(ErrorCode::kPrecondition, "action class " + ToString(action_class) +
                                       " has fewer than two train clips");
  }

  std::vector<size_t> order = members->train;
  const auto& clips = dataset.clips();
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const int64_t la = FrameLength(clips[a]);
    const int64_t lb = FrameLength(clips[b]);
    if (la != lb) return mode == RemovalMode::kRemoveLong ? la > lb : la < lb;
    return clips[a].clip_id < clips[b].clip_id;
  });
  const int64_t k = SingleClassRemovalCount(
      static_cast<int64_t>(order.size()), fraction);

  FilterReport report;
  std::unordered_set<size_t> removed;
  ClassFilterOutcome outcome;
  outcome.action_class = action_class;
  outcome.before = StatsForMembers(dataset, action_class, *members);
  outcome.stop_reason = StopReason::kFractionRemoved;
  for (int64_t i = 0; i < k; ++i) {
    removed.insert(order[i]);
    outcome.removed.push_back(clips[order[i]].clip_id);
    report.removed_clip_ids.push_back(clips[order[i]].clip_id);
  }
  outcome.after = StatsAfter(dataset, action_class, *members, removed);
  report.per_class.push_back(std::move(outcome));
  FinishReport(dataset, report);
  return {WithoutPositions(dataset, removed), std::move(report)};
}

}  // namespace framebias
