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

// Train-set filters that shrink the per-class frame-length gap between the
// train and test splits.

#ifndef FRAMEBIAS_DEBIAS_FILTER_H_
#define FRAMEBIAS_DEBIAS_FILTER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "framebias/bias_audit.h"
#include "framebias/dataset.h"

namespace framebias {

struct FilterConfig {
  // Target margin on |train mean - test mean|, in frames.
  double alpha = 60.0;
  // A class never drops below this many train clips ("more than ten").
  int64_t min_class_size = 11;
};

// Throws kPrecondition when alpha < 0 or min_class_size < 1.
void ValidateFilterConfig(const FilterConfig& config);

enum class StopReason {
  kWithinMargin,
  kSizeFloor,
  kNoImprovement,
  kSkippedNoTest,
  kSkippedNoTrain,
  // Single-class removal took its requested share of clips.
  kFractionRemoved,
};

std::string_view StopReasonName(StopReason reason);

struct ClassFilterOutcome {
  ActionClass action_class;
  ClassStats before;
  ClassStats after;
  StopReason stop_reason = StopReason::kWithinMargin;
  // Ids removed from this class, in removal order.
  std::vector<std::string> removed;
};

struct FilterReport {
  // Removal order: ActionClass order, then within-class removal order.
  std::vector<std::string> removed_clip_ids;
  std::vector<ClassFilterOutcome> per_class;
  int64_t removed_count = 0;
  int64_t classes_touched = 0;
  double removed_fraction = 0;  // of all clips, both splits
};

struct FilterResult {
  Dataset filtered;
  FilterReport report;
};

// Greedy mean-matching filter. For every class with clips in both splits the
// train clip whose removal brings the train mean closest to the class's test
// mean is removed, one at a time, until the gap is within alpha, the floor
// would be breached, or no removal strictly reduces the gap. Ties prefer the
// clip farther from the target, then the smaller clip id. Gap comparisons
// are exact (integer arithmetic on frame sums).
FilterResult FilterMargin(const Dataset& dataset, const FilterConfig& config);

enum class RemovalMode { kRemoveLong, kRemoveShort };

// Removes ceil(fraction * train_count) of the class's longest (or shortest)
// train clips; ties remove the smaller clip id first. Throws kNotFound for an
// unknown class and kPrecondition for fraction outside (0, 1) or a class with
// fewer than two train clips.
FilterResult FilterSingleClass(const Dataset& dataset,
                               const ActionClass& action_class,
                               RemovalMode mode, double fraction);

// Number of clips FilterSingleClass removes from a class of `train_count`.
int64_t SingleClassRemovalCount(int64_t train_count, double fraction);

}  // namespace framebias

#endif  // FRAMEBIAS_DEBIAS_FILTER_H_
