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

// Train/test frame-length statistics per action class and globally.

#ifndef FRAMEBIAS_BIAS_AUDIT_H_
#define FRAMEBIAS_BIAS_AUDIT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "framebias/dataset.h"

namespace framebias {

inline constexpr int64_t kDefaultBinWidth = 30;

struct ClassStats {
  ActionClass action_class;
  int64_t train_count = 0;
  int64_t test_count = 0;
  std::optional<double> train_mean_len;  // empty when train_count == 0
  std::optional<double> test_mean_len;   // empty when test_count == 0
  std::optional<double> discrepancy;     // |train - test|, both present

  friend bool operator==(const ClassStats&, const ClassStats&) = default;
};

// Statistics for a subset of a class's clips, given as positions into
// `dataset.clips()`.
ClassStats StatsForMembers(const Dataset& dataset,
                           const ActionClass& action_class,
                           const ClassMembers& members);

// One entry per class present in the dataset, in ActionClass order.
std::vector<ClassStats> ComputeClassStats(const Dataset& dataset);

struct HistogramBin {
  int64_t bin_start = 0;
  int64_t train_count = 0;
  int64_t test_count = 0;

  friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

struct LengthHistogram {
  int64_t bin_width = kDefaultBinWidth;
  // Consecutive multiples of bin_width from 0; trailing empty bins trimmed.
  std::vector<HistogramBin> bins;
};

// `action_class` == nullopt tallies every clip. Throws kPrecondition for
// bin_width <= 0 and kNotFound for a class absent from the dataset.
LengthHistogram ComputeLengthHistogram(
    const Dataset& dataset, const std::optional<ActionClass>& action_class,
    int64_t bin_width = kDefaultBinWidth);

// "bin_start,train_count,test_count" with a header row.
std::string HistogramToCsv(const LengthHistogram& histogram);

struct GlobalLengthSummary {
  double train_mean = 0;
  double test_mean = 0;
  int64_t train_count = 0;
  int64_t test_count = 0;
};

// Throws kDegenerate if either split is empty.
GlobalLengthSummary ComputeGlobalSummary(const Dataset& dataset);

// Classes with train_count >= min_count and test_count >= 1, by discrepancy
// descending; ties keep ActionClass order.
std::vector<ClassStats> DiscrepancyTable(const Dataset& dataset,
                                         int64_t min_count);

}  // namespace framebias

#endif  // FRAMEBIAS_BIAS_AUDIT_H_
