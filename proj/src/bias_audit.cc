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

#include "framebias/bias_audit.h"

#include <algorithm>
#include <cmath>

#include "framebias/error.h"

namespace framebias {
namespace {

// Integer sums keep the means independent of summation order.
std::optional<double> MeanLength(const Dataset& dataset,
                                 const std::vector<size_t>& positions) {
  if (positions.empty()) return std::nullopt;
  int64_t total = 0;
  for (size_t pos : positions) total += FrameLength(dataset.clips()[pos]);
  return static_cast<double>(total) / static_cast<double>(positions.size());
}

}  // namespace

ClassStats StatsForMembers(const Dataset& dataset,
                           const ActionClass& action_class,
                           const ClassMembers& members) {
  ClassStats stats;
  stats.action_class = action_class;
  stats.train_count = static_cast<int64_t>(members.train.size());
  stats.test_count = static_cast<int64_t>(members.test.size());
  stats.train_mean_len = MeanLength(dataset, members.train);
  stats.test_mean_len = MeanLength(dataset, members.test);
  if (stats.train_mean_len && stats.test_mean_len) {
    stats.discrepancy = std::abs(*stats.train_mean_len - *stats.test_mean_len);
  }
  return stats;
}

std::vector<ClassStats> ComputeClassStats(const Dataset& dataset) {
  std::vector<ClassStats> out;
  out.reserve(dataset.index().size());
  for (const auto& [action_class, members] : dataset.index()) {
    out.push_back(StatsForMembers(dataset, action_class, members));
  }
  return out;
}

LengthHistogram ComputeLengthHistogram(
    const Dataset& dataset, const std::optional<ActionClass>& action_class,
    int64_t bin_width) {
  if (bin_width <= 0) {
    Fail(ErrorCode::kPrecondition, "bin_width must be positive");
  }
  if (action_class && dataset.Members(*action_class) == nullptr) {
    Fail(ErrorCode::kNotFound,
         "action class " + ToString(*action_class) + " is not in the dataset");
  }

  LengthHistogram histogram;
  histogram.bin_width = bin_width;
  auto tally = [&](const ClipRecord& clip) {
    const auto bin = static_cast<size_t>(FrameLength(clip) / bin_width);
    while (histogram.bins.size() <= bin) {
      histogram.bins.push_back(
          {static_cast<int64_t>(histogram.bins.size()) * bin_width, 0, 0});
    }
    ++(clip.split == Split::kTrain ? histogram.bins[bin].train_count
                                   : histogram.bins[bin].test_count);
  };

  if (action_class) {
    const ClassMembers& members = *dataset.Members(*action_class);
    for (size_t pos : members.train) tally(dataset.clips()[pos]);
    for (size_t pos : members.test) tally(dataset.clips()[pos]);
  } else {
    for (const ClipRecord& clip : dataset.clips()) tally(clip);
  }
  return histogram;
}

std::string HistogramToCsv(const LengthHistogram& histogram) {
  std::string out = "bin_start,train_count,test_count\n";
  for (const HistogramBin& bin : histogram.bins) {
    out += std::to_string(bin.bin_start) + "," +
           std::to_string(bin.train_count) + "," +
           std::to_string(bin.test_count) + "\n";
  }
  return out;
}

GlobalLengthSummary ComputeGlobalSummary(const Dataset& dataset) {
  int64_t sums[2] = {0, 0};
  int64_t counts[2] = {0, 0};
  for (const ClipRecord& clip : dataset.clips()) {
    const int s = clip.split == Split::kTrain ? 0 : 1;
    sums[s] += FrameLength(clip);
    ++counts[s];
  }
  if (counts[0] == 0 || counts[1] == 0) {
    Fail(ErrorCode::kDegenerate,
         "global length summary needs clips in both train and test splits");
  }
  return {static_cast<double>(sums[0]) / static_cast<double>(counts[0]),
          static_cast<double>(sums[1]) / static_cast<double>(counts[1]),
          counts[0], counts[1]};
}

std::vector<ClassStats> DiscrepancyTable(const Dataset& dataset,
                                         int64_t min_count) {
  std::vector<ClassStats> table;
  for (ClassStats& stats : ComputeClassStats(dataset)) {
    if (stats.train_count >= min_count && stats.test_count >= 1 &&
        stats.discrepancy) {
      table.push_back(std::move(stats));
    }
  }
  // Input is already in ActionClass order, so a stable sort settles ties.
  std::stable_sort(table.begin(), table.end(),
                   [](const ClassStats& a, const ClassStats& b) {
                     return *a.discrepancy > *b.discrepancy;
                   });
  return table;
}

}  // namespace framebias
