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

// Acceptance suite: one PASS/FAIL/SKIP line per criterion, nonzero exit if
// any criterion fails.
//
//   acceptance_suite [--ek100-train PATH --ek100-test PATH]
//
// The real-annotation criterion also reads FRAMEBIAS_EK100_TRAIN and
// FRAMEBIAS_EK100_TEST; without them it is skipped.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "filter_properties.h"
#include "framebias/bias_audit.h"
#include "framebias/dataset.h"
#include "framebias/debias_filter.h"
#include "framebias/error.h"
#include "framebias/relevance_metrics.h"
#include "framebias/simulator.h"
#include "golden_cases.h"
#include "metric_cases.h"
#include "test_util.h"

namespace framebias {
namespace {

namespace fs = std::filesystem;

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status = Status::kFail;
  std::string detail;
};

Outcome Pass(std::string detail) { return {Status::kPass, std::move(detail)}; }
Outcome Fail(std::string detail) { return {Status::kFail, std::move(detail)}; }
Outcome Check(bool ok, std::string detail) {
  return {ok ? Status::kPass : Status::kFail, std::move(detail)};
}

std::string Fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string Fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// 1. Library metrics against the naive oracle.
Outcome MetricOracle() {
  std::mt19937_64 rng(20260101);
  double worst = 0;
  int cases = 0;
  for (; cases < 1000; ++cases) {
    // Every tenth case is full size.
    const testing::MetricCase c =
        testing::RandomMetricCase(rng, 64, cases % 10 == 0 ? 64 : 1);
    worst = std::max(worst, testing::MaxOracleDeviation(c));
  }
  return Check(worst <= 1e-9, Fmt("%d cases, max |library - oracle| = %.3g (tol 1e-9)",
                                   cases, worst));
}

// 2. Closed-form nDCG and AP values.
Outcome AnalyticCases() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> grade(0, 2);
  bool sorted_ok = true;
  for (int t = 0; t < 100; ++t) {
    const size_t n = 1 + t % 40;
    std::vector<double> rel(n), scores(n);
    for (double& r : rel) r = grade(rng) / 2.0;
    rel[0] = 1;
    std::sort(rel.begin(), rel.end(), std::greater<>());
    for (size_t i = 0; i < n; ++i) scores[i] = static_cast<double>(n - i);
    sorted_ok = sorted_ok && NdcgQuery(scores, rel) == 1.0;
  }
  const std::vector<double> three = {3, 2, 1};
  const double ndcg = NdcgQuery(three, std::vector<double>{0, 1, 0.5});
  const double ap = AveragePrecision(three, std::vector<double>{1, 0, 1}, 1.0);
  const bool ok = sorted_ok && std::abs(ndcg - 0.66968) <= 1e-5 &&
                  std::abs(ap - 0.833333) <= 1e-6;
  return Check(ok, Fmt("sorted ranking nDCG == 1: %s; [0,1,0.5] nDCG = %.8f "
                       "(0.66968 +- 1e-5); [1,0,1] AP = %.8f (0.833333 +- 1e-6)",
                       sorted_ok ? "yes" : "no", ndcg, ap));
}

bool SameMetrics(const MetricsReport& a, const MetricsReport& b) {
  auto same = [](const DirectionMetrics& x, const DirectionMetrics& y) {
    return x.ndcg.mean == y.ndcg.mean && x.map.mean == y.map.mean &&
           x.gt_ranks == y.gt_ranks && x.gt_ranks_optimistic == y.gt_ranks_optimistic &&
           x.gt_ranks_pessimistic == y.gt_ranks_pessimistic &&
           x.recall_at_1 == y.recall_at_1 && x.recall_at_5 == y.recall_at_5 &&
           x.recall_at_10 == y.recall_at_10 && x.mean_gt_rank == y.mean_gt_rank &&
           x.median_gt_rank == y.median_gt_rank;
  };
  return same(a.t2v, b.t2v) && same(a.v2t, b.v2t) && a.avg_ndcg == b.avg_ndcg &&
         a.avg_map == b.avg_map;
}

// 3. Strictly increasing score transforms change nothing.
Outcome RankInvariance() {
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<size_t> dim(2, 40);
  std::uniform_real_distribution<double> unit(0, 1);
  int mismatches = 0;
  const int cases = 100;
  for (int t = 0; t < cases; ++t) {
    const size_t n = dim(rng);
    const bool grid = t % 2 == 0;
    std::vector<double> s(n * n), r(n * n);
    for (size_t i = 0; i < n * n; ++i) {
      const double u = unit(rng);
      s[i] = grid ? std::floor(u * 8) / 4 - 1 : 4 * u - 2;
      const double g = unit(rng);
      r[i] = g < 0.6 ? 0 : (g < 0.8 ? 0.5 : 1);
    }
    for (size_t i = 0; i < n; ++i) r[i * n + i] = 1;
    const std::vector<std::string> ids = testing::Ids(n, "c");
    const RelevancyMatrix rel(ids, ids, r);
    const MetricsReport base = EvaluateRetrieval(SimilarityMatrix(ids, ids, s), rel, {});
    for (const std::function<double(double)>& f :
         {std::function<double(double)>([](double x) { return 2 * x + 1; }),
          std::function<double(double)>([](double x) { return std::tanh(x); })}) {
      std::vector<double> fs(s);
      for (double& x : fs) x = f(x);
      const SimilarityMatrix moved(ids, ids, fs);
      bool ranks_same = true;
      for (size_t q = 0; q < n; ++q) {
        ranks_same = ranks_same &&
                     RankGallery(moved.row(q)) ==
                         RankGallery(std::span<const double>(s.data() + q * n, n));
      }
      if (!ranks_same || !SameMetrics(base, EvaluateRetrieval(moved, rel, {}))) {
        ++mismatches;
      }
    }
  }
  return Check(mismatches == 0,
               Fmt("%d cases x {2x+1, tanh}: %d differ (tol exact)", cases, mismatches));
}

// 4. Filter invariants over randomized datasets.
Outcome FilterProperties() {
  testing::PropertyCounts counts;
  std::vector<std::string> notes;
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> alpha(0, 120);
  std::uniform_int_distribution<int64_t> floor(1, 20);
  const int trials = 50;
  for (int t = 0; t < trials; ++t) {
    const Dataset d = testing::RandomDataset(1000 + t, 200, 5, 100);
    double lo = alpha(rng), hi = alpha(rng);
    if (lo > hi) std::swap(lo, hi);
    testing::CheckFilterProperties(d, lo, hi, floor(rng), counts, notes);
  }
  std::string detail =
      Fmt("%d trials x 200 classes: split %d, floor %d, margin/reason %d, "
          "idempotence %d, alpha-monotone %d, strict decrease %d, bookkeeping %d",
          trials, counts.split_preservation, counts.size_floor, counts.margin_or_reason,
          counts.idempotence, counts.alpha_monotonicity, counts.strict_decrease,
          counts.bookkeeping);
  if (!notes.empty()) detail += "; first: " + notes.front();
  return Check(counts.total() == 0, detail);
}

// 5. Hand-checked filter fixtures.
Outcome FilterFixtures() {
  const FilterResult a =
      FilterMargin(testing::OneClass({10, 100, 400}, {100}), {20.0, 2});
  const FilterResult b =
      FilterMargin(testing::OneClass({50, 90, 130, 170, 310}, {100}), {15.0, 3});
  const bool ok_a = a.report.removed_clip_ids == std::vector<std::string>{"tr2"} &&
                    a.report.per_class[0].stop_reason == StopReason::kSizeFloor;
  const bool ok_b = b.report.removed_clip_ids == std::vector<std::string>{"tr4"} &&
                    b.report.per_class[0].stop_reason == StopReason::kWithinMargin &&
                    b.report.per_class[0].after.train_mean_len == 110.0;
  return Check(ok_a && ok_b,
               Fmt("{10,100,400} a=20 floor 2: removes 400, stops %s; "
                   "{50,90,130,170,310} a=15 floor 3: removes 310, stops %s",
                   std::string(StopReasonName(a.report.per_class[0].stop_reason)).c_str(),
                   std::string(StopReasonName(b.report.per_class[0].stop_reason)).c_str()));
}

SweepReport MechanismSweep(double lambda) {
  SimConfig config;
  config.num_classes = 40;
  config.train_per_class = 30;
  config.test_per_class = 10;
  config.test_len_mean = config.train_len_mean + 80;
  config.bias_strength = lambda;
  SweepOptions options;
  options.alphas = {20.0};
  options.min_class_size = 11;
  options.topk = 20;
  options.seeds.clear();
  for (uint64_t s = 1; s <= 20; ++s) options.seeds.push_back(s);
  return BiasSweep(config, options);
}

// 6. Filtering and the single-class ablation move metrics the expected way.
Outcome Mechanism() {
  const SweepReport r = MechanismSweep(0.6);
  const int64_t improved = r.alphas[0].seeds_gt_rank_improved;
  const int64_t lower = r.seeds_remove_long_lowers_topk;
  const int64_t higher = r.seeds_remove_short_raises_topk;
  return Check(improved >= 18 && lower >= 18 && higher >= 18,
               Fmt("lambda 0.6, 20 seeds: GT rank improved %lld/20 (%.2f -> %.2f); "
                   "remove_long lowers top-20 length %lld/20; remove_short raises "
                   "it %lld/20 (need >= 18 each)",
                   static_cast<long long>(improved), r.alphas[0].mean_gt_rank_before,
                   r.alphas[0].mean_gt_rank_after, static_cast<long long>(lower),
                   static_cast<long long>(higher)));
}

// 7. No leakage, no systematic gain.
Outcome NullControl() {
  const SweepReport r = MechanismSweep(0.0);
  const int64_t improved = r.alphas[0].seeds_gt_rank_improved;
  return Check(improved <= 14,
               Fmt("lambda 0, 20 seeds: GT rank improved %lld/20 (need <= 14)",
                   static_cast<long long>(improved)));
}

std::optional<std::string> Setting(int argc, char** argv, const std::string& flag,
                                   const char* env) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (argv[i] == flag) return argv[i + 1];
  }
  if (const char* v = std::getenv(env); v != nullptr && *v != '\0') return v;
  return std::nullopt;
}

// 8. Real annotations, when provided.
Outcome RealAnnotations(const std::optional<std::string>& train,
                        const std::optional<std::string>& test) {
  if (!train || !test) {
    return {Status::kSkip,
            "no EK-100 annotations given (--ek100-train/--ek100-test or "
            "FRAMEBIAS_EK100_TRAIN/FRAMEBIAS_EK100_TEST)"};
  }
  const Dataset d = LoadAnnotations({*train, *test}, AnnotationFormat::kEk100Pair);
  const GlobalLengthSummary g = ComputeGlobalSummary(d);
  const FilterResult f = FilterMargin(d, {60.0, 11});
  std::optional<ClassStats> mozzarella;
  for (const ClipRecord& c : d.clips()) {
    if (c.caption == "put down mozzarella") {
      const ActionClass cls = ClassOf(c);
      mozzarella = StatsForMembers(d, cls, *d.Members(cls));
      break;
    }
  }
  const bool direction = g.test_mean > g.train_mean;
  const bool removal = f.report.removed_count >= 1200 &&
                       f.report.removed_count <= 4800 &&
                       f.report.classes_touched >= 80;
  const bool table = mozzarella && mozzarella->train_count == 88 &&
                     std::abs(*mozzarella->train_mean_len - 198.06) <= 0.5 &&
                     mozzarella->test_mean_len &&
                     std::abs(*mozzarella->test_mean_len - 287.93) <= 0.5;
  std::string detail = Fmt(
      "test mean %.2f vs train mean %.2f; filter a=60 floor 11 removed %lld clips "
      "from %lld classes (need 1200..4800, >= 80)",
      g.test_mean, g.train_mean, static_cast<long long>(f.report.removed_count),
      static_cast<long long>(f.report.classes_touched));
  if (mozzarella) {
    detail += Fmt("; 'put down mozzarella' train %lld, means %.2f / %.2f",
                  static_cast<long long>(mozzarella->train_count),
                  mozzarella->train_mean_len.value_or(NAN),
                  mozzarella->test_mean_len.value_or(NAN));
  } else {
    detail += "; 'put down mozzarella' not found";
  }
  return Check(direction && removal && table, detail);
}

// 9. CLI outputs on the shipped fixtures.
Outcome Goldens() {
  const std::string root = FRAMEBIAS_TEST_DIR;
  const fs::path scratch =
      fs::temp_directory_path() / ("framebias_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(scratch);
  int files = 0, mismatched = 0;
  std::string first;
  for (const testing::GoldenCase& c : testing::GoldenCases()) {
    std::string diagnostics;
    const fs::path out = scratch / c.name;
    if (testing::RunGoldenCase(c, root + "/data", out.string(), diagnostics) != 0) {
      ++mismatched;
      if (first.empty()) first = c.name + ": " + diagnostics;
      continue;
    }
    for (const std::string& file : testing::CaseFiles(c)) {
      ++files;
      const fs::path golden = fs::path(root) / "golden" / c.name / file;
      if (!fs::exists(golden) ||
          testing::MaskTimestamp(testing::Slurp(out / file)) !=
              testing::MaskTimestamp(testing::Slurp(golden))) {
        ++mismatched;
        if (first.empty()) first = c.name + "/" + file;
      }
    }
  }
  // Filtered annotations parse back to the filter's output.
  const Dataset original =
      LoadAnnotations({root + "/data/tiny.csv"}, AnnotationFormat::kNative);
  const Dataset reparsed = LoadAnnotations(
      {(scratch / "filter" / "filtered.csv").string()}, AnnotationFormat::kNative);
  const bool round_trip = reparsed == FilterMargin(original, {20.0, 2}).filtered;
  fs::remove_all(scratch);
  std::string detail = Fmt("%zu commands, %d files, %d mismatched; filtered "
                           "annotations round-trip: %s",
                           testing::GoldenCases().size(), files, mismatched,
                           round_trip ? "yes" : "no");
  if (!first.empty()) detail += "; first: " + first;
  return Check(mismatched == 0 && round_trip, detail);
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0 = none
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace framebias

int main(int argc, char** argv) {
  using namespace framebias;
  const auto train = Setting(argc, argv, "--ek100-train", "FRAMEBIAS_EK100_TRAIN");
  const auto test = Setting(argc, argv, "--ek100-test", "FRAMEBIAS_EK100_TEST");
  const std::vector<Criterion> criteria = {
      {1, "metric oracle equivalence", 60, MetricOracle},
      {2, "nDCG/AP analytic cases", 0, AnalyticCases},
      {3, "rank-metric invariance", 0, RankInvariance},
      {4, "filter property suite", 120, FilterProperties},
      {5, "filter fixtures", 0, FilterFixtures},
      {6, "mechanism reproduction", 300, Mechanism},
      {7, "null control", 0, NullControl},
      {8, "real annotations", 0, [&] { return RealAnnotations(train, test); }},
      {9, "CLI golden files", 0, Goldens},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = Fail(std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.status != Status::kSkip && c.budget_seconds > 0 && seconds > c.budget_seconds) {
      o.status = Status::kFail;
      o.detail += Fmt("; over the %.0f s budget", c.budget_seconds);
    }
    const char* tag = o.status == Status::kPass   ? "PASS"
                      : o.status == Status::kSkip ? "SKIP"
                                                  : "FAIL";
    std::printf("[%s] %d %s: %s (%.2f s)\n", tag, c.id, c.name, o.detail.c_str(), seconds);
    std::fflush(stdout);
    if (o.status == Status::kFail) ++failed;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
