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

#include "framebias/simulator.h"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "framebias/bias_audit.h"
#include "framebias/error.h"
#include "framebias/relevance_metrics.h"
#include "test_util.h"

namespace framebias {
namespace {

using testing::Clip;

SimConfig Small() {
  SimConfig c;
  c.num_classes = 6;
  c.train_per_class = 8;
  c.test_per_class = 3;
  return c;
}

TEST(SimConfigTest, Validation) {
  SimConfig c = Small();
  c.bias_strength = 1.5;
  EXPECT_THROW(ValidateSimConfig(c), Error);
  c = Small();
  c.num_len_buckets = 0;
  EXPECT_THROW(ValidateSimConfig(c), Error);
  c = Small();
  c.len_stddev = -1;
  EXPECT_THROW(SynthDataset(c), Error);
}

TEST(SamplerTest, UniformRangeAndNormalMoments) {
  NormalSampler s(42, 1);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double z = s.Normal(3.0, 2.0);
    sum += z;
    sq += (z - 3.0) * (z - 3.0);
  }
  EXPECT_NEAR(sum / n, 3.0, 0.03);
  EXPECT_NEAR(std::sqrt(sq / n), 2.0, 0.03);
}

TEST(SamplerTest, StreamsDiffer) {
  NormalSampler a(7, 1), b(7, 2);
  EXPECT_NE(a.Uniform(), b.Uniform());
}

TEST(SimulatedClassTest, DistinctClasses) {
  std::set<ActionClass> seen;
  for (int64_t i = 0; i < 40; ++i) seen.insert(SimulatedClass(i, 40));
  EXPECT_EQ(seen.size(), 40u);
  EXPECT_EQ(SimulatedClass(9, 40), (ActionClass{2, 1}));  // 7 verbs
}

TEST(SynthDatasetTest, ZeroVarianceLengths) {
  SimConfig c = Small();
  c.len_stddev = 0;
  c.class_len_spread = 0;
  c.train_len_mean = 100;
  const Dataset d = SynthDataset(c);
  EXPECT_EQ(d.CountSplit(Split::kTrain), 48);
  for (const ClipRecord& clip : d.clips()) {
    if (clip.split == Split::kTrain) EXPECT_EQ(FrameLength(clip), 100);
  }
}

TEST(SynthDatasetTest, ClampsToOneFrame) {
  SimConfig c = Small();
  c.train_len_mean = -50;
  c.test_len_mean = -50;
  c.class_len_spread = 0;
  c.len_stddev = 1;
  for (const ClipRecord& clip : SynthDataset(c).clips()) {
    EXPECT_EQ(FrameLength(clip), 1);
  }
}

TEST(SynthDatasetTest, DeterministicPerSeed) {
  SimConfig c = Small();
  EXPECT_EQ(SynthDataset(c), SynthDataset(c));
  SimConfig other = c;
  other.seed = 2;
  EXPECT_FALSE(SynthDataset(c) == SynthDataset(other));
}

TEST(SynthDatasetTest, TestOffsetShowsInSummary) {
  SimConfig c;  // 40 classes, 30 + 10 per class
  c.test_len_mean = c.train_len_mean + 80;
  // Without per-clip variance only rounding remains.
  c.len_stddev = 0;
  GlobalLengthSummary g = ComputeGlobalSummary(SynthDataset(c));
  EXPECT_NEAR(g.test_mean - g.train_mean, 80.0, 2.0);
  // With it, one seed is off by a few frames of sampling error (about 3.5
  // at stddev 60); the mean over 20 seeds is within 2.
  c.len_stddev = 60;
  double total = 0;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    c.seed = seed;
    g = ComputeGlobalSummary(SynthDataset(c));
    EXPECT_NEAR(g.test_mean - g.train_mean, 80.0, 12.0) << seed;
    total += g.test_mean - g.train_mean;
  }
  EXPECT_NEAR(total / 20, 80.0, 2.0);
}

TEST(SynthSimilarityTest, IdsCoverTestSplit) {
  const SimOutput out = Simulate(Small());
  std::set<std::string> ids(out.sim_t2v.row_ids().begin(), out.sim_t2v.row_ids().end());
  EXPECT_EQ(ids.size(), 18u);
  for (const ClipRecord& clip : out.dataset.clips()) {
    EXPECT_EQ(ids.contains(clip.clip_id), clip.split == Split::kTest);
  }
  EXPECT_EQ(out.sim_t2v.col_ids(), out.sim_t2v.row_ids());
  EXPECT_TRUE(out.fallback_classes.empty());
}

TEST(SynthSimilarityTest, Deterministic) {
  EXPECT_EQ(Simulate(Small()).sim_t2v, Simulate(Small()).sim_t2v);
}

TEST(SynthSimilarityTest, PureClassSignalAtZeroLeakage) {
  SimConfig c = Small();
  c.bias_strength = 0;
  c.noise_stddev = 0;
  const SimOutput out = Simulate(c);
  const SimilarityMatrix& s = out.sim_t2v;
  for (size_t i = 0; i < s.rows(); ++i) {
    const ActionClass qi = ClassOf(out.dataset.Get(s.row_ids()[i]));
    for (size_t j = 0; j < s.cols(); ++j) {
      const bool same = ClassOf(out.dataset.Get(s.col_ids()[j])) == qi;
      EXPECT_EQ(s.at(i, j), same ? 1.0 : 0.0);
    }
    EXPECT_LE(GtRank(s, i, s.row_ids()[i]), c.test_per_class);
  }
}

TEST(SynthSimilarityTest, LengthOnlyAtFullLeakage) {
  // Class A trains short and tests long; class B the reverse. With two
  // buckets over [10, 100], A's caption lands in bucket 0 where B's test clip
  // sits, so the wrong-class clip beats A's ground truth.
  const Dataset d({Clip("a_tr", Split::kTrain, 10, 0, 0), Clip("a_te", Split::kTest, 100, 0, 0),
                   Clip("b_tr", Split::kTrain, 100, 1, 1), Clip("b_te", Split::kTest, 10, 1, 1)});
  SimConfig c;
  c.bias_strength = 1;
  c.noise_stddev = 0;
  c.num_len_buckets = 2;
  const SimilarityMatrix s = SynthSimilarityMatrix(d, c, d).sim;
  const size_t a = *s.FindRow("a_te"), b = *s.FindCol("b_te");
  EXPECT_EQ(s.at(a, b), 1.0);
  EXPECT_EQ(s.at(a, *s.FindCol("a_te")), 0.0);
  EXPECT_EQ(GtRank(s, a, "a_te"), 2);
}

TEST(SynthSimilarityTest, FallbackForClassesMissingFromReference) {
  const Dataset d({Clip("a_tr", Split::kTrain, 10, 0, 0), Clip("a_te", Split::kTest, 100, 0, 0),
                   Clip("b_te", Split::kTest, 10, 1, 1)});
  SimConfig c;
  const SynthSimilarity s = SynthSimilarityMatrix(d, c, d);
  EXPECT_EQ(s.fallback_classes, (std::vector<ActionClass>{{1, 1}}));
  const Dataset no_train({Clip("x", Split::kTest, 10, 0, 0)});
  EXPECT_THROW(SynthSimilarityMatrix(no_train, c, no_train), Error);
}

TEST(SynthSimilarityTest, BucketTermGrowsWithLeakage) {
  SimConfig c = Small();
  c.noise_stddev = 0;
  const Dataset d = SynthDataset(c);
  std::vector<double> previous;
  for (double lambda : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
    c.bias_strength = lambda;
    const SimilarityMatrix s = SynthSimilarityMatrix(d, c, d).sim;
    std::vector<double> bucket_term;
    for (size_t i = 0; i < s.rows(); ++i) {
      const ActionClass qi = ClassOf(d.Get(s.row_ids()[i]));
      for (size_t j = 0; j < s.cols(); ++j) {
        const double class_term =
            ClassOf(d.Get(s.col_ids()[j])) == qi ? (1 - lambda) * (1 - lambda) : 0.0;
        const double term = s.at(i, j) - class_term;
        // The bucket term is lambda^2 times a 0/1 match.
        const double match = term / (lambda * lambda);
        EXPECT_NEAR(match, std::round(match), 1e-9);
        bucket_term.push_back(term);
      }
    }
    if (!previous.empty()) {
      for (size_t k = 0; k < previous.size(); ++k) {
        EXPECT_GE(bucket_term[k], previous[k] - 1e-12);
      }
    }
    previous = bucket_term;
  }
}

double Pearson(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

TEST(MechanismTest, TopKLengthTracksClassTrainMean) {
  SimConfig c;
  c.num_classes = 20;
  double total = 0;
  const int seeds = 10;
  for (int seed = 1; seed <= seeds; ++seed) {
    c.seed = seed;
    const SimOutput out = Simulate(c);
    const auto stats = ComputeClassStats(out.dataset);
    std::map<ActionClass, double> train_mean;
    for (const ClassStats& s : stats) train_mean[s.action_class] = *s.train_mean_len;
    std::vector<double> topk, mean;
    for (size_t q = 0; q < out.sim_t2v.rows(); ++q) {
      topk.push_back(TopKAvgLength(out.sim_t2v, out.dataset, q, 20));
      mean.push_back(train_mean[ClassOf(out.dataset.Get(out.sim_t2v.row_ids()[q]))]);
    }
    total += Pearson(topk, mean);
  }
  EXPECT_GT(total / seeds, 0.0);
}

TEST(SweepTest, NullLeakageChangesNothing) {
  SimConfig c = Small();
  c.bias_strength = 0;
  SweepOptions o;
  o.seeds = {1, 2, 3};
  o.min_class_size = 3;
  const SweepReport r = BiasSweep(c, o);
  ASSERT_EQ(r.alphas.size(), 1u);
  EXPECT_EQ(r.alphas[0].seeds_gt_rank_improved, 0);
  for (const SeedResult& s : r.seeds) {
    EXPECT_EQ(s.filtered[0].mean_gt_rank, s.baseline.mean_gt_rank);
  }
}

TEST(SweepTest, ShapeAndDeterminism) {
  SweepOptions o;
  o.alphas = {10, 40};
  o.seeds = {4, 5};
  o.min_class_size = 3;
  const SweepReport a = BiasSweep(Small(), o);
  const SweepReport b = BiasSweep(Small(), o);
  ASSERT_EQ(a.seeds.size(), 2u);
  ASSERT_EQ(a.seeds[0].filtered.size(), 2u);
  for (size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(a.seeds[i].baseline.mean_gt_rank, b.seeds[i].baseline.mean_gt_rank);
    EXPECT_EQ(a.seeds[i].ablation.long_removed_topk_length,
              b.seeds[i].ablation.long_removed_topk_length);
    // Removing long clips cannot raise a class's train mean.
    EXPECT_LE(a.seeds[i].ablation.long_removed_train_mean,
              a.seeds[i].ablation.baseline_train_mean);
    EXPECT_GE(a.seeds[i].ablation.short_removed_train_mean,
              a.seeds[i].ablation.baseline_train_mean);
  }
  o.seeds.clear();
  EXPECT_THROW(BiasSweep(Small(), o), Error);
}

}  // namespace
}  // namespace framebias
