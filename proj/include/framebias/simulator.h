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

// Synthetic clips and similarity matrices with a tunable frame-length
// leakage term.
//
// A test caption embeds as [(1-l) onehot(class), l onehot(bucket of its
// class's train-mean length)] and a test clip as [(1-l) onehot(class),
// l onehot(bucket of its own length)] plus Gaussian noise; the score is the
// dot product. With l > 0 a caption is pulled toward clips whose length
// resembles what its class looked like in training.

#ifndef FRAMEBIAS_SIMULATOR_H_
#define FRAMEBIAS_SIMULATOR_H_

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "framebias/dataset.h"
#include "framebias/debias_filter.h"
#include "framebias/matrix.h"

namespace framebias {

// Name of the generator stack, recorded with every simulated artifact.
inline constexpr std::string_view kGeneratorName =
    "mt19937_64 + splitmix64 seeding + Box-Muller normals";

struct SimConfig {
  int64_t num_classes = 40;
  int64_t train_per_class = 30;
  int64_t test_per_class = 10;
  double train_len_mean = 400;
  double test_len_mean = 480;
  double len_stddev = 60;
  // Half-width of a uniform per-class offset added to both split means, so
  // classes differ in typical length.
  double class_len_spread = 200;
  double bias_strength = 0.6;  // leakage weight, in [0, 1]
  double noise_stddev = 0.05;
  int64_t num_len_buckets = 24;
  uint64_t seed = 1;
};

// Throws kPrecondition on out-of-range fields.
void ValidateSimConfig(const SimConfig& config);

// mt19937_64 is fully specified by the standard and the Box-Muller transform
// is done here, so draws don't depend on the library's distributions.
class NormalSampler {
 public:
  NormalSampler(uint64_t seed, uint64_t stream);

  double Uniform();  // [0, 1), 53 bits
  double Normal(double mean, double stddev);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0;
};

// Class c maps to (verb c % V, noun c / V) with V = ceil(sqrt(num_classes)),
// so some class pairs share a verb or a noun.
ActionClass SimulatedClass(int64_t index, int64_t num_classes);

// Per class: train clips then test clips, lengths round(N(mean, stddev))
// clamped to >= 1.
Dataset SynthDataset(const SimConfig& config);

struct SynthSimilarity {
  SimilarityMatrix sim;  // test captions x test clips, ids = clip ids
  // Test classes missing from the reference's train split; their captions
  // use the global train mean instead.
  std::vector<ActionClass> fallback_classes;
};

// Scores the test split of `dataset` against itself. `train_reference`
// supplies per-class train means, so filtering it and re-scoring stands in for
// retraining. Throws kDegenerate when the reference has no train clips or the
// dataset has no test clips.
SynthSimilarity SynthSimilarityMatrix(const Dataset& dataset,
                                      const SimConfig& config,
                                      const Dataset& train_reference);

struct SimOutput {
  Dataset dataset;
  SimilarityMatrix sim_t2v;
  SimConfig config;
  std::vector<ActionClass> fallback_classes;
};

SimOutput Simulate(const SimConfig& config);

struct SweepOptions {
  std::vector<double> alphas = {20.0};
  std::vector<uint64_t> seeds = {1};
  int64_t min_class_size = 11;
  double ablation_fraction = 31.0 / 88.0;
  int64_t topk = 20;
};

struct ConditionMetrics {
  double mean_gt_rank = 0;
  double recall_at_10 = 0;
  double mean_topk_length = 0;  // over all test captions
  int64_t removed = 0;
  int64_t classes_touched = 0;
};

// Single-class removal on the class whose train mean is closest to the
// global train mean (a typical-length class). Top-k
// lengths are averaged over that class's captions only.
struct AblationResult {
  ActionClass action_class;
  double baseline_train_mean = 0;
  double long_removed_train_mean = 0;
  double short_removed_train_mean = 0;
  double baseline_topk_length = 0;
  double long_removed_topk_length = 0;
  double short_removed_topk_length = 0;
  double baseline_mean_gt_rank = 0;
  double long_removed_mean_gt_rank = 0;
  double short_removed_mean_gt_rank = 0;
};

struct SeedResult {
  uint64_t seed = 0;
  ConditionMetrics baseline;
  std::vector<ConditionMetrics> filtered;  // one per alpha
  AblationResult ablation;
};

struct AlphaSummary {
  double alpha = 0;
  int64_t seeds_gt_rank_improved = 0;  // strictly lower mean GT rank
  double mean_gt_rank_before = 0;
  double mean_gt_rank_after = 0;
  double mean_topk_length_before = 0;
  double mean_topk_length_after = 0;
};

struct SweepReport {
  SimConfig config;
  SweepOptions options;
  std::vector<SeedResult> seeds;
  std::vector<AlphaSummary> alphas;
  int64_t seeds_remove_long_lowers_topk = 0;
  int64_t seeds_remove_short_raises_topk = 0;
};

// Mean GT rank, recall@10 and mean top-k length with GT = same clip id.
ConditionMetrics ScoreCondition(const SimilarityMatrix& sim,
                                const Dataset& dataset, int64_t topk);

// For each seed: generate, score against the unfiltered train split, then
// filter at every alpha (and run the single-class ablation), re-score
// against the filtered train split and compare.
SweepReport BiasSweep(const SimConfig& config, const SweepOptions& options);

}  // namespace framebias

#endif  // FRAMEBIAS_SIMULATOR_H_
