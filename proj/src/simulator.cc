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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>

#include "framebias/bias_audit.h"
#include "framebias/error.h"
#include "framebias/relevance_metrics.h"

namespace framebias {
namespace {

constexpr uint64_t kLengthStream = 1;
constexpr uint64_t kNoiseStream = 2;

uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

int64_t DrawLength(NormalSampler& rng, double mean, double stddev) {
  const double v = std::round(rng.Normal(mean, stddev));
  return std::max<int64_t>(1, static_cast<int64_t>(v));
}

std::string ClipId(int64_t cls, Split split, int64_t i) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "c%04lld_%s_%03lld",
                static_cast<long long>(cls),
                split == Split::kTrain ? "tr" : "te",
                static_cast<long long>(i));
  return buf;
}

struct Buckets {
  int64_t lo = 0;
  int64_t hi = 0;
  int64_t count = 1;

  int64_t Of(double length) const {
    if (hi <= lo) return 0;
    const double pos = (length - static_cast<double>(lo)) *
                       static_cast<double>(count) /
                       static_cast<double>(hi - lo);
    return std::clamp<int64_t>(static_cast<int64_t>(std::floor(pos)), 0,
                               count - 1);
  }
};

double Mean(const std::vector<double>& v) {
  double total = 0;
  for (double x : v) total += x;
  return v.empty() ? 0.0 : total / static_cast<double>(v.size());
}

double ClassTopKLength(const SimilarityMatrix& sim, const Dataset& dataset,
                       const ActionClass& action_class, int64_t topk) {
  const int64_t k = std::min<int64_t>(topk, static_cast<int64_t>(sim.cols()));
  std::vector<double> lengths;
  for (size_t q = 0; q < sim.rows(); ++q) {
    if (ClassOf(dataset.Get(sim.row_ids()[q])) == action_class) {
      lengths.push_back(TopKAvgLength(sim, dataset, q, k));
    }
  }
  return Mean(lengths);
}

double ClassMeanGtRank(const SimilarityMatrix& sim, const Dataset& dataset,
                       const ActionClass& action_class) {
  std::vector<double> ranks;
  for (size_t q = 0; q < sim.rows(); ++q) {
    const std::string& id = sim.row_ids()[q];
    if (ClassOf(dataset.Get(id)) == action_class) {
      ranks.push_back(static_cast<double>(GtRank(sim, q, id)));
    }
  }
  return Mean(ranks);
}

double TrainMean(const Dataset& dataset, const ActionClass& action_class) {
  const ClassMembers* members = dataset.Members(action_class);
  return StatsForMembers(dataset, action_class, *members)
      .train_mean_len.value_or(0.0);
}

std::optional<ClassStats> TypicalClass(const Dataset& dataset) {
  const double global = ComputeGlobalSummary(dataset).train_mean;
  std::optional<ClassStats> best;
  for (const ClassStats& s : DiscrepancyTable(dataset, 2)) {
    if (!best || std::abs(*s.train_mean_len - global) <
                     std::abs(*best->train_mean_len - global)) {
      best = s;
    }
  }
  return best;
}

}  // namespace

void ValidateSimConfig(const SimConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) Fail(ErrorCode::kPrecondition, what);
  };
  require(c.num_classes >= 1, "num_classes must be >= 1");
  require(c.train_per_class >= 1, "train_per_class must be >= 1");
  require(c.test_per_class >= 1, "test_per_class must be >= 1");
  require(std::isfinite(c.train_len_mean) && std::isfinite(c.test_len_mean),
          "length means must be finite");
  require(c.len_stddev >= 0, "len_stddev must be >= 0");
  require(c.class_len_spread >= 0, "class_len_spread must be >= 0");
  require(c.bias_strength >= 0 && c.bias_strength <= 1,
          "bias strength must lie in [0, 1]");
  require(c.noise_stddev >= 0, "noise_stddev must be >= 0");
  require(c.num_len_buckets >= 1, "num_len_buckets must be >= 1");
}

NormalSampler::NormalSampler(uint64_t seed, uint64_t stream)
    : engine_(SplitMix64(seed ^ SplitMix64(stream))) {}

double NormalSampler::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double NormalSampler::Normal(double mean, double stddev) {
  if (has_spare_) {
    has_spare_ = false;
    return mean + stddev * spare_;
  }
  // Polar Box-Muller.
  double u, v, s;
  do {
    u = 2.0 * Uniform() - 1.0;
    v = 2.0 * Uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * scale;
  has_spare_ = true;
  return mean + stddev * u * scale;
}

ActionClass SimulatedClass(int64_t index, int64_t num_classes) {
  const auto verbs = static_cast<int64_t>(
      std::ceil(std::sqrt(static_cast<double>(num_classes))));
  return {static_cast<int>(index % verbs), static_cast<int>(index / verbs)};
}

Dataset SynthDataset(const SimConfig& config) {
  ValidateSimConfig(config);
  NormalSampler rng(config.seed, kLengthStream);
  std::vector<double> offsets;
  offsets.reserve(config.num_classes);
  for (int64_t c = 0; c < config.num_classes; ++c) {
    offsets.push_back(config.class_len_spread * (2.0 * rng.Uniform() - 1.0));
  }

  std::vector<ClipRecord> clips;
  clips.reserve(config.num_classes *
                (config.train_per_class + config.test_per_class));
  for (int64_t c = 0; c < config.num_classes; ++c) {
    const ActionClass cls = SimulatedClass(c, config.num_classes);
    const std::string caption =
        "verb" + std::to_string(cls.verb) + " noun" + std::to_string(cls.noun);
    int64_t cursor = 0;
    auto emit = [&](Split split, int64_t count, double mean) {
      for (int64_t i = 0; i < count; ++i) {
        const int64_t len = DrawLength(rng, mean + offsets[c], config.len_stddev);
        ClipRecord clip;
        clip.clip_id = ClipId(c, split, i);
        clip.video_id = "sim_video_" + std::to_string(c);
        clip.split = split;
        clip.start_frame = cursor;
        clip.stop_frame = cursor + len - 1;
        clip.caption = caption;
        clip.verb_class = cls.verb;
        clip.noun_class = cls.noun;
        cursor += len + 10;
        clips.push_back(std::move(clip));
      }
    };
    emit(Split::kTrain, config.train_per_class, config.train_len_mean);
    emit(Split::kTest, config.test_per_class, config.test_len_mean);
  }
  return Dataset(std::move(clips));
}

SynthSimilarity SynthSimilarityMatrix(const Dataset& dataset,
                                      const SimConfig& config,
                                      const Dataset& train_reference) {
  ValidateSimConfig(config);
  std::vector<size_t> tests;
  for (size_t i = 0; i < dataset.size(); ++i) {
    if (dataset.clips()[i].split == Split::kTest) tests.push_back(i);
  }
  if (tests.empty()) {
    Fail(ErrorCode::kDegenerate, "dataset has no test clips to score");
  }

  // Per-class train means from the reference, and the bucket range.
  std::map<ActionClass, double> train_means;
  int64_t train_total = 0, train_n = 0;
  Buckets buckets;
  buckets.count = config.num_len_buckets;
  buckets.lo = std::numeric_limits<int64_t>::max();
  buckets.hi = std::numeric_limits<int64_t>::min();
  auto widen = [&](int64_t len) {
    buckets.lo = std::min(buckets.lo, len);
    buckets.hi = std::max(buckets.hi, len);
  };
  for (const auto& [cls, members] : train_reference.index()) {
    if (members.train.empty()) continue;
    const ClassStats stats = StatsForMembers(train_reference, cls, members);
    train_means[cls] = *stats.train_mean_len;
    for (size_t p : members.train) {
      const int64_t len = FrameLength(train_reference.clips()[p]);
      train_total += len;
      ++train_n;
      widen(len);
    }
  }
  if (train_n == 0) {
    Fail(ErrorCode::kDegenerate, "train reference has no train clips");
  }
  for (size_t p : tests) widen(FrameLength(dataset.clips()[p]));
  const double global_train_mean =
      static_cast<double>(train_total) / static_cast<double>(train_n);

  // One-hot slot per class present in the dataset.
  std::map<ActionClass, size_t> class_slot;
  for (const auto& [cls, members] : dataset.index()) {
    class_slot.emplace(cls, class_slot.size());
  }
  const size_t num_class_slots = class_slot.size();
  const auto num_buckets = static_cast<size_t>(config.num_len_buckets);
  const size_t dim = num_class_slots + num_buckets;
  const double lambda = config.bias_strength;

  SynthSimilarity out;
  const size_t n = tests.size();
  std::vector<size_t> caption_class(n), caption_bucket(n);
  std::vector<std::string> ids;
  ids.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const ClipRecord& clip = dataset.clips()[tests[i]];
    const ActionClass cls = ClassOf(clip);
    ids.push_back(clip.clip_id);
    caption_class[i] = class_slot.at(cls);
    double mean = global_train_mean;
    if (const auto it = train_means.find(cls); it != train_means.end()) {
      mean = it->second;
    } else if (std::find(out.fallback_classes.begin(),
                         out.fallback_classes.end(),
                         cls) == out.fallback_classes.end()) {
      out.fallback_classes.push_back(cls);
    }
    caption_bucket[i] = static_cast<size_t>(buckets.Of(mean));
  }

  // Clip embeddings, noise drawn clip by clip in gallery order.
  NormalSampler noise(config.seed, kNoiseStream);
  std::vector<double> clip_embed(n * dim, 0.0);
  for (size_t j = 0; j < n; ++j) {
    const ClipRecord& clip = dataset.clips()[tests[j]];
    double* v = clip_embed.data() + j * dim;
    v[class_slot.at(ClassOf(clip))] += 1.0 - lambda;
    v[num_class_slots +
      static_cast<size_t>(buckets.Of(static_cast<double>(FrameLength(clip))))] +=
        lambda;
    if (config.noise_stddev > 0) {
      for (size_t d = 0; d < dim; ++d) {
        v[d] += noise.Normal(0.0, config.noise_stddev);
      }
    }
  }

  // The caption embedding has two non-zero coordinates, so the dot product
  // reduces to two terms.
  std::vector<double> values(n * n);
  for (size_t i = 0; i < n; ++i) {
    const size_t class_dim = caption_class[i];
    const size_t bucket_dim = num_class_slots + caption_bucket[i];
    for (size_t j = 0; j < n; ++j) {
      const double* v = clip_embed.data() + j * dim;
      values[i * n + j] =
          (1.0 - lambda) * v[class_dim] + lambda * v[bucket_dim];
    }
  }
  out.sim = SimilarityMatrix(ids, ids, std::move(values));
  return out;
}

SimOutput Simulate(const SimConfig& config) {
  SimOutput out;
  out.config = config;
  out.dataset = SynthDataset(config);
  SynthSimilarity s = SynthSimilarityMatrix(out.dataset, config, out.dataset);
  out.sim_t2v = std::move(s.sim);
  out.fallback_classes = std::move(s.fallback_classes);
  return out;
}

ConditionMetrics ScoreCondition(const SimilarityMatrix& sim,
                                const Dataset& dataset, int64_t topk) {
  ConditionMetrics m;
  const int64_t k = std::min<int64_t>(topk, static_cast<int64_t>(sim.cols()));
  std::vector<int64_t> ranks;
  ranks.reserve(sim.rows());
  double rank_total = 0, length_total = 0;
  for (size_t q = 0; q < sim.rows(); ++q) {
    const int64_t r = GtRank(sim, q, sim.row_ids()[q]);
    ranks.push_back(r);
    rank_total += static_cast<double>(r);
    length_total += TopKAvgLength(sim, dataset, q, k);
  }
  const auto n = static_cast<double>(sim.rows());
  m.mean_gt_rank = rank_total / n;
  m.recall_at_10 = RecallAtK(ranks, 10);
  m.mean_topk_length = length_total / n;
  return m;
}

SweepReport BiasSweep(const SimConfig& config, const SweepOptions& options) {
  ValidateSimConfig(config);
  if (options.alphas.empty() || options.seeds.empty()) {
    Fail(ErrorCode::kPrecondition, "sweep needs at least one alpha and seed");
  }
  SweepReport report;
  report.config = config;
  report.options = options;
  report.alphas.resize(options.alphas.size());

  for (uint64_t seed : options.seeds) {
    SimConfig seeded = config;
    seeded.seed = seed;
    const Dataset dataset = SynthDataset(seeded);
    const SimilarityMatrix base =
        SynthSimilarityMatrix(dataset, seeded, dataset).sim;

    SeedResult result;
    result.seed = seed;
    result.baseline = ScoreCondition(base, dataset, options.topk);

    for (size_t a = 0; a < options.alphas.size(); ++a) {
      const FilterResult filtered = FilterMargin(
          dataset, {options.alphas[a], options.min_class_size});
      const SimilarityMatrix sim =
          SynthSimilarityMatrix(dataset, seeded, filtered.filtered).sim;
      ConditionMetrics m = ScoreCondition(sim, dataset, options.topk);
      m.removed = filtered.report.removed_count;
      m.classes_touched = filtered.report.classes_touched;

      AlphaSummary& s = report.alphas[a];
      s.alpha = options.alphas[a];
      if (m.mean_gt_rank < result.baseline.mean_gt_rank) {
        ++s.seeds_gt_rank_improved;
      }
      s.mean_gt_rank_before += result.baseline.mean_gt_rank;
      s.mean_gt_rank_after += m.mean_gt_rank;
      s.mean_topk_length_before += result.baseline.mean_topk_length;
      s.mean_topk_length_after += m.mean_topk_length;
      result.filtered.push_back(m);
    }

    // Ablation on a typical-length class: the one whose train mean is
    // closest to the global train mean (>= 2 train clips and a test clip).
    if (const std::optional<ClassStats> pick = TypicalClass(dataset)) {
      AblationResult& ab = result.ablation;
      ab.action_class = pick->action_class;
      ab.baseline_train_mean = *pick->train_mean_len;
      ab.baseline_topk_length =
          ClassTopKLength(base, dataset, ab.action_class, options.topk);
      ab.baseline_mean_gt_rank = ClassMeanGtRank(base, dataset, ab.action_class);
      for (RemovalMode mode :
           {RemovalMode::kRemoveLong, RemovalMode::kRemoveShort}) {
        const FilterResult f = FilterSingleClass(dataset, ab.action_class, mode,
                                                 options.ablation_fraction);
        const SimilarityMatrix sim =
            SynthSimilarityMatrix(dataset, seeded, f.filtered).sim;
        const double topk =
            ClassTopKLength(sim, dataset, ab.action_class, options.topk);
        const double rank = ClassMeanGtRank(sim, dataset, ab.action_class);
        const double train_mean = TrainMean(f.filtered, ab.action_class);
        if (mode == RemovalMode::kRemoveLong) {
          ab.long_removed_topk_length = topk;
          ab.long_removed_mean_gt_rank = rank;
          ab.long_removed_train_mean = train_mean;
        } else {
          ab.short_removed_topk_length = topk;
          ab.short_removed_mean_gt_rank = rank;
          ab.short_removed_train_mean = train_mean;
        }
      }
      if (ab.long_removed_topk_length < ab.baseline_topk_length) {
        ++report.seeds_remove_long_lowers_topk;
      }
      if (ab.short_removed_topk_length > ab.baseline_topk_length) {
        ++report.seeds_remove_short_raises_topk;
      }
    }
    report.seeds.push_back(std::move(result));
  }

  const auto num_seeds = static_cast<double>(options.seeds.size());
  for (AlphaSummary& s : report.alphas) {
    s.mean_gt_rank_before /= num_seeds;
    s.mean_gt_rank_after /= num_seeds;
    s.mean_topk_length_before /= num_seeds;
    s.mean_topk_length_after /= num_seeds;
  }
  return report;
}

}  // namespace framebias
