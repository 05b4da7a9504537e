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

#include "framebias/cli.h"

#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>

#include "CLI11.hpp"

#include "framebias/bias_audit.h"
#include "framebias/dataset.h"
#include "framebias/debias_filter.h"
#include "framebias/error.h"
#include "framebias/matrix_io.h"
#include "framebias/relevance_metrics.h"
#include "framebias/report.h"
#include "framebias/simulator.h"

namespace framebias {
namespace {

namespace fs = std::filesystem;

// Paths are echoed by file name only, so reports do not depend on where the
// tool was run from.
std::string FileName(const std::string& path) {
  return fs::path(path).filename().string();
}

Json FileNames(const std::vector<std::string>& paths) {
  Json j = Json::array();
  for (const std::string& p : paths) j.push_back(FileName(p));
  return j;
}

const std::map<std::string, AnnotationFormat> kFormats = {
    {"native", AnnotationFormat::kNative},
    {"ek100_pair", AnnotationFormat::kEk100Pair}};

struct AnnotationFlags {
  std::vector<std::string> paths;
  AnnotationFormat format = AnnotationFormat::kNative;

  void Register(CLI::App* cmd) {
    cmd->add_option("--annotations", paths,
                    "Annotation file (native) or train and test files "
                    "(ek100_pair)")
        ->required()
        ->expected(1, 2);
    cmd->add_option("--format", format, "native | ek100_pair")
        ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
  }
  Dataset Load() const { return LoadAnnotations(paths, format); }
  Json Echo() const {
    Json j;
    j["annotations"] = FileNames(paths);
    j["format"] = format == AnnotationFormat::kNative ? "native" : "ek100_pair";
    return j;
  }
};

void WriteReport(const std::string& path, const Json& envelope) {
  WriteFileAtomic(path, RenderJson(envelope));
}

// --class V,N
ActionClass ParseClassFlag(const std::string& text) {
  const size_t comma = text.find(',');
  try {
    if (comma != std::string::npos) {
      size_t used_v = 0, used_n = 0;
      const std::string verb = text.substr(0, comma);
      const std::string noun = text.substr(comma + 1);
      const int v = std::stoi(verb, &used_v);
      const int n = std::stoi(noun, &used_n);
      if (used_v == verb.size() && used_n == noun.size()) return {v, n};
    }
  } catch (const std::exception&) {
  }
  Fail(ErrorCode::kParse, "--class expects VERB,NOUN, got '" + text + "'");
}

int RunAudit(const AnnotationFlags& ann, const std::optional<std::string>& cls,
             int64_t bin_width, int64_t min_count, const std::string& out,
             const std::optional<std::string>& hist_out) {
  const Dataset dataset = ann.Load();
  std::optional<ActionClass> action_class;
  if (cls) action_class = ParseClassFlag(*cls);
  const LengthHistogram histogram =
      ComputeLengthHistogram(dataset, action_class, bin_width);

  Json config = ann.Echo();
  config["class"] = action_class ? Json(ToString(*action_class)) : Json("all");
  config["bin_width"] = bin_width;
  config["min_count"] = min_count;
  config["out"] = FileName(out);
  config["hist_out"] = hist_out ? Json(FileName(*hist_out)) : Json(nullptr);

  if (hist_out) WriteFileAtomic(*hist_out, HistogramToCsv(histogram));
  WriteReport(out, MakeEnvelope("audit", std::move(config), "audit",
                                AuditPayload(dataset, min_count, histogram,
                                             action_class)));
  return kExitOk;
}

int RunFilter(const AnnotationFlags& ann, const FilterConfig& filter,
              const std::string& out, const std::string& report_path) {
  ValidateFilterConfig(filter);
  const Dataset dataset = ann.Load();
  const FilterResult result = FilterMargin(dataset, filter);

  Json config = ann.Echo();
  config["alpha"] = filter.alpha;
  config["min_class_size"] = filter.min_class_size;
  config["out"] = FileName(out);
  config["report"] = FileName(report_path);

  WriteFileAtomic(out, SerializeNative(result.filtered));
  WriteReport(report_path, MakeEnvelope("filter", std::move(config), "filter",
                                        ToJson(result.report)));
  return kExitOk;
}

int RunFilterOne(const AnnotationFlags& ann, const ActionClass& cls,
                 const std::string& mode, double fraction,
                 const std::string& out, const std::string& report_path) {
  const Dataset dataset = ann.Load();
  const RemovalMode removal =
      mode == "long" ? RemovalMode::kRemoveLong : RemovalMode::kRemoveShort;
  const FilterResult result =
      FilterSingleClass(dataset, cls, removal, fraction);

  Json config = ann.Echo();
  config["verb"] = cls.verb;
  config["noun"] = cls.noun;
  config["mode"] = mode;
  config["fraction"] = fraction;
  config["out"] = FileName(out);
  config["report"] = FileName(report_path);

  WriteFileAtomic(out, SerializeNative(result.filtered));
  WriteReport(report_path, MakeEnvelope("filter-one", std::move(config),
                                        "filter", ToJson(result.report)));
  return kExitOk;
}

int RunEval(const AnnotationFlags& ann, const std::string& sim_path,
            const MetricsOptions& options, const std::string& out) {
  const Dataset dataset = ann.Load();
  const SimilarityMatrix sim = ReadSimilarityMatrix(sim_path);
  const RelevancyMatrix rel = BuildRelevancyFor(sim, dataset);
  const MetricsReport metrics = EvaluateRetrieval(sim, rel, options);

  Json config = ann.Echo();
  config["sim"] = FileName(sim_path);
  config["threshold"] = options.map_threshold;
  config["depth"] = options.ndcg_depth ? Json(*options.ndcg_depth) : Json(nullptr);
  config["out"] = FileName(out);
  WriteReport(out, MakeEnvelope("eval", std::move(config), "metrics",
                                ToJson(metrics)));
  return kExitOk;
}

int RunInspect(const AnnotationFlags& ann, const std::string& sim_path,
               const std::string& query, int64_t topk, std::ostream& out) {
  const Dataset dataset = ann.Load();
  const SimilarityMatrix sim = ReadSimilarityMatrix(sim_path);
  const std::vector<InspectRow> rows = InspectQuery(sim, dataset, query, topk);
  const ClipRecord& q = dataset.Get(query);

  out << "query " << query << " [" << ToString(ClassOf(q)) << "] \""
      << q.caption << "\" frames=" << FrameLength(q) << "\n";
  out << "rank\tgallery_id\tscore\trelevance\tframes\tgt\tcaption\n";
  char score[32], rel[32];
  for (const InspectRow& r : rows) {
    std::snprintf(score, sizeof(score), "%.6f", r.score);
    std::snprintf(rel, sizeof(rel), "%.1f", r.relevance);
    out << r.rank << "\t" << r.gallery_id << "\t" << score << "\t" << rel
        << "\t" << r.frame_length << "\t" << (r.is_ground_truth ? "*" : "")
        << "\t" << r.caption << "\n";
  }
  return kExitOk;
}

int RunSimulate(const SimConfig& config, const SweepOptions& options,
                double test_offset, const std::string& out_dir) {
  ValidateSimConfig(config);
  fs::create_directories(out_dir);
  const SweepReport report = BiasSweep(config, options);

  for (uint64_t seed : options.seeds) {
    SimConfig seeded = config;
    seeded.seed = seed;
    const SimOutput sim = Simulate(seeded);
    const std::string stem = "seed_" + std::to_string(seed);
    WriteFileAtomic((fs::path(out_dir) / (stem + "_annotations.csv")).string(),
                    SerializeNative(sim.dataset));
    WriteMatrix((fs::path(out_dir) / (stem + "_sim.simm")).string(),
                sim.sim_t2v);
  }

  Json echo = ToJson(config);
  echo.erase("seed");
  echo["test_offset"] = test_offset;
  echo["seeds"] = options.seeds;
  echo["alphas"] = options.alphas;
  echo["min_class_size"] = options.min_class_size;
  echo["ablation_fraction"] = options.ablation_fraction;
  echo["topk"] = options.topk;
  WriteReport((fs::path(out_dir) / "sweep_report.json").string(),
              MakeEnvelope("simulate", std::move(echo), "sweep",
                           ToJson(report)));
  return kExitOk;
}

int RunSumSims(const std::vector<std::string>& inputs, bool mean,
               const std::string& out) {
  std::vector<SimilarityMatrix> matrices;
  matrices.reserve(inputs.size());
  for (const std::string& p : inputs) matrices.push_back(ReadSimilarityMatrix(p));
  WriteMatrix(out, SumSimilarityMatrices(matrices, mean));
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Frame-length bias audit, debiasing filters and retrieval "
               "metrics for trimmed-clip text-video datasets"};
  app.name("framebias");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  // audit
  AnnotationFlags audit_ann;
  std::optional<std::string> audit_class, audit_hist;
  int64_t bin_width = kDefaultBinWidth;
  int64_t min_count = 1;
  std::string audit_out;
  CLI::App* audit = app.add_subcommand(
      "audit", "Per-class and global train/test frame-length statistics");
  audit_ann.Register(audit);
  audit->add_option("--class", audit_class, "Histogram for one class: V,N");
  audit->add_option("--bin-width", bin_width, "Histogram bin width in frames")
      ->check(CLI::PositiveNumber);
  audit->add_option("--min-count", min_count,
                    "Minimum train clips for the discrepancy table");
  audit->add_option("--out", audit_out, "Report path")->required();
  audit->add_option("--hist-out", audit_hist, "Histogram CSV path");

  // filter
  AnnotationFlags filter_ann;
  FilterConfig filter_config;
  std::string filter_out, filter_report;
  CLI::App* filter = app.add_subcommand(
      "filter", "Greedy per-class margin filter over the train split");
  filter_ann.Register(filter);
  filter->add_option("--alpha", filter_config.alpha, "Margin in frames")
      ->capture_default_str();
  filter->add_option("--min-class-size", filter_config.min_class_size,
                     "Train clips a class must keep")
      ->capture_default_str();
  filter->add_option("--out", filter_out, "Filtered annotations")->required();
  filter->add_option("--report", filter_report, "Report path")->required();

  // filter-one
  AnnotationFlags one_ann;
  int verb = 0, noun = 0;
  std::string mode;
  double fraction = 31.0 / 88.0;
  std::string one_out, one_report;
  CLI::App* one = app.add_subcommand(
      "filter-one", "Remove the longest or shortest train clips of one class");
  one_ann.Register(one);
  one->add_option("--verb", verb, "Verb class id")->required();
  one->add_option("--noun", noun, "Noun class id")->required();
  one->add_option("--mode", mode, "long | short")
      ->required()
      ->check(CLI::IsMember({"long", "short"}));
  one->add_option("--fraction", fraction, "Share of train clips to remove")
      ->capture_default_str();
  one->add_option("--out", one_out, "Filtered annotations")->required();
  one->add_option("--report", one_report, "Report path")->required();

  // eval
  AnnotationFlags eval_ann;
  std::string eval_sim, eval_out;
  MetricsOptions metrics_options;
  std::optional<int64_t> depth;
  CLI::App* eval = app.add_subcommand(
      "eval", "nDCG, mAP, recall and GT ranks for a similarity matrix");
  eval_ann.Register(eval);
  eval->add_option("--sim", eval_sim, "Similarity matrix (text or SIMM)")
      ->required();
  eval->add_option("--threshold", metrics_options.map_threshold,
                   "Relevance threshold for mAP")
      ->capture_default_str();
  eval->add_option("--depth", depth, "nDCG truncation depth")
      ->check(CLI::PositiveNumber);
  eval->add_option("--out", eval_out, "Report path")->required();

  // inspect
  AnnotationFlags inspect_ann;
  std::string inspect_sim, query;
  int64_t topk = 10;
  CLI::App* inspect =
      app.add_subcommand("inspect", "Print the top-k retrievals for a query");
  inspect_ann.Register(inspect);
  inspect->add_option("--sim", inspect_sim, "Similarity matrix")->required();
  inspect->add_option("--query", query, "Query (row) id")->required();
  inspect->add_option("--topk", topk, "Rows to list")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // simulate
  SimConfig sim_config;
  SweepOptions sweep;
  double test_offset = sim_config.test_len_mean - sim_config.train_len_mean;
  std::string out_dir;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Synthetic length-leakage sweep over seeds and margins");
  simulate->add_option("--classes", sim_config.num_classes)->capture_default_str();
  simulate->add_option("--train-per-class", sim_config.train_per_class)
      ->capture_default_str();
  simulate->add_option("--test-per-class", sim_config.test_per_class)
      ->capture_default_str();
  simulate->add_option("--bias", sim_config.bias_strength,
                       "Length leakage strength in [0, 1]")
      ->capture_default_str();
  simulate->add_option("--test-offset", test_offset,
                       "Test mean length minus train mean length")
      ->capture_default_str();
  simulate->add_option("--train-len-mean", sim_config.train_len_mean)
      ->capture_default_str();
  simulate->add_option("--len-stddev", sim_config.len_stddev)
      ->capture_default_str();
  simulate->add_option("--class-spread", sim_config.class_len_spread)
      ->capture_default_str();
  simulate->add_option("--noise", sim_config.noise_stddev)->capture_default_str();
  simulate->add_option("--buckets", sim_config.num_len_buckets)
      ->capture_default_str();
  simulate->add_option("--seeds", sweep.seeds, "Comma-separated seeds")
      ->delimiter(',')
      ->required();
  simulate->add_option("--alphas", sweep.alphas, "Comma-separated margins")
      ->delimiter(',')
      ->required();
  simulate->add_option("--min-class-size", sweep.min_class_size)
      ->capture_default_str();
  simulate->add_option("--ablation-fraction", sweep.ablation_fraction)
      ->capture_default_str();
  simulate->add_option("--topk", sweep.topk)->capture_default_str();
  simulate->add_option("--out-dir", out_dir)->required();

  // sum-sims
  std::vector<std::string> sum_inputs;
  std::string sum_out;
  bool sum_mean = false;
  CLI::App* sum = app.add_subcommand(
      "sum-sims", "Elementwise sum of same-layout similarity matrices");
  sum->add_option("inputs", sum_inputs, "Matrices to add")->required();
  sum->add_option("--out", sum_out, "Output (.simm for binary)")->required();
  sum->add_flag("--mean", sum_mean, "Divide by the number of matrices");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "framebias: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*audit) {
      return RunAudit(audit_ann, audit_class, bin_width, min_count, audit_out,
                      audit_hist);
    }
    if (*filter) {
      return RunFilter(filter_ann, filter_config, filter_out, filter_report);
    }
    if (*one) {
      return RunFilterOne(one_ann, {verb, noun}, mode, fraction, one_out,
                          one_report);
    }
    if (*eval) {
      metrics_options.ndcg_depth = depth;
      return RunEval(eval_ann, eval_sim, metrics_options, eval_out);
    }
    if (*inspect) {
      return RunInspect(inspect_ann, inspect_sim, query, topk, out);
    }
    if (*simulate) {
      sim_config.test_len_mean = sim_config.train_len_mean + test_offset;
      return RunSimulate(sim_config, sweep, test_offset, out_dir);
    }
    if (*sum) return RunSumSims(sum_inputs, sum_mean, sum_out);
  } catch (const Error& e) {
    err << "framebias: " << ErrorCodeName(e.code()) << ": " << e.what()
        << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "framebias: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace framebias
