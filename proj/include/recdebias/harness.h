// Copyright 2026 The recdebias Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RECDEBIAS_HARNESS_H_
#define RECDEBIAS_HARNESS_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "recdebias/config.h"
#include "recdebias/data.h"
#include "recdebias/ingest.h"
#include "recdebias/metrics.h"
#include "recdebias/train.h"

namespace recdebias {

struct RunResult {
  std::string model;
  std::uint64_t seed = 0;
  MetricValues metrics;
};

struct SkipRecord {
  std::string model;
  std::uint64_t seed = 0;
  std::string reason;
};

struct ExperimentOutput {
  std::string dataset;
  std::vector<RunResult> results;
  std::vector<SkipRecord> skips;
};

// Recommendation-list cutoff shared by NDCG and the gini/entropy
// distribution.
inline constexpr int kRecommendationK = 5;

// Loads (or generates) the dataset the config names.
DatasetPair load_dataset(const ExperimentConfig& cfg);

// Full test-set evaluation of a trained model: RMSE and pooled AUC over
// the test interactions, per-user NDCG@5 over each user's test items,
// and gini/entropy of the top-5 recommendation distribution over all items.
// training_time_seconds is left at zero for the caller.
MetricValues evaluate_model(const MfModel& model,
                            std::span<const Interaction> test,
                            const DatasetInfo& info);

// Runs every requested (model, repeat): repeat j uses seed base_seed + j
// for both the split and the trainer. Models whose requirements the data
// cannot meet (no uniform slice) are recorded as skips and the run
// continues. Deterministic for a fixed config, except wall-clock times.
ExperimentOutput run_experiment(const ExperimentConfig& cfg);
ExperimentOutput run_experiment(const ExperimentConfig& cfg,
                                const DatasetPair& data);

inline constexpr std::array<const char*, 6> kMetricNames = {
    "rmse", "auc", "ndcg_at_5", "gini", "entropy", "training_time_seconds"};

// +1 when larger is better, -1 when smaller is better; indexed like
// kMetricNames.
inline constexpr std::array<int, 6> kMetricDirection = {-1, +1, +1, -1, +1, -1};

double metric_value(const MetricValues& values, std::size_t index);

struct MetricStats {
  double mean = 0.0;
  double ci95 = 0.0;  // 1.96 * sd / sqrt(runs)
  bool has_improvement = false;
  double improvement_pct = 0.0;  // vs the baseline mean, from unrounded means
};

struct ModelAggregate {
  std::string model;
  std::int32_t runs = 0;
  std::array<MetricStats, 6> stats;
};

struct AggregateReport {
  std::string dataset;
  std::string baseline;
  bool single_run = false;  // flagged when any model has a lone run
  std::vector<ModelAggregate> models;
  std::vector<SkipRecord> skips;
};

// Per-model means, normal-approximation 95% confidence intervals, and
// percentage improvement against the baseline model (which must be
// present).
AggregateReport aggregate(const ExperimentOutput& output,
                          const std::string& baseline_tag);

// Per-run persistence: `dataset,model,seed,metric,value` rows, parsed back
// for re-aggregation without retraining.
void write_runs_csv(const ExperimentOutput& output, const std::string& path);
ExperimentOutput read_runs_csv(const std::string& path);

// Deterministic aggregate table (`dataset,model,metric,mean,ci95,
// improvement_pct`); excludes wall-clock rows so repeated benches are
// byte-identical.
void write_results_csv(const AggregateReport& report, const std::string& path);
// Same schema, wall-clock rows only.
void write_timings_csv(const AggregateReport& report, const std::string& path);
AggregateReport read_results_csv(const std::string& path);

// Human-readable tables: absolute mean +/- CI and percentage improvement
// with the best value per metric column marked.
void write_markdown(const AggregateReport& report, const std::string& path);
std::string markdown_report(const AggregateReport& report);

// Writes results.csv/timings.csv (csv), report.md (markdown), or all
// (both) under `dir`.
void emit_report(const AggregateReport& report, const std::string& format,
                 const std::string& dir);

}  // namespace recdebias

#endif  // RECDEBIAS_HARNESS_H_
