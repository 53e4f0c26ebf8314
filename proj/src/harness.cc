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

#include "recdebias/harness.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace recdebias {

DatasetPair load_dataset(const ExperimentConfig& cfg) {
  DatasetPair pair;
  switch (cfg.type) {
    case ExperimentConfig::DatasetType::kCoat:
      pair = load_coat(cfg.coat_dir);
      break;
    case ExperimentConfig::DatasetType::kYahoo: {
      YahooLoad load = load_yahoo(cfg.yahoo_train, cfg.yahoo_test);
      pair.biased = std::move(load.biased);
      pair.randomized = std::move(load.randomized);
      break;
    }
    case ExperimentConfig::DatasetType::kCanonical:
      pair.biased = read_canonical(cfg.canonical_biased);
      pair.randomized = read_canonical(cfg.canonical_randomized);
      break;
    case ExperimentConfig::DatasetType::kSynthetic: {
      SyntheticOutput out = generate_synthetic(cfg.synthetic);
      pair.biased = std::move(out.biased);
      pair.randomized = std::move(out.randomized);
      break;
    }
  }
  return pair;
}

MetricValues evaluate_model(const MfModel& model,
                            std::span<const Interaction> test,
                            const DatasetInfo& info) {
  if (test.empty()) throw std::invalid_argument("empty test set");
  MetricValues values;

  std::vector<double> predicted, actual;
  predicted.reserve(test.size());
  actual.reserve(test.size());
  for (const Interaction& it : test) {
    predicted.push_back(predict(model, it.user, it.item));
    actual.push_back(it.rating);
  }
  values.rmse = rmse(predicted, actual);
  values.auc = auc_on_interactions(model, test, info.kind);

  // Group test rows per user (sorted ids keep evaluation order stable).
  std::map<std::int32_t, std::vector<const Interaction*>> by_user;
  for (const Interaction& it : test) by_user[it.user].push_back(&it);

  // Per-user NDCG@5 over the user's own test items; relevance is the raw
  // rating for explicit data and the 0/1 purchase signal for implicit.
  double ndcg_sum = 0.0;
  std::int64_t ndcg_users = 0;
  std::vector<std::int32_t> candidates;
  std::vector<double> ranked, ideal;
  for (const auto& [user, rows] : by_user) {
    double best = 0.0;
    for (const Interaction* it : rows) best = std::max(best, it->rating);
    if (best <= 0.0) continue;  // no relevant item
    candidates.clear();
    for (const Interaction* it : rows) candidates.push_back(it->item);
    const std::vector<std::int32_t> order = recommend_topk(
        model, user, static_cast<std::int32_t>(candidates.size()), candidates);
    ranked.clear();
    ideal.clear();
    for (std::int32_t item : order) {
      for (const Interaction* it : rows) {
        if (it->item == item) {
          ranked.push_back(it->rating);
          break;
        }
      }
    }
    for (const Interaction* it : rows) ideal.push_back(it->rating);
    ndcg_sum += ndcg_at_k(ranked, ideal, kRecommendationK);
    ++ndcg_users;
  }
  values.ndcg_at_5 =
      ndcg_users > 0 ? ndcg_sum / static_cast<double>(ndcg_users) : 0.0;

  // Diversity of the top-5 lists over the full item catalogue.
  std::vector<std::int32_t> users;
  users.reserve(by_user.size());
  for (const auto& [user, rows] : by_user) users.push_back(user);
  std::vector<std::int32_t> all_items(model.num_items);
  std::iota(all_items.begin(), all_items.end(), 0);
  const RecDistribution dist =
      rec_distribution(model, users, all_items, kRecommendationK);
  std::vector<double> popularity(dist.counts.begin(), dist.counts.end());
  values.gini = gini(popularity);
  values.entropy = entropy(dist.probabilities());
  return values;
}

namespace {

PropensityMethod pick_propensity(const ModelSpec& spec,
                                 const DatasetInfo& info,
                                 const DataSplit& split) {
  if (spec.propensity) return *spec.propensity;
  if (info.kind == FeedbackKind::kExplicit && !split.uniform.empty())
    return PropensityMethod::kNaiveBayes;
  return PropensityMethod::kItemPopularity;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  return run_experiment(cfg, load_dataset(cfg));
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg,
                                const DatasetPair& data) {
  ExperimentOutput output;
  output.dataset = cfg.name;
  const DatasetInfo info = dataset_info(data.biased, data.randomized);

  for (std::int32_t repeat = 0; repeat < cfg.repeats; ++repeat) {
    const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(repeat);
    RandomizedParts parts =
        split_randomized(data.randomized.interactions, cfg.ratios, seed);
    if (!cfg.uniform_training) parts.uniform.clear();
    const DataSplit split =
        attach_biased(data.biased.interactions, std::move(parts));

    for (const ModelSpec& spec : cfg.models) {
      const bool needs_uniform = spec.tag == "mf-uniform" ||
                                 spec.tag == "dr" || spec.tag == "autodebias";
      if (needs_uniform && split.uniform.empty()) {
        output.skips.push_back(
            {spec.tag, seed,
             spec.tag + " requires randomized training data, which this "
                        "dataset does not provide"});
        continue;
      }

      MfModel model;
      TrainReport report;
      if (spec.tag == "mf-biased") {
        MfResult res =
            train_mf(info, split, spec.hp, seed, TrainingSource::kBiased);
        model = std::move(res.model);
        report = std::move(res.report);
      } else if (spec.tag == "mf-uniform") {
        MfResult res =
            train_mf(info, split, spec.hp, seed, TrainingSource::kUniform);
        model = std::move(res.model);
        report = std::move(res.report);
      } else if (spec.tag == "ips") {
        const Propensities props = estimate_propensities(
            info, split, pick_propensity(spec, info, split), spec.hp);
        MfResult res = train_ips(info, split, spec.hp, seed, props);
        model = std::move(res.model);
        report = std::move(res.report);
      } else if (spec.tag == "dr") {
        const Propensities props = estimate_propensities(
            info, split, pick_propensity(spec, info, split), spec.hp);
        DrResult res = train_dr(info, split, spec.hp, seed, props);
        model = std::move(res.model);
        report = std::move(res.report);
      } else if (spec.tag == "autodebias") {
        AutoDebiasResult res = train_autodebias(info, split, spec.hp, seed);
        model = std::move(res.model);
        report = std::move(res.report);
      } else {
        throw std::invalid_argument("unknown model tag " + spec.tag);
      }

      MetricValues metrics = evaluate_model(model, split.test, info);
      metrics.training_time_seconds = report.wall_time_seconds;
      output.results.push_back({spec.tag, seed, metrics});
    }
  }
  return output;
}

double metric_value(const MetricValues& values, std::size_t index) {
  switch (index) {
    case 0: return values.rmse;
    case 1: return values.auc;
    case 2: return values.ndcg_at_5;
    case 3: return values.gini;
    case 4: return values.entropy;
    case 5: return values.training_time_seconds;
  }
  throw std::out_of_range("metric index");
}

AggregateReport aggregate(const ExperimentOutput& output,
                          const std::string& baseline_tag) {
  AggregateReport report;
  report.dataset = output.dataset;
  report.baseline = baseline_tag;
  report.skips = output.skips;

  // Group results by model in first-appearance order.
  std::vector<std::string> model_order;
  std::map<std::string, std::vector<const RunResult*>> grouped;
  for (const RunResult& run : output.results) {
    if (grouped.find(run.model) == grouped.end())
      model_order.push_back(run.model);
    grouped[run.model].push_back(&run);
  }
  if (grouped.find(baseline_tag) == grouped.end())
    throw std::invalid_argument("baseline model '" + baseline_tag +
                                "' has no results");

  const auto stats_for = [&](const std::vector<const RunResult*>& runs,
                             std::size_t metric) {
    MetricStats stats;
    const auto n = static_cast<double>(runs.size());
    double sum = 0.0;
    for (const RunResult* run : runs) sum += metric_value(run->metrics, metric);
    stats.mean = sum / n;
    if (runs.size() > 1) {
      double ss = 0.0;
      for (const RunResult* run : runs) {
        const double d = metric_value(run->metrics, metric) - stats.mean;
        ss += d * d;
      }
      const double sd = std::sqrt(ss / (n - 1.0));
      stats.ci95 = 1.96 * sd / std::sqrt(n);
    }
    return stats;
  };

  std::array<double, 6> baseline_means{};
  for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric)
    baseline_means[metric] = stats_for(grouped[baseline_tag], metric).mean;

  for (const std::string& tag : model_order) {
    ModelAggregate agg;
    agg.model = tag;
    agg.runs = static_cast<std::int32_t>(grouped[tag].size());
    if (agg.runs == 1) report.single_run = true;
    for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
      agg.stats[metric] = stats_for(grouped[tag], metric);
      if (tag != baseline_tag && baseline_means[metric] != 0.0) {
        agg.stats[metric].has_improvement = true;
        agg.stats[metric].improvement_pct =
            (agg.stats[metric].mean - baseline_means[metric]) /
            baseline_means[metric] * 100.0;
      }
    }
    report.models.push_back(std::move(agg));
  }
  return report;
}

}  // namespace recdebias
