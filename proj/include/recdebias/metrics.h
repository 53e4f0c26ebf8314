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

#ifndef RECDEBIAS_METRICS_H_
#define RECDEBIAS_METRICS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "recdebias/data.h"
#include "recdebias/model.h"

namespace recdebias {

// The five per-model evaluation values plus wall-clock training time.
struct MetricValues {
  double rmse = 0.0;
  double auc = 0.0;
  double ndcg_at_5 = 0.0;
  double gini = 0.0;
  double entropy = 0.0;
  double training_time_seconds = 0.0;
};

// sqrt(mean((predicted - actual)^2)) over parallel arrays. Throws on empty
// or mismatched input.
double rmse(std::span<const double> predicted, std::span<const double> actual);

struct ScoredLabel {
  double score = 0.0;
  bool positive = false;
};

// Pooled rank-sum AUC with ties assigned the average rank; equivalent to
// the fraction of positive-negative pairs ordered correctly with ties
// counting one half. Requires at least one positive and one negative.
double auc(std::span<const ScoredLabel> scored);

// NDCG@k with gain (2^rel - 1) / log2(position + 1). `ranked` holds
// relevances in the model's order; `ideal` holds the same relevance
// multiset in any order. Returns 0 when the ideal DCG is 0.
double ndcg_at_k(std::span<const double> ranked, std::span<const double> ideal,
                 int k);

// Gini coefficient of a non-negative popularity vector: the input is
// sorted ascending internally and sum_i (2i - n - 1) phi_(i) / (n sum phi)
// is applied. Requires a positive total.
double gini(std::span<const double> popularity);

// Shannon entropy, natural log, with 0 log 0 = 0. The input must be a
// probability vector (non-negative, summing to 1 within 1e-9).
double entropy(std::span<const double> probabilities);

// Per-item top-k recommendation counts across a set of users. counts has
// one slot per model item, so items outside `candidates` stay at zero.
struct RecDistribution {
  std::vector<std::int64_t> counts;
  int k = 0;

  // counts / sum(counts)
  std::vector<double> probabilities() const;
};

RecDistribution rec_distribution(const MfModel& model,
                                 std::span<const std::int32_t> users,
                                 std::span<const std::int32_t> candidates,
                                 int k);

// Ratings of at least 4 count as positive when binarizing explicit
// feedback for AUC; implicit feedback is already a 0/1 signal.
inline constexpr double kExplicitPositiveThreshold = 4.0;

bool is_positive(double rating, FeedbackKind kind);

// Pooled AUC of model scores over a set of interactions (used both for
// test evaluation and epoch-level validation).
double auc_on_interactions(const MfModel& model,
                           std::span<const Interaction> interactions,
                           FeedbackKind kind);

}  // namespace recdebias

#endif  // RECDEBIAS_METRICS_H_
