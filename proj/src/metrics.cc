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

#include "recdebias/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "recdebias/kernels.h"

namespace recdebias {

double rmse(std::span<const double> predicted,
            std::span<const double> actual) {
  if (predicted.empty()) throw std::invalid_argument("rmse of empty input");
  if (predicted.size() != actual.size())
    throw std::invalid_argument("rmse input size mismatch");
  const double ss =
      kernels::sum_sq_diff(predicted.data(), actual.data(), predicted.size());
  return std::sqrt(ss / static_cast<double>(predicted.size()));
}

double auc(std::span<const ScoredLabel> scored) {
  std::size_t num_pos = 0;
  for (const ScoredLabel& s : scored) num_pos += s.positive ? 1 : 0;
  const std::size_t num_neg = scored.size() - num_pos;
  if (num_pos == 0 || num_neg == 0)
    throw std::invalid_argument("auc needs both positive and negative labels");

  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scored[a].score < scored[b].score;
  });

  // Ascending 1-based ranks; a run of equal scores shares the average rank.
  // Ranks are integers or half-integers, so the sums below stay exact.
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() &&
           scored[order[j]].score == scored[order[i]].score)
      ++j;
    const double avg_rank = (static_cast<double>(i + 1) +
                             static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t)
      if (scored[order[t]].positive) positive_rank_sum += avg_rank;
    i = j;
  }

  const double m = static_cast<double>(num_pos);
  const double n = static_cast<double>(num_neg);
  return (positive_rank_sum - m * (m + 1.0) / 2.0) / (m * n);
}

namespace {

double dcg_at_k(std::span<const double> relevances, int k) {
  double sum = 0.0;
  const std::size_t limit =
      std::min<std::size_t>(static_cast<std::size_t>(k), relevances.size());
  for (std::size_t pos = 0; pos < limit; ++pos) {
    sum += (std::exp2(relevances[pos]) - 1.0) /
           std::log2(static_cast<double>(pos) + 2.0);
  }
  return sum;
}

}  // namespace

double ndcg_at_k(std::span<const double> ranked, std::span<const double> ideal,
                 int k) {
  if (k < 1) throw std::invalid_argument("ndcg k must be >= 1");
  std::vector<double> best(ideal.begin(), ideal.end());
  std::sort(best.begin(), best.end(), std::greater<>());
  const double idcg = dcg_at_k(best, k);
  if (idcg == 0.0) return 0.0;
  return dcg_at_k(ranked, k) / idcg;
}

double gini(std::span<const double> popularity) {
  if (popularity.empty()) throw std::invalid_argument("gini of empty input");
  std::vector<double> phi(popularity.begin(), popularity.end());
  double total = 0.0;
  for (double x : phi) {
    if (x < 0.0) throw std::invalid_argument("gini input must be >= 0");
    total += x;
  }
  if (total <= 0.0) throw std::invalid_argument("gini input sums to zero");
  std::sort(phi.begin(), phi.end());

  const double n = static_cast<double>(phi.size());
  double weighted = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i)
    weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * phi[i];
  return weighted / (n * total);
}

double entropy(std::span<const double> probabilities) {
  if (probabilities.empty())
    throw std::invalid_argument("entropy of empty input");
  double total = 0.0;
  for (double p : probabilities) {
    if (p < 0.0) throw std::invalid_argument("entropy input must be >= 0");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-9)
    throw std::invalid_argument("entropy input must sum to 1");
  double h = 0.0;
  for (double p : probabilities)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

std::vector<double> RecDistribution::probabilities() const {
  std::int64_t total = 0;
  for (std::int64_t c : counts) total += c;
  std::vector<double> probs(counts.size(), 0.0);
  if (total == 0) return probs;
  for (std::size_t i = 0; i < counts.size(); ++i)
    probs[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  return probs;
}

RecDistribution rec_distribution(const MfModel& model,
                                 std::span<const std::int32_t> users,
                                 std::span<const std::int32_t> candidates,
                                 int k) {
  if (users.empty()) throw std::invalid_argument("no users to evaluate");
  RecDistribution dist;
  dist.k = k;
  dist.counts.assign(model.num_items, 0);
  for (std::int32_t user : users) {
    for (std::int32_t item : recommend_topk(model, user, k, candidates))
      ++dist.counts[item];
  }
  return dist;
}

bool is_positive(double rating, FeedbackKind kind) {
  if (kind == FeedbackKind::kImplicit) return rating == 1.0;
  return rating >= kExplicitPositiveThreshold;
}

double auc_on_interactions(const MfModel& model,
                           std::span<const Interaction> interactions,
                           FeedbackKind kind) {
  std::vector<ScoredLabel> scored;
  scored.reserve(interactions.size());
  for (const Interaction& it : interactions) {
    scored.push_back(
        {predict(model, it.user, it.item), is_positive(it.rating, kind)});
  }
  return auc(scored);
}

}  // namespace recdebias
