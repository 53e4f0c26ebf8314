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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "recdebias/train.h"
#include "train_util.h"

namespace recdebias {

namespace {

using internal::EarlyStopper;
using internal::WallTimer;

struct ObservedEntry {
  double rating;
  double inv_propensity;
};

}  // namespace

DrResult train_dr(const DatasetInfo& info, const DataSplit& split,
                  const HyperParams& hp, std::uint64_t seed,
                  const Propensities& props) {
  validate_hyperparams(hp);
  if (split.train_biased.empty())
    throw std::invalid_argument("train_dr: biased training set is empty");
  if (split.uniform.empty())
    throw std::invalid_argument("train_dr: DR requires randomized data");

  WallTimer timer;
  Rng rng(seed);
  MfModel model = internal::init_model(info, hp, rng, split.train_biased);

  ImputationModel imputation;
  imputation.rating_min = info.rating_min;
  imputation.rating_max = info.rating_max;
  imputation.item_offset.assign(info.num_items, 0.0);
  double uniform_mean = 0.0;
  for (const Interaction& it : split.uniform) uniform_mean += it.rating;
  imputation.global =
      uniform_mean / static_cast<double>(split.uniform.size());

  // Observed-pair lookup for the sampled risk, plus the inverse-weighted
  // example list driving the imputation step.
  std::unordered_map<std::int64_t, ObservedEntry> observed;
  observed.reserve(split.train_biased.size() * 2);
  std::vector<WeightedExample> observed_examples;
  observed_examples.reserve(split.train_biased.size());
  for (const Interaction& it : split.train_biased) {
    const double p = props.probability(it.item, it.rating);
    if (p < props.floor || p > 1.0)
      throw std::invalid_argument("train_dr: propensity outside [floor, 1]");
    const double invp = 1.0 / p;
    observed[static_cast<std::int64_t>(it.user) * info.num_items + it.item] =
        {it.rating, invp};
    observed_examples.push_back({it.user, it.item, it.rating, invp});
  }

  const std::int64_t pairs_per_epoch = std::max<std::int64_t>(
      1, std::llround(hp.all_pairs_sample_rate *
                      static_cast<double>(info.num_users) *
                      static_cast<double>(info.num_items)));

  GradBuffer grad(model);
  ImputationGrad igrad(imputation);
  std::vector<std::size_t> order(observed_examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<WeightedExample> obs_batch;
  obs_batch.reserve(hp.batch_size);
  std::vector<DrPair> pair_batch;
  pair_batch.reserve(hp.batch_size);

  EarlyStopper stopper(hp.patience);
  MfModel best_model = model;
  ImputationModel best_imputation = imputation;
  TrainReport report;

  for (std::int32_t epoch = 1; epoch <= hp.max_epochs; ++epoch) {
    // (a) Imputation step: fit the error model on the inverse-weighted
    // biased log, anchored by the supervised term on the uniform sample.
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size();
         start += hp.batch_size) {
      const std::size_t end = std::min(
          order.size(), start + static_cast<std::size_t>(hp.batch_size));
      obs_batch.clear();
      for (std::size_t pos = start; pos < end; ++pos)
        obs_batch.push_back(observed_examples[order[pos]]);
      add_dr_imputation_grad(model, imputation, obs_batch, split.uniform,
                             igrad);
      igrad.apply_step(imputation, hp.imputation_learning_rate);
      igrad.reset();
    }

    // (b) Prediction step: descend the sampled doubly robust risk.
    double loss_sum = 0.0;
    std::int64_t batches = 0;
    std::int64_t remaining = pairs_per_epoch;
    while (remaining > 0) {
      const auto take = static_cast<std::size_t>(
          std::min<std::int64_t>(remaining, hp.batch_size));
      pair_batch.clear();
      for (std::size_t n = 0; n < take; ++n) {
        DrPair pair;
        pair.user = static_cast<std::int32_t>(rng.uniform_below(info.num_users));
        pair.item = static_cast<std::int32_t>(rng.uniform_below(info.num_items));
        const auto hit = observed.find(
            static_cast<std::int64_t>(pair.user) * info.num_items + pair.item);
        if (hit != observed.end()) {
          pair.observed = true;
          pair.rating = hit->second.rating;
          pair.inv_propensity = hit->second.inv_propensity;
        }
        pair_batch.push_back(pair);
      }
      loss_sum += add_dr_prediction_grad(model, imputation, pair_batch,
                                         hp.imputation_weight, hp.l2_reg, grad);
      grad.apply_step(model, hp.learning_rate);
      grad.reset();
      remaining -= static_cast<std::int64_t>(take);
      ++batches;
    }
    internal::check_finite(model, "train_dr");

    const double val_auc =
        internal::validation_auc(model, split.validation, info.kind);
    report.loss_curve.push_back(
        {epoch, loss_sum / static_cast<double>(batches), val_auc});
    report.epochs_run = epoch;
    if (stopper.observe(epoch, val_auc)) {
      best_model = model;
      best_imputation = imputation;
    }
    if (stopper.should_stop(epoch)) break;
  }

  report.best_validation_auc = stopper.best_auc();
  report.wall_time_seconds = timer.seconds();
  return DrResult{std::move(best_model), std::move(best_imputation),
                  std::move(report)};
}

}  // namespace recdebias
