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

#include "recdebias/train.h"
#include "train_util.h"

namespace recdebias {

namespace {

using internal::EarlyStopper;
using internal::WallTimer;

void axpy_vec(double alpha, const std::vector<double>& x,
              std::vector<double>& y) {
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += alpha * x[k];
}

}  // namespace

AutoDebiasResult train_autodebias(const DatasetInfo& info,
                                  const DataSplit& split,
                                  const HyperParams& hp, std::uint64_t seed) {
  validate_hyperparams(hp);
  if (split.train_biased.empty())
    throw std::invalid_argument(
        "train_autodebias: biased training set is empty");
  if (split.uniform.empty())
    throw std::invalid_argument(
        "train_autodebias: AutoDebias requires randomized data");

  WallTimer timer;
  Rng rng(seed);
  MfModel model = internal::init_model(info, hp, rng, split.train_biased);
  MetaWeights meta = make_meta_weights(
      make_meta_features(split.train_biased, info.num_users, info.num_items),
      info.rating_min, info.rating_max);

  const std::size_t num_batches =
      (split.train_biased.size() + hp.batch_size - 1) / hp.batch_size;
  const std::int64_t pairs_per_epoch = std::max<std::int64_t>(
      1, std::llround(hp.all_pairs_sample_rate *
                      static_cast<double>(info.num_users) *
                      static_cast<double>(info.num_items)));
  const std::size_t pairs_per_batch = static_cast<std::size_t>(
      (pairs_per_epoch + static_cast<std::int64_t>(num_batches) - 1) /
      static_cast<std::int64_t>(num_batches));

  GradBuffer grad(model);
  MetaGradWorkspace meta_ws(model);
  std::vector<std::size_t> order(split.train_biased.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<MetaExample> batch;
  batch.reserve(hp.batch_size);
  std::vector<MetaPair> pairs;
  pairs.reserve(pairs_per_batch);

  EarlyStopper stopper(hp.patience);
  MfModel best_model = model;
  MetaWeights best_meta = meta;
  TrainReport report;

  for (std::int32_t epoch = 1; epoch <= hp.max_epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    std::int64_t batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += hp.batch_size) {
      const std::size_t end = std::min(
          order.size(), start + static_cast<std::size_t>(hp.batch_size));
      batch.clear();
      for (std::size_t pos = start; pos < end; ++pos) {
        const Interaction& it = split.train_biased[order[pos]];
        batch.push_back({it.user, it.item, it.rating});
      }
      pairs.clear();
      for (std::size_t n = 0; n < pairs_per_batch; ++n) {
        pairs.push_back(
            {static_cast<std::int32_t>(rng.uniform_below(info.num_users)),
             static_cast<std::int32_t>(rng.uniform_below(info.num_items))});
      }

      // Meta update through the one-step dependence of the tentative
      // model step on the meta parameters.
      if (hp.meta_learning_rate != 0.0) {
        const MetaGrad mg = autodebias_meta_grad(
            model, meta, batch, pairs, split.uniform, hp.imputation_weight,
            hp.l2_reg, hp.learning_rate, meta_ws);
        axpy_vec(-hp.meta_learning_rate, mg.phi1, meta.phi1);
        axpy_vec(-hp.meta_learning_rate, mg.phi2, meta.phi2);
        axpy_vec(-hp.meta_learning_rate, mg.m, meta.m);
      }

      // Committed model step under the updated meta parameters.
      loss_sum += add_autodebias_theta_grad(
          model, meta, batch, pairs, hp.imputation_weight, hp.l2_reg, grad);
      grad.apply_step(model, hp.learning_rate);
      grad.reset();
      ++batches;
    }
    internal::check_finite(model, "train_autodebias");

    const double val_auc =
        internal::validation_auc(model, split.validation, info.kind);
    report.loss_curve.push_back(
        {epoch, loss_sum / static_cast<double>(batches), val_auc});
    report.epochs_run = epoch;
    if (stopper.observe(epoch, val_auc)) {
      best_model = model;
      best_meta = meta;
    }
    if (stopper.should_stop(epoch)) break;
  }

  report.best_validation_auc = stopper.best_auc();
  report.wall_time_seconds = timer.seconds();
  return AutoDebiasResult{std::move(best_model), std::move(best_meta),
                          std::move(report)};
}

}  // namespace recdebias
