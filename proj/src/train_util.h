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

// Internal helpers shared by the trainer translation units.

#ifndef RECDEBIAS_SRC_TRAIN_UTIL_H_
#define RECDEBIAS_SRC_TRAIN_UTIL_H_

#include <chrono>
#include <span>
#include <stdexcept>

#include "recdebias/data.h"
#include "recdebias/metrics.h"
#include "recdebias/model.h"
#include "recdebias/rng.h"
#include "recdebias/train.h"

namespace recdebias::internal {

// Factors uniform in (-0.01, 0.01) under the run seed (user table first,
// then items), zero biases, global bias at the training-source mean. The
// small symmetric init keeps early predictions inside the rating clamp.
inline MfModel init_model(const DatasetInfo& info, const HyperParams& hp,
                          Rng& rng, std::span<const Interaction> train) {
  MfModel model = make_model(info.num_users, info.num_items, hp.latent_dim,
                             info.rating_min, info.rating_max);
  for (double& x : model.user_factors) x = rng.uniform(-0.01, 0.01);
  for (double& x : model.item_factors) x = rng.uniform(-0.01, 0.01);
  double mean = 0.0;
  for (const Interaction& it : train) mean += it.rating;
  model.global_bias = mean / static_cast<double>(train.size());
  return model;
}

// Validation AUC for the epoch gate. An empty or single-class validation
// set carries no ranking signal, so it scores a constant 0.5 and the
// stopper never fires.
inline double validation_auc(const MfModel& model,
                             std::span<const Interaction> validation,
                             FeedbackKind kind) {
  if (validation.empty()) return 0.5;
  try {
    return auc_on_interactions(model, validation, kind);
  } catch (const std::invalid_argument&) {
    return 0.5;
  }
}

// Epoch gate on validation AUC. Ties refresh the snapshot, so a flat curve
// keeps training alive for the full epoch budget.
class EarlyStopper {
 public:
  explicit EarlyStopper(std::int32_t patience) : patience_(patience) {}

  // Returns true when the caller should snapshot the current state.
  bool observe(std::int32_t epoch, double auc) {
    if (auc >= best_auc_) {
      best_auc_ = auc;
      best_epoch_ = epoch;
      return true;
    }
    return false;
  }

  bool should_stop(std::int32_t epoch) const {
    return epoch - best_epoch_ >= patience_;
  }

  double best_auc() const { return best_auc_; }

 private:
  std::int32_t patience_;
  std::int32_t best_epoch_ = 0;
  double best_auc_ = -1.0;
};

class WallTimer {
 public:
  WallTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline void check_finite(const MfModel& model, const char* trainer) {
  if (!all_finite(model))
    throw std::runtime_error(std::string(trainer) +
                             ": parameters diverged (non-finite values); "
                             "lower the learning rate");
}

}  // namespace recdebias::internal

#endif  // RECDEBIAS_SRC_TRAIN_UTIL_H_
