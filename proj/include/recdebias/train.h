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

#ifndef RECDEBIAS_TRAIN_H_
#define RECDEBIAS_TRAIN_H_

#include <cstdint>
#include <string>
#include <vector>

#include "recdebias/data.h"
#include "recdebias/losses.h"
#include "recdebias/model.h"
#include "recdebias/propensity.h"

namespace recdebias {

struct HyperParams {
  std::int32_t latent_dim = 16;
  double learning_rate = 0.05;
  double l2_reg = 1e-4;
  std::int32_t batch_size = 128;
  std::int32_t max_epochs = 200;
  std::int32_t patience = 10;        // epochs without validation improvement
  double propensity_floor = 0.05;    // in (0,1]
  double propensity_power = 1.0;     // >= 0
  double imputation_learning_rate = 0.05;
  double meta_learning_rate = 0.05;
  double imputation_weight = 1.0;    // scale of the sampled all-pairs term
  double all_pairs_sample_rate = 0.05;  // in (0,1]
};

// Throws std::invalid_argument naming the first bad field.
void validate_hyperparams(const HyperParams& hp);

struct TrainReport {
  struct CurvePoint {
    std::int32_t epoch = 0;
    double train_loss = 0.0;
    double validation_auc = 0.0;
  };
  std::int32_t epochs_run = 0;
  double best_validation_auc = 0.0;
  double wall_time_seconds = 0.0;
  std::vector<CurvePoint> loss_curve;
};

// Shape and scale information shared by every trainer.
struct DatasetInfo {
  std::int32_t num_users = 0;
  std::int32_t num_items = 0;
  FeedbackKind kind = FeedbackKind::kExplicit;
  double rating_min = 0.0;
  double rating_max = 0.0;
};

// Merges and cross-checks the biased/randomized halves of a dataset.
DatasetInfo dataset_info(const Dataset& biased, const Dataset& randomized);

enum class TrainingSource { kBiased, kUniform };

struct MfResult {
  MfModel model;
  TrainReport report;
};

// Plain matrix factorization by mini-batch SGD over the chosen source,
// early-stopped on validation AUC. Deterministic under `seed`.
MfResult train_mf(const DatasetInfo& info, const DataSplit& split,
                  const HyperParams& hp, std::uint64_t seed,
                  TrainingSource source);

// Inverse-propensity-scored training: each biased example's loss is
// weighted by 1 / p(item, rating). With unit propensities this follows the
// exact same arithmetic as train_mf on the biased source.
MfResult train_ips(const DatasetInfo& info, const DataSplit& split,
                   const HyperParams& hp, std::uint64_t seed,
                   const Propensities& props);

struct DrResult {
  MfModel model;
  ImputationModel imputation;
  TrainReport report;
};

// Doubly robust joint learning: per epoch an imputation step fits the
// error model on the inverse-weighted biased log plus the uniform sample,
// then a prediction step descends the sampled doubly robust risk.
DrResult train_dr(const DatasetInfo& info, const DataSplit& split,
                  const HyperParams& hp, std::uint64_t seed,
                  const Propensities& props);

struct AutoDebiasResult {
  MfModel model;
  MetaWeights meta;
  TrainReport report;
};

// Bi-level meta-weighted training: per batch a tentative model step under
// the current meta parameters, a meta update through the one-step
// dependence against the uniform-data loss, then the committed model step
// under the new meta parameters.
AutoDebiasResult train_autodebias(const DatasetInfo& info,
                                  const DataSplit& split,
                                  const HyperParams& hp, std::uint64_t seed);

// Convenience wrapper matching the trainer inputs.
Propensities estimate_propensities(const DatasetInfo& info,
                                   const DataSplit& split,
                                   PropensityMethod method,
                                   const HyperParams& hp);

// Versioned text checkpoint of a trained model: hyperparameters, seed, and
// every parameter block with round-trip-exact number formatting, so a
// reload predicts identically.
struct Checkpoint {
  std::string model_tag;
  std::uint64_t seed = 0;
  HyperParams hp;
  MfModel model;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace recdebias

#endif  // RECDEBIAS_TRAIN_H_
