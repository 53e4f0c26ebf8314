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

// Batch losses and their analytic gradients for the four trainers. Every
// function here is a pure map from (parameters, batch) to a value or a
// gradient, which is what the finite-difference checks exercise. Losses use
// the unclamped score so they stay differentiable; clamping is applied at
// prediction time only. The L2 term covers the parameters the batch
// touches (the affected factor rows, their biases, and the global bias).

#ifndef RECDEBIAS_LOSSES_H_
#define RECDEBIAS_LOSSES_H_

#include <cstdint>
#include <span>
#include <vector>

#include "recdebias/data.h"
#include "recdebias/model.h"

namespace recdebias {

// One training example with its loss weight (1 for plain MF, 1/propensity
// for IPS, inverse propensity for the DR imputation step).
struct WeightedExample {
  std::int32_t user = 0;
  std::int32_t item = 0;
  double rating = 0.0;
  double weight = 1.0;
};

// Sparse gradient accumulator shaped like an MfModel. Only rows touched
// since the last reset are stored, applied, and re-zeroed, which keeps a
// batch step O(batch * latent_dim) regardless of model size.
class GradBuffer {
 public:
  explicit GradBuffer(const MfModel& shape);

  void touch_user(std::int32_t u);
  void touch_item(std::int32_t i);

  double* user_row(std::int32_t u) { return user_factors_.data() + u * dim_; }
  double* item_row(std::int32_t i) { return item_factors_.data() + i * dim_; }
  double& user_bias(std::int32_t u) { return user_bias_[u]; }
  double& item_bias(std::int32_t i) { return item_bias_[i]; }
  double& global() { return global_; }

  std::span<const std::int32_t> touched_users() const { return touched_users_; }
  std::span<const std::int32_t> touched_items() const { return touched_items_; }

  // theta -= step * grad over the touched rows.
  void apply_step(MfModel& model, double step) const;

  // Zeroes the touched entries and clears the touch lists.
  void reset();

  // Dense copy for tests; scale metadata is taken from `shape`.
  MfModel as_dense(const MfModel& shape) const;

 private:
  std::int32_t dim_;
  double global_ = 0.0;
  std::vector<double> user_factors_, item_factors_;
  std::vector<double> user_bias_, item_bias_;
  std::vector<std::int32_t> touched_users_, touched_items_;
  std::vector<std::uint8_t> user_mark_, item_mark_;
};

// mean_j weight_j * (score(u_j,i_j) - rating_j)^2 + l2 * ||touched params||^2
double weighted_loss(const MfModel& model,
                     std::span<const WeightedExample> batch, double l2);

// Accumulates the gradient into a freshly reset buffer and returns the
// batch loss (same for the other add_*_grad functions).
double add_weighted_loss_grad(const MfModel& model,
                              std::span<const WeightedExample> batch,
                              double l2, GradBuffer& grad);

// Rating imputation: a global level plus a per-item offset, clamped to the
// rating scale when read as a rating (the losses use the raw value).
struct ImputationModel {
  double global = 0.0;
  std::vector<double> item_offset;
  double rating_min = 0.0;
  double rating_max = 0.0;

  double imputed_raw(std::int32_t item) const {
    return global + item_offset[item];
  }
  double imputed(std::int32_t item) const;
};

// Sparse gradient for the imputation parameters.
class ImputationGrad {
 public:
  explicit ImputationGrad(const ImputationModel& shape);
  void touch_item(std::int32_t i);
  double& item_offset(std::int32_t i) { return item_offset_[i]; }
  double& global() { return global_; }
  void apply_step(ImputationModel& imp, double step) const;
  void reset();

 private:
  double global_ = 0.0;
  std::vector<double> item_offset_;
  std::vector<std::int32_t> touched_;
  std::vector<std::uint8_t> mark_;
};

// Imputation step objective. `observed` carries weight = 1/propensity:
//   mean_j w_j * (e_j - ehat_j)^2 + mean_{d_u} (rtilde - rating)^2
// with e = (score - rating)^2 and ehat = (score - rtilde)^2.
double dr_imputation_loss(const MfModel& model, const ImputationModel& imp,
                          std::span<const WeightedExample> observed,
                          std::span<const Interaction> uniform);
double add_dr_imputation_grad(const MfModel& model, const ImputationModel& imp,
                              std::span<const WeightedExample> observed,
                              std::span<const Interaction> uniform,
                              ImputationGrad& grad);

// One sampled pair for the doubly robust risk. rating and inv_propensity
// are only meaningful when the pair is observed in the biased log.
struct DrPair {
  std::int32_t user = 0;
  std::int32_t item = 0;
  bool observed = false;
  double rating = 0.0;
  double inv_propensity = 0.0;
};

// The doubly robust risk estimate over a sample of pairs:
//   mean_p [ ehat_p + o_p * (e_p - ehat_p) * inv_propensity_p ]
double dr_risk(const MfModel& model, const ImputationModel& imp,
               std::span<const DrPair> pairs);

// Prediction step objective: the sampled risk with the imputation term
// scaled, plus the touched L2:
//   mean_p [ iw * ehat_p + o_p * (e_p - ehat_p) * invp_p ] + l2 * touched
double dr_prediction_loss(const MfModel& model, const ImputationModel& imp,
                          std::span<const DrPair> pairs,
                          double imputation_weight, double l2);
double add_dr_prediction_grad(const MfModel& model, const ImputationModel& imp,
                              std::span<const DrPair> pairs,
                              double imputation_weight, double l2,
                              GradBuffer& grad);

// Meta features for the auto-debiasing weights: quintile of user activity
// and item popularity in the biased log, plus a one-hot over the distinct
// observed rating values.
struct MetaFeatures {
  std::vector<std::int8_t> user_bucket;   // per user, 0..4
  std::vector<std::int8_t> item_bucket;   // per item, 0..4
  std::vector<double> rating_values;      // sorted, from the biased log
};

MetaFeatures make_meta_features(std::span<const Interaction> train_biased,
                                std::int32_t num_users, std::int32_t num_items);

inline constexpr int kMetaBuckets = 5;

// The meta parameters: exponential-linear weights over the features and a
// sigmoid pseudo-label head.
//   w1(u,i,r) = exp(phi1 . [user one-hot ; item one-hot ; rating one-hot])
//   w2(u,i)   = exp(phi2 . [user one-hot ; item one-hot])
//   m(u,i)    = rmin + (rmax - rmin) * sigmoid(m . [user ; item])
struct MetaWeights {
  MetaFeatures features;
  std::vector<double> phi1;  // 2 * kMetaBuckets + |rating_values|
  std::vector<double> phi2;  // 2 * kMetaBuckets
  std::vector<double> m;     // 2 * kMetaBuckets
  double rating_min = 0.0;
  double rating_max = 0.0;

  double w1(std::int32_t user, std::int32_t item, double rating) const;
  double w2(std::int32_t user, std::int32_t item) const;
  double pseudo_label(std::int32_t user, std::int32_t item) const;
};

MetaWeights make_meta_weights(MetaFeatures features, double rating_min,
                              double rating_max);

struct MetaExample {
  std::int32_t user = 0;
  std::int32_t item = 0;
  double rating = 0.0;
};

struct MetaPair {
  std::int32_t user = 0;
  std::int32_t item = 0;
};

// Weighted training objective for the prediction model given frozen meta
// parameters:
//   mean_B w1 * (score - rating)^2
//   + iw * mean_P w2 * (score - pseudo_label)^2 + l2 * touched
double autodebias_theta_loss(const MfModel& model, const MetaWeights& meta,
                             std::span<const MetaExample> batch,
                             std::span<const MetaPair> pairs,
                             double imputation_weight, double l2);
double add_autodebias_theta_grad(const MfModel& model, const MetaWeights& meta,
                                 std::span<const MetaExample> batch,
                                 std::span<const MetaPair> pairs,
                                 double imputation_weight, double l2,
                                 GradBuffer& grad);

// mean squared error of the unclamped score over a set of interactions
// (the uniform-data loss steering the meta update).
double mean_sq_loss(const MfModel& model,
                    std::span<const Interaction> interactions);

struct MetaGrad {
  std::vector<double> phi1, phi2, m;
};

// Reusable scratch for the meta gradient: two model-shaped buffers plus
// row snapshots, allocated once per training run.
struct MetaGradWorkspace {
  explicit MetaGradWorkspace(const MfModel& shape)
      : theta_grad(shape), v(shape) {}
  GradBuffer theta_grad;
  GradBuffer v;
  std::vector<double> saved_user_rows, saved_item_rows;
  std::vector<double> saved_user_bias, saved_item_bias;
};

// Gradient of L_U(theta') with respect to the meta parameters, where
// theta' = theta - lr * grad_theta L_T(theta | phi) is the tentative step
// on this batch. Computed analytically through the one-step dependence.
// The model is stepped in place to evaluate L_U's gradient and restored
// bit for bit before returning.
MetaGrad autodebias_meta_grad(MfModel& model, const MetaWeights& meta,
                              std::span<const MetaExample> batch,
                              std::span<const MetaPair> pairs,
                              std::span<const Interaction> uniform,
                              double imputation_weight, double l2,
                              double learning_rate, MetaGradWorkspace& ws);

// L_U(theta') as a function of the meta parameters; the finite-difference
// oracle for autodebias_meta_grad.
double autodebias_unrolled_objective(const MfModel& model,
                                     const MetaWeights& meta,
                                     std::span<const MetaExample> batch,
                                     std::span<const MetaPair> pairs,
                                     std::span<const Interaction> uniform,
                                     double imputation_weight, double l2,
                                     double learning_rate);

}  // namespace recdebias

#endif  // RECDEBIAS_LOSSES_H_
