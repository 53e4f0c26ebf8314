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

#include "recdebias/losses.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include "recdebias/kernels.h"

namespace recdebias {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double raw_score(const MfModel& model, std::int32_t u, std::int32_t i) {
  return model.global_bias + model.user_bias[u] + model.item_bias[i] +
         kernels::dot(model.user_row(u), model.item_row(i), model.latent_dim);
}

// Squared norm of the parameters touched by a set of (user, item) pairs:
// the affected factor rows, their biases, and the global bias.
class TouchedNorm {
 public:
  explicit TouchedNorm(const MfModel& model)
      : model_(model),
        user_seen_(model.num_users, 0),
        item_seen_(model.num_items, 0) {}

  void add(std::int32_t u, std::int32_t i) {
    if (!user_seen_[u]) {
      user_seen_[u] = 1;
      const double* row = model_.user_row(u);
      norm_ += kernels::dot(row, row, model_.latent_dim);
      norm_ += model_.user_bias[u] * model_.user_bias[u];
    }
    if (!item_seen_[i]) {
      item_seen_[i] = 1;
      const double* row = model_.item_row(i);
      norm_ += kernels::dot(row, row, model_.latent_dim);
      norm_ += model_.item_bias[i] * model_.item_bias[i];
    }
  }

  double value() const {
    return norm_ + model_.global_bias * model_.global_bias;
  }

 private:
  const MfModel& model_;
  std::vector<std::uint8_t> user_seen_, item_seen_;
  double norm_ = 0.0;
};

}  // namespace

GradBuffer::GradBuffer(const MfModel& shape)
    : dim_(shape.latent_dim),
      user_factors_(shape.user_factors.size(), 0.0),
      item_factors_(shape.item_factors.size(), 0.0),
      user_bias_(shape.user_bias.size(), 0.0),
      item_bias_(shape.item_bias.size(), 0.0),
      user_mark_(shape.user_bias.size(), 0),
      item_mark_(shape.item_bias.size(), 0) {}

void GradBuffer::touch_user(std::int32_t u) {
  if (!user_mark_[u]) {
    user_mark_[u] = 1;
    touched_users_.push_back(u);
  }
}

void GradBuffer::touch_item(std::int32_t i) {
  if (!item_mark_[i]) {
    item_mark_[i] = 1;
    touched_items_.push_back(i);
  }
}

void GradBuffer::apply_step(MfModel& model, double step) const {
  for (std::int32_t u : touched_users_) {
    kernels::axpy(-step, user_factors_.data() + u * dim_, model.user_row(u),
                  dim_);
    model.user_bias[u] -= step * user_bias_[u];
  }
  for (std::int32_t i : touched_items_) {
    kernels::axpy(-step, item_factors_.data() + i * dim_, model.item_row(i),
                  dim_);
    model.item_bias[i] -= step * item_bias_[i];
  }
  model.global_bias -= step * global_;
}

void GradBuffer::reset() {
  for (std::int32_t u : touched_users_) {
    std::memset(user_factors_.data() + u * dim_, 0, sizeof(double) * dim_);
    user_bias_[u] = 0.0;
    user_mark_[u] = 0;
  }
  for (std::int32_t i : touched_items_) {
    std::memset(item_factors_.data() + i * dim_, 0, sizeof(double) * dim_);
    item_bias_[i] = 0.0;
    item_mark_[i] = 0;
  }
  touched_users_.clear();
  touched_items_.clear();
  global_ = 0.0;
}

MfModel GradBuffer::as_dense(const MfModel& shape) const {
  MfModel dense = make_model(shape.num_users, shape.num_items,
                             shape.latent_dim, shape.rating_min,
                             shape.rating_max);
  dense.global_bias = global_;
  dense.user_factors = user_factors_;
  dense.item_factors = item_factors_;
  dense.user_bias = user_bias_;
  dense.item_bias = item_bias_;
  return dense;
}

double weighted_loss(const MfModel& model,
                     std::span<const WeightedExample> batch, double l2) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  double sum = 0.0;
  TouchedNorm touched(model);
  for (const WeightedExample& ex : batch) {
    const double err = raw_score(model, ex.user, ex.item) - ex.rating;
    sum += ex.weight * err * err;
    touched.add(ex.user, ex.item);
  }
  return sum / static_cast<double>(batch.size()) + l2 * touched.value();
}

namespace {

// Shared tail: L2 gradient over the rows this batch touched. Requires the
// buffer to have been reset before the data pass. Returns the touched
// squared norm so callers can report the full batch loss.
double add_touched_l2_grad(const MfModel& model, double l2, GradBuffer& grad) {
  double norm = model.global_bias * model.global_bias;
  for (std::int32_t u : grad.touched_users()) {
    const double* row = model.user_row(u);
    norm += kernels::dot(row, row, model.latent_dim) +
            model.user_bias[u] * model.user_bias[u];
    if (l2 != 0.0) {
      kernels::axpy(2.0 * l2, row, grad.user_row(u), model.latent_dim);
      grad.user_bias(u) += 2.0 * l2 * model.user_bias[u];
    }
  }
  for (std::int32_t i : grad.touched_items()) {
    const double* row = model.item_row(i);
    norm += kernels::dot(row, row, model.latent_dim) +
            model.item_bias[i] * model.item_bias[i];
    if (l2 != 0.0) {
      kernels::axpy(2.0 * l2, row, grad.item_row(i), model.latent_dim);
      grad.item_bias(i) += 2.0 * l2 * model.item_bias[i];
    }
  }
  if (l2 != 0.0) grad.global() += 2.0 * l2 * model.global_bias;
  return norm;
}

void add_score_grad(const MfModel& model, std::int32_t u, std::int32_t i,
                    double coef, GradBuffer& grad) {
  grad.touch_user(u);
  grad.touch_item(i);
  kernels::axpy(coef, model.item_row(i), grad.user_row(u), model.latent_dim);
  kernels::axpy(coef, model.user_row(u), grad.item_row(i), model.latent_dim);
  grad.user_bias(u) += coef;
  grad.item_bias(i) += coef;
  grad.global() += coef;
}

}  // namespace

double add_weighted_loss_grad(const MfModel& model,
                              std::span<const WeightedExample> batch,
                              double l2, GradBuffer& grad) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const double inv = 1.0 / static_cast<double>(batch.size());
  double sum = 0.0;
  for (const WeightedExample& ex : batch) {
    const double err = raw_score(model, ex.user, ex.item) - ex.rating;
    sum += ex.weight * err * err;
    add_score_grad(model, ex.user, ex.item, 2.0 * ex.weight * err * inv, grad);
  }
  return sum * inv + l2 * add_touched_l2_grad(model, l2, grad);
}

double ImputationModel::imputed(std::int32_t item) const {
  return std::clamp(imputed_raw(item), rating_min, rating_max);
}

ImputationGrad::ImputationGrad(const ImputationModel& shape)
    : item_offset_(shape.item_offset.size(), 0.0),
      mark_(shape.item_offset.size(), 0) {}

void ImputationGrad::touch_item(std::int32_t i) {
  if (!mark_[i]) {
    mark_[i] = 1;
    touched_.push_back(i);
  }
}

void ImputationGrad::apply_step(ImputationModel& imp, double step) const {
  for (std::int32_t i : touched_) imp.item_offset[i] -= step * item_offset_[i];
  imp.global -= step * global_;
}

void ImputationGrad::reset() {
  for (std::int32_t i : touched_) {
    item_offset_[i] = 0.0;
    mark_[i] = 0;
  }
  touched_.clear();
  global_ = 0.0;
}

double dr_imputation_loss(const MfModel& model, const ImputationModel& imp,
                          std::span<const WeightedExample> observed,
                          std::span<const Interaction> uniform) {
  if (observed.empty()) throw std::invalid_argument("empty observed batch");
  double sum = 0.0;
  for (const WeightedExample& ex : observed) {
    const double s = raw_score(model, ex.user, ex.item);
    const double e = (s - ex.rating) * (s - ex.rating);
    const double rt = imp.imputed_raw(ex.item);
    const double ehat = (s - rt) * (s - rt);
    sum += ex.weight * (e - ehat) * (e - ehat);
  }
  double loss = sum / static_cast<double>(observed.size());
  if (!uniform.empty()) {
    double sup = 0.0;
    for (const Interaction& it : uniform) {
      const double d = imp.imputed_raw(it.item) - it.rating;
      sup += d * d;
    }
    loss += sup / static_cast<double>(uniform.size());
  }
  return loss;
}

double add_dr_imputation_grad(const MfModel& model, const ImputationModel& imp,
                              std::span<const WeightedExample> observed,
                              std::span<const Interaction> uniform,
                              ImputationGrad& grad) {
  if (observed.empty()) throw std::invalid_argument("empty observed batch");
  const double inv = 1.0 / static_cast<double>(observed.size());
  double sum = 0.0;
  for (const WeightedExample& ex : observed) {
    const double s = raw_score(model, ex.user, ex.item);
    const double e = (s - ex.rating) * (s - ex.rating);
    const double rt = imp.imputed_raw(ex.item);
    const double ehat = (s - rt) * (s - rt);
    sum += ex.weight * (e - ehat) * (e - ehat);
    // d/d rtilde of w (e - ehat)^2 = 4 w (e - ehat) (s - rtilde)
    const double coef = 4.0 * ex.weight * (e - ehat) * (s - rt) * inv;
    grad.touch_item(ex.item);
    grad.item_offset(ex.item) += coef;
    grad.global() += coef;
  }
  double loss = sum * inv;
  if (!uniform.empty()) {
    const double invu = 1.0 / static_cast<double>(uniform.size());
    double sup = 0.0;
    for (const Interaction& it : uniform) {
      const double d = imp.imputed_raw(it.item) - it.rating;
      sup += d * d;
      const double coef = 2.0 * d * invu;
      grad.touch_item(it.item);
      grad.item_offset(it.item) += coef;
      grad.global() += coef;
    }
    loss += sup * invu;
  }
  return loss;
}

double dr_risk(const MfModel& model, const ImputationModel& imp,
               std::span<const DrPair> pairs) {
  if (pairs.empty()) throw std::invalid_argument("empty pair sample");
  double sum = 0.0;
  for (const DrPair& p : pairs) {
    const double s = raw_score(model, p.user, p.item);
    const double rt = imp.imputed_raw(p.item);
    const double ehat = (s - rt) * (s - rt);
    sum += ehat;
    if (p.observed) {
      const double e = (s - p.rating) * (s - p.rating);
      sum += (e - ehat) * p.inv_propensity;
    }
  }
  return sum / static_cast<double>(pairs.size());
}

double dr_prediction_loss(const MfModel& model, const ImputationModel& imp,
                          std::span<const DrPair> pairs,
                          double imputation_weight, double l2) {
  if (pairs.empty()) throw std::invalid_argument("empty pair sample");
  double sum = 0.0;
  TouchedNorm touched(model);
  for (const DrPair& p : pairs) {
    const double s = raw_score(model, p.user, p.item);
    const double rt = imp.imputed_raw(p.item);
    const double ehat = (s - rt) * (s - rt);
    sum += imputation_weight * ehat;
    if (p.observed) {
      const double e = (s - p.rating) * (s - p.rating);
      sum += (e - ehat) * p.inv_propensity;
    }
    touched.add(p.user, p.item);
  }
  return sum / static_cast<double>(pairs.size()) + l2 * touched.value();
}

double add_dr_prediction_grad(const MfModel& model, const ImputationModel& imp,
                              std::span<const DrPair> pairs,
                              double imputation_weight, double l2,
                              GradBuffer& grad) {
  if (pairs.empty()) throw std::invalid_argument("empty pair sample");
  const double inv = 1.0 / static_cast<double>(pairs.size());
  double sum = 0.0;
  for (const DrPair& p : pairs) {
    const double s = raw_score(model, p.user, p.item);
    const double rt = imp.imputed_raw(p.item);
    const double ehat = (s - rt) * (s - rt);
    sum += imputation_weight * ehat;
    double coef = imputation_weight * 2.0 * (s - rt);
    if (p.observed) {
      const double e = (s - p.rating) * (s - p.rating);
      sum += (e - ehat) * p.inv_propensity;
      coef += p.inv_propensity * (2.0 * (s - p.rating) - 2.0 * (s - rt));
    }
    add_score_grad(model, p.user, p.item, coef * inv, grad);
  }
  return sum * inv + l2 * add_touched_l2_grad(model, l2, grad);
}

MetaFeatures make_meta_features(std::span<const Interaction> train_biased,
                                std::int32_t num_users,
                                std::int32_t num_items) {
  MetaFeatures features;
  std::vector<std::int64_t> user_count(num_users, 0), item_count(num_items, 0);
  std::vector<double> ratings;
  for (const Interaction& it : train_biased) {
    ++user_count[it.user];
    ++item_count[it.item];
    ratings.push_back(it.rating);
  }
  std::sort(ratings.begin(), ratings.end());
  ratings.erase(std::unique(ratings.begin(), ratings.end()), ratings.end());
  features.rating_values = std::move(ratings);

  // Rank-based quintiles (count ties broken by id) so buckets stay
  // balanced whatever the count distribution looks like.
  const auto bucketize = [](const std::vector<std::int64_t>& counts) {
    std::vector<std::int32_t> order(counts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
      if (counts[a] != counts[b]) return counts[a] < counts[b];
      return a < b;
    });
    std::vector<std::int8_t> bucket(counts.size(), 0);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      bucket[order[pos]] = static_cast<std::int8_t>(
          (pos * kMetaBuckets) / order.size());
    }
    return bucket;
  };
  features.user_bucket = bucketize(user_count);
  features.item_bucket = bucketize(item_count);
  return features;
}

MetaWeights make_meta_weights(MetaFeatures features, double rating_min,
                              double rating_max) {
  MetaWeights meta;
  meta.rating_min = rating_min;
  meta.rating_max = rating_max;
  meta.phi1.assign(2 * kMetaBuckets + features.rating_values.size(), 0.0);
  meta.phi2.assign(2 * kMetaBuckets, 0.0);
  meta.m.assign(2 * kMetaBuckets, 0.0);
  meta.features = std::move(features);
  return meta;
}

namespace {

std::size_t rating_index(const MetaFeatures& features, double rating) {
  const auto pos = std::lower_bound(features.rating_values.begin(),
                                    features.rating_values.end(), rating);
  if (pos == features.rating_values.end() || *pos != rating)
    throw std::out_of_range("rating value outside the meta-feature table");
  return static_cast<std::size_t>(pos - features.rating_values.begin());
}

}  // namespace

double MetaWeights::w1(std::int32_t user, std::int32_t item,
                       double rating) const {
  const double z = phi1[features.user_bucket[user]] +
                   phi1[kMetaBuckets + features.item_bucket[item]] +
                   phi1[2 * kMetaBuckets + rating_index(features, rating)];
  return std::exp(z);
}

double MetaWeights::w2(std::int32_t user, std::int32_t item) const {
  return std::exp(phi2[features.user_bucket[user]] +
                  phi2[kMetaBuckets + features.item_bucket[item]]);
}

double MetaWeights::pseudo_label(std::int32_t user, std::int32_t item) const {
  const double z = m[features.user_bucket[user]] +
                   m[kMetaBuckets + features.item_bucket[item]];
  return rating_min + (rating_max - rating_min) * sigmoid(z);
}

double autodebias_theta_loss(const MfModel& model, const MetaWeights& meta,
                             std::span<const MetaExample> batch,
                             std::span<const MetaPair> pairs,
                             double imputation_weight, double l2) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  TouchedNorm touched(model);
  double sum = 0.0;
  for (const MetaExample& ex : batch) {
    const double err = raw_score(model, ex.user, ex.item) - ex.rating;
    sum += meta.w1(ex.user, ex.item, ex.rating) * err * err;
    touched.add(ex.user, ex.item);
  }
  double loss = sum / static_cast<double>(batch.size());
  if (!pairs.empty()) {
    double imp = 0.0;
    for (const MetaPair& p : pairs) {
      const double err = raw_score(model, p.user, p.item) -
                         meta.pseudo_label(p.user, p.item);
      imp += meta.w2(p.user, p.item) * err * err;
      touched.add(p.user, p.item);
    }
    loss += imputation_weight * imp / static_cast<double>(pairs.size());
  }
  return loss + l2 * touched.value();
}

double add_autodebias_theta_grad(const MfModel& model, const MetaWeights& meta,
                                 std::span<const MetaExample> batch,
                                 std::span<const MetaPair> pairs,
                                 double imputation_weight, double l2,
                                 GradBuffer& grad) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const double inv = 1.0 / static_cast<double>(batch.size());
  double sum = 0.0;
  for (const MetaExample& ex : batch) {
    const double err = raw_score(model, ex.user, ex.item) - ex.rating;
    const double w = meta.w1(ex.user, ex.item, ex.rating);
    sum += w * err * err;
    add_score_grad(model, ex.user, ex.item, 2.0 * w * err * inv, grad);
  }
  double loss = sum * inv;
  if (!pairs.empty()) {
    const double invp = imputation_weight / static_cast<double>(pairs.size());
    double imp = 0.0;
    for (const MetaPair& p : pairs) {
      const double err = raw_score(model, p.user, p.item) -
                         meta.pseudo_label(p.user, p.item);
      const double w = meta.w2(p.user, p.item);
      imp += w * err * err;
      add_score_grad(model, p.user, p.item, 2.0 * w * err * invp, grad);
    }
    loss += imputation_weight * imp / static_cast<double>(pairs.size());
  }
  return loss + l2 * add_touched_l2_grad(model, l2, grad);
}

double mean_sq_loss(const MfModel& model,
                    std::span<const Interaction> interactions) {
  if (interactions.empty()) throw std::invalid_argument("empty interactions");
  double sum = 0.0;
  for (const Interaction& it : interactions) {
    const double err = raw_score(model, it.user, it.item) - it.rating;
    sum += err * err;
  }
  return sum / static_cast<double>(interactions.size());
}

double autodebias_unrolled_objective(const MfModel& model,
                                     const MetaWeights& meta,
                                     std::span<const MetaExample> batch,
                                     std::span<const MetaPair> pairs,
                                     std::span<const Interaction> uniform,
                                     double imputation_weight, double l2,
                                     double learning_rate) {
  MfModel tentative = model;
  GradBuffer grad(model);
  add_autodebias_theta_grad(model, meta, batch, pairs, imputation_weight, l2,
                            grad);
  grad.apply_step(tentative, learning_rate);
  return mean_sq_loss(tentative, uniform);
}

MetaGrad autodebias_meta_grad(MfModel& model, const MetaWeights& meta,
                              std::span<const MetaExample> batch,
                              std::span<const MetaPair> pairs,
                              std::span<const Interaction> uniform,
                              double imputation_weight, double l2,
                              double learning_rate, MetaGradWorkspace& ws) {
  if (uniform.empty()) throw std::invalid_argument("empty uniform sample");

  // Tentative step applied in place (touched rows are snapshotted and put
  // back verbatim), then the uniform-loss gradient v at the stepped
  // parameters. The meta gradient is the mixed second derivative of L_T
  // contracted with v, scaled by -learning_rate.
  ws.theta_grad.reset();
  ws.v.reset();
  add_autodebias_theta_grad(model, meta, batch, pairs, imputation_weight, l2,
                            ws.theta_grad);

  const std::int32_t dim = model.latent_dim;
  const auto tu = ws.theta_grad.touched_users();
  const auto ti = ws.theta_grad.touched_items();
  ws.saved_user_rows.resize(tu.size() * dim);
  ws.saved_item_rows.resize(ti.size() * dim);
  ws.saved_user_bias.resize(tu.size());
  ws.saved_item_bias.resize(ti.size());
  for (std::size_t n = 0; n < tu.size(); ++n) {
    std::copy_n(model.user_row(tu[n]), dim, ws.saved_user_rows.data() + n * dim);
    ws.saved_user_bias[n] = model.user_bias[tu[n]];
  }
  for (std::size_t n = 0; n < ti.size(); ++n) {
    std::copy_n(model.item_row(ti[n]), dim, ws.saved_item_rows.data() + n * dim);
    ws.saved_item_bias[n] = model.item_bias[ti[n]];
  }
  const double saved_global = model.global_bias;

  ws.theta_grad.apply_step(model, learning_rate);

  GradBuffer& v = ws.v;
  const double invu = 1.0 / static_cast<double>(uniform.size());
  for (const Interaction& it : uniform) {
    const double err = raw_score(model, it.user, it.item) - it.rating;
    add_score_grad(model, it.user, it.item, 2.0 * err * invu, v);
  }

  for (std::size_t n = 0; n < tu.size(); ++n) {
    std::copy_n(ws.saved_user_rows.data() + n * dim, dim, model.user_row(tu[n]));
    model.user_bias[tu[n]] = ws.saved_user_bias[n];
  }
  for (std::size_t n = 0; n < ti.size(); ++n) {
    std::copy_n(ws.saved_item_rows.data() + n * dim, dim, model.item_row(ti[n]));
    model.item_bias[ti[n]] = ws.saved_item_bias[n];
  }
  model.global_bias = saved_global;

  const auto score_dot_v = [&](std::int32_t u, std::int32_t i) {
    return v.global() + v.user_bias(u) + v.item_bias(i) +
           kernels::dot(v.user_row(u), model.item_row(i), model.latent_dim) +
           kernels::dot(model.user_row(u), v.item_row(i), model.latent_dim);
  };

  MetaGrad g;
  g.phi1.assign(meta.phi1.size(), 0.0);
  g.phi2.assign(meta.phi2.size(), 0.0);
  g.m.assign(meta.m.size(), 0.0);

  const double binv = 1.0 / static_cast<double>(batch.size());
  for (const MetaExample& ex : batch) {
    const double err = raw_score(model, ex.user, ex.item) - ex.rating;
    const double w = meta.w1(ex.user, ex.item, ex.rating);
    // d(grad_theta L_T)/d phi1 = (w1 x) outer grad_theta e
    const double contrib = -learning_rate * binv * w * 2.0 * err *
                           score_dot_v(ex.user, ex.item);
    g.phi1[meta.features.user_bucket[ex.user]] += contrib;
    g.phi1[kMetaBuckets + meta.features.item_bucket[ex.item]] += contrib;
    g.phi1[2 * kMetaBuckets + rating_index(meta.features, ex.rating)] +=
        contrib;
  }

  if (!pairs.empty()) {
    const double pinv =
        imputation_weight / static_cast<double>(pairs.size());
    for (const MetaPair& p : pairs) {
      const double label = meta.pseudo_label(p.user, p.item);
      const double err = raw_score(model, p.user, p.item) - label;
      const double w = meta.w2(p.user, p.item);
      const double sv = score_dot_v(p.user, p.item);

      const double phi2_contrib = -learning_rate * pinv * w * 2.0 * err * sv;
      const std::size_t ub = meta.features.user_bucket[p.user];
      const std::size_t ib = kMetaBuckets + meta.features.item_bucket[p.item];
      g.phi2[ub] += phi2_contrib;
      g.phi2[ib] += phi2_contrib;

      // d(grad_theta c)/d m = -2 (d pseudo_label / d m) grad_theta score
      const double z = meta.m[ub] + meta.m[ib];
      const double sig = sigmoid(z);
      const double dlabel =
          (meta.rating_max - meta.rating_min) * sig * (1.0 - sig);
      const double m_contrib =
          2.0 * learning_rate * pinv * w * dlabel * sv;
      g.m[ub] += m_contrib;
      g.m[ib] += m_contrib;
    }
  }
  return g;
}

}  // namespace recdebias
