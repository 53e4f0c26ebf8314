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

#include "recdebias/model.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "recdebias/kernels.h"

namespace recdebias {

namespace {

void check_indices(const MfModel& model, std::int32_t user,
                   std::int32_t item) {
  if (user < 0 || user >= model.num_users)
    throw std::out_of_range("user index out of range");
  if (item < 0 || item >= model.num_items)
    throw std::out_of_range("item index out of range");
}

}  // namespace

MfModel make_model(std::int32_t num_users, std::int32_t num_items,
                   std::int32_t latent_dim, double rating_min,
                   double rating_max) {
  if (num_users < 1 || num_items < 1 || latent_dim < 1)
    throw std::invalid_argument("model dimensions must be >= 1");
  MfModel model;
  model.num_users = num_users;
  model.num_items = num_items;
  model.latent_dim = latent_dim;
  model.rating_min = rating_min;
  model.rating_max = rating_max;
  model.user_factors.assign(static_cast<std::size_t>(num_users) * latent_dim,
                            0.0);
  model.item_factors.assign(static_cast<std::size_t>(num_items) * latent_dim,
                            0.0);
  model.user_bias.assign(num_users, 0.0);
  model.item_bias.assign(num_items, 0.0);
  return model;
}

double predict_raw(const MfModel& model, std::int32_t user,
                   std::int32_t item) {
  check_indices(model, user, item);
  return model.global_bias + model.user_bias[user] + model.item_bias[item] +
         kernels::dot(model.user_row(user), model.item_row(item),
                      model.latent_dim);
}

double predict(const MfModel& model, std::int32_t user, std::int32_t item) {
  return std::clamp(predict_raw(model, user, item), model.rating_min,
                    model.rating_max);
}

std::vector<std::int32_t> recommend_topk(
    const MfModel& model, std::int32_t user, std::int32_t k,
    std::span<const std::int32_t> candidates) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (candidates.empty()) throw std::invalid_argument("no candidate items");
  if (user < 0 || user >= model.num_users)
    throw std::out_of_range("user index out of range");

  struct Scored {
    double score;
    std::int32_t item;
  };
  std::vector<Scored> scored;
  scored.reserve(candidates.size());
  for (std::int32_t item : candidates)
    scored.push_back({predict(model, user, item), item});

  const auto take = std::min<std::size_t>(k, scored.size());
  const auto better = [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.item < b.item;
  };
  std::partial_sort(scored.begin(), scored.begin() + take, scored.end(),
                    better);

  std::vector<std::int32_t> top(take);
  for (std::size_t i = 0; i < take; ++i) top[i] = scored[i].item;
  return top;
}

std::size_t param_count(const MfModel& model) {
  return 1 + model.user_bias.size() + model.item_bias.size() +
         model.user_factors.size() + model.item_factors.size();
}

std::vector<double> pack_params(const MfModel& model) {
  std::vector<double> flat;
  flat.reserve(param_count(model));
  flat.push_back(model.global_bias);
  flat.insert(flat.end(), model.user_bias.begin(), model.user_bias.end());
  flat.insert(flat.end(), model.item_bias.begin(), model.item_bias.end());
  flat.insert(flat.end(), model.user_factors.begin(),
              model.user_factors.end());
  flat.insert(flat.end(), model.item_factors.begin(),
              model.item_factors.end());
  return flat;
}

void unpack_params(std::span<const double> flat, MfModel& model) {
  if (flat.size() != param_count(model))
    throw std::invalid_argument("parameter block size mismatch");
  std::size_t pos = 0;
  model.global_bias = flat[pos++];
  std::copy_n(flat.begin() + pos, model.user_bias.size(),
              model.user_bias.begin());
  pos += model.user_bias.size();
  std::copy_n(flat.begin() + pos, model.item_bias.size(),
              model.item_bias.begin());
  pos += model.item_bias.size();
  std::copy_n(flat.begin() + pos, model.user_factors.size(),
              model.user_factors.begin());
  pos += model.user_factors.size();
  std::copy_n(flat.begin() + pos, model.item_factors.size(),
              model.item_factors.begin());
}

bool all_finite(const MfModel& model) {
  if (!std::isfinite(model.global_bias)) return false;
  const auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(),
                       [](double x) { return std::isfinite(x); });
  };
  return finite(model.user_bias) && finite(model.item_bias) &&
         finite(model.user_factors) && finite(model.item_factors);
}

}  // namespace recdebias
