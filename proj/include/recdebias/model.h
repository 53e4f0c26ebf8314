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

#ifndef RECDEBIAS_MODEL_H_
#define RECDEBIAS_MODEL_H_

#include <cstdint>
#include <span>
#include <vector>

namespace recdebias {

// Biased matrix factorization: rating estimate is
//   global_bias + user_bias[u] + item_bias[i] + user_factors[u].item_factors[i]
// clamped to [rating_min, rating_max] at prediction time. Factor tables are
// row-major with latent_dim columns.
struct MfModel {
  std::int32_t num_users = 0;
  std::int32_t num_items = 0;
  std::int32_t latent_dim = 0;
  double rating_min = 0.0;
  double rating_max = 0.0;
  double global_bias = 0.0;
  std::vector<double> user_factors;
  std::vector<double> item_factors;
  std::vector<double> user_bias;
  std::vector<double> item_bias;

  double* user_row(std::int32_t u) { return user_factors.data() + u * latent_dim; }
  const double* user_row(std::int32_t u) const {
    return user_factors.data() + u * latent_dim;
  }
  double* item_row(std::int32_t i) { return item_factors.data() + i * latent_dim; }
  const double* item_row(std::int32_t i) const {
    return item_factors.data() + i * latent_dim;
  }

  friend bool operator==(const MfModel&, const MfModel&) = default;
};

// Zero-initialized model of the given shape.
MfModel make_model(std::int32_t num_users, std::int32_t num_items,
                   std::int32_t latent_dim, double rating_min,
                   double rating_max);

// Clamped rating estimate. Throws std::out_of_range on a bad index.
double predict(const MfModel& model, std::int32_t user, std::int32_t item);

// Unclamped score; used inside training losses, which stay differentiable.
double predict_raw(const MfModel& model, std::int32_t user, std::int32_t item);

// Candidates ordered by predicted score descending, ties broken by
// ascending item index; at most k entries.
std::vector<std::int32_t> recommend_topk(const MfModel& model,
                                         std::int32_t user, std::int32_t k,
                                         std::span<const std::int32_t> candidates);

// Flat parameter block in a fixed order (global bias, user biases, item
// biases, user factors, item factors). Used by checkpoints and by the
// finite-difference tests.
std::size_t param_count(const MfModel& model);
std::vector<double> pack_params(const MfModel& model);
void unpack_params(std::span<const double> flat, MfModel& model);

// True when every parameter is finite.
bool all_finite(const MfModel& model);

}  // namespace recdebias

#endif  // RECDEBIAS_MODEL_H_
