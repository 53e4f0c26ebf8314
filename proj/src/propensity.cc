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

#include "recdebias/propensity.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace recdebias {

namespace {

std::vector<double> sorted_distinct_ratings(
    std::span<const Interaction> interactions) {
  std::vector<double> values;
  for (const Interaction& it : interactions) values.push_back(it.rating);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

}  // namespace

double Propensities::probability(std::int32_t item, double rating) const {
  if (method == PropensityMethod::kItemPopularity) {
    if (item < 0 || static_cast<std::size_t>(item) >= per_item.size())
      throw std::out_of_range("propensities do not cover this item");
    return per_item[item];
  }
  const auto pos =
      std::lower_bound(rating_values.begin(), rating_values.end(), rating);
  if (pos == rating_values.end() || *pos != rating)
    throw std::out_of_range("propensities do not cover this rating value");
  return per_rating[pos - rating_values.begin()];
}

Propensities estimate_propensities(std::span<const Interaction> train_biased,
                                   std::int32_t num_users,
                                   std::int32_t num_items,
                                   PropensityMethod method, double floor,
                                   double power,
                                   std::span<const Interaction> uniform) {
  if (train_biased.empty())
    throw std::invalid_argument("cannot estimate propensities without data");
  if (!(floor > 0.0 && floor <= 1.0))
    throw std::invalid_argument("propensity floor must be in (0,1]");
  if (power < 0.0)
    throw std::invalid_argument("propensity power must be >= 0");

  Propensities props;
  props.method = method;
  props.floor = floor;

  if (method == PropensityMethod::kItemPopularity) {
    std::vector<double> counts(num_items, 0.0);
    for (const Interaction& it : train_biased) counts[it.item] += 1.0;
    const double max_count = *std::max_element(counts.begin(), counts.end());
    props.per_item.resize(num_items);
    for (std::int32_t i = 0; i < num_items; ++i) {
      const double ratio = counts[i] / max_count;
      props.per_item[i] =
          std::clamp(std::pow(ratio, power), floor, 1.0);
    }
    return props;
  }

  // Naive Bayes over rating values.
  if (uniform.empty())
    throw std::invalid_argument(
        "naive-bayes propensities need a randomized sample");
  props.rating_values = sorted_distinct_ratings(train_biased);

  std::map<double, double> uniform_counts;
  for (const Interaction& it : uniform) uniform_counts[it.rating] += 1.0;
  std::map<double, double> biased_counts;
  for (const Interaction& it : train_biased) biased_counts[it.rating] += 1.0;

  const double p_observed =
      static_cast<double>(train_biased.size()) /
      (static_cast<double>(num_users) * static_cast<double>(num_items));

  props.per_rating.resize(props.rating_values.size());
  for (std::size_t idx = 0; idx < props.rating_values.size(); ++idx) {
    const double r = props.rating_values[idx];
    const double p_r_given_o =
        biased_counts[r] / static_cast<double>(train_biased.size());
    const auto marg = uniform_counts.find(r);
    double estimate;
    if (marg == uniform_counts.end()) {
      // Rating value never appears in the randomized sample: the marginal
      // is unknown, so fall back to the most conservative weight.
      estimate = 1.0;
    } else {
      const double p_r = marg->second / static_cast<double>(uniform.size());
      estimate = p_r_given_o * p_observed / p_r;
    }
    props.per_rating[idx] = std::clamp(estimate, floor, 1.0);
  }
  return props;
}

}  // namespace recdebias
