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

#ifndef RECDEBIAS_PROPENSITY_H_
#define RECDEBIAS_PROPENSITY_H_

#include <cstdint>
#include <span>
#include <vector>

#include "recdebias/data.h"

namespace recdebias {

enum class PropensityMethod {
  // p(i) = max(floor, (count_i / max_j count_j)^power), broadcast over
  // users. Works without any randomized data.
  kItemPopularity,
  // p(o=1 | r) = P(r | o=1) P(o=1) / P(r), with the rating marginal P(r)
  // estimated from a randomized sample. Suited to explicit feedback.
  kNaiveBayes,
};

// Estimated observation probabilities, clipped to [floor, 1].
struct Propensities {
  PropensityMethod method = PropensityMethod::kItemPopularity;
  double floor = 0.0;
  std::vector<double> per_item;       // item-popularity estimates
  std::vector<double> rating_values;  // sorted distinct ratings (naive bayes)
  std::vector<double> per_rating;     // estimate per rating value

  // Estimated probability that (user,item,rating) was observed. Throws if
  // the pair is not covered (unknown item / unseen rating value).
  double probability(std::int32_t item, double rating) const;
};

// Builds propensities from the biased training interactions. The
// naive-bayes method additionally needs the randomized uniform sample and
// the total pair count (num_users * num_items) for P(o=1); it throws
// std::invalid_argument when `uniform` is empty.
Propensities estimate_propensities(std::span<const Interaction> train_biased,
                                   std::int32_t num_users,
                                   std::int32_t num_items,
                                   PropensityMethod method, double floor,
                                   double power,
                                   std::span<const Interaction> uniform = {});

}  // namespace recdebias

#endif  // RECDEBIAS_PROPENSITY_H_
