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
#include <stdexcept>
#include <unordered_set>

#include "recdebias/ingest.h"
#include "recdebias/kernels.h"
#include "recdebias/rng.h"

namespace recdebias {

namespace {

// Spread of the latent preference logits; sigmoid(2*z - 1) over z ~ N(0,1)
// gives purchase probabilities concentrated in (0.02, 0.9) with a mean
// around 0.3, i.e. most pairs are unlikely purchases.
constexpr double kLogitScale = 2.0;
constexpr double kLogitOffset = -1.0;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void validate_config(const SyntheticConfig& cfg) {
  if (cfg.num_users < 1) throw std::invalid_argument("num_users must be >= 1");
  if (cfg.num_items < 1) throw std::invalid_argument("num_items must be >= 1");
  if (cfg.latent_dim < 1)
    throw std::invalid_argument("latent_dim must be >= 1");
  if (cfg.slots < 1) throw std::invalid_argument("slots must be >= 1");
  if (cfg.slots > cfg.num_items)
    throw std::invalid_argument("slots must not exceed num_items");
  if (!(cfg.position_decay > 0.0 && cfg.position_decay <= 1.0))
    throw std::invalid_argument("position_decay must be in (0,1]");
  if (cfg.popularity_skew < 0.0)
    throw std::invalid_argument("popularity_skew must be >= 0");
  if (cfg.biased_impressions < 1)
    throw std::invalid_argument("biased_impressions must be >= 1");
  if (cfg.randomized_impressions < 1)
    throw std::invalid_argument("randomized_impressions must be >= 1");
  if (!(cfg.purchase_noise >= 0.0 && cfg.purchase_noise < 0.5))
    throw std::invalid_argument("purchase_noise must be in [0,0.5)");
  const auto pairs = static_cast<std::int64_t>(cfg.num_users) * cfg.num_items;
  if (cfg.biased_impressions > pairs || cfg.randomized_impressions > pairs)
    throw std::invalid_argument(
        "impression count exceeds the number of distinct (user,item) pairs");
}

SyntheticOutput generate_synthetic(const SyntheticConfig& cfg) {
  validate_config(cfg);
  Rng rng(cfg.seed);

  const std::int32_t users = cfg.num_users;
  const std::int32_t items = cfg.num_items;
  const std::int32_t dim = cfg.latent_dim;

  // Latent preferences. Entries are scaled so the dot product is roughly
  // standard normal regardless of latent_dim.
  const double entry_scale = 1.0 / std::pow(static_cast<double>(dim), 0.25);
  std::vector<double> user_factors(static_cast<std::size_t>(users) * dim);
  std::vector<double> item_factors(static_cast<std::size_t>(items) * dim);
  for (double& x : user_factors) x = rng.normal() * entry_scale;
  for (double& x : item_factors) x = rng.normal() * entry_scale;

  SyntheticOutput out;
  out.ground_truth.resize(static_cast<std::size_t>(users) * items);
  for (std::int32_t u = 0; u < users; ++u) {
    for (std::int32_t i = 0; i < items; ++i) {
      const double z = kernels::dot(&user_factors[u * dim],
                                    &item_factors[i * dim], dim);
      out.ground_truth[static_cast<std::size_t>(u) * items + i] =
          sigmoid(kLogitScale * z + kLogitOffset);
    }
  }

  // Zipf-like logging weights: item index doubles as the popularity rank.
  std::vector<double> log_weight(items);
  for (std::int32_t i = 0; i < items; ++i)
    log_weight[i] = -cfg.popularity_skew * std::log(static_cast<double>(i + 1));

  const auto draw_purchase = [&](std::int32_t u, std::int32_t i) {
    const double pi =
        out.ground_truth[static_cast<std::size_t>(u) * items + i];
    const double p =
        pi * (1.0 - cfg.purchase_noise) + (1.0 - pi) * cfg.purchase_noise;
    return rng.bernoulli(p) ? 1.0 : 0.0;
  };

  const auto pair_key = [items](std::int32_t u, std::int32_t i) {
    return static_cast<std::int64_t>(u) * items + i;
  };

  // Biased logging. Each impression shows one user a ranked shelf: item
  // ranks are drawn by Gumbel keys over the popularity weights (so a
  // higher-weight item lands in a top slot more often), and slot s is
  // actually seen with probability position_decay^s. Repeat (user,item)
  // exposures are dropped to keep interactions unique.
  Dataset biased;
  biased.name = "synthetic-biased";
  biased.kind = FeedbackKind::kImplicit;
  biased.rating_min = 0.0;
  biased.rating_max = 1.0;
  biased.num_users = users;
  biased.num_items = items;
  std::unordered_set<std::int64_t> seen_biased;
  seen_biased.reserve(cfg.biased_impressions * 2);

  std::vector<std::int32_t> ranked(items);
  std::vector<double> keys(items);
  // Slot 0 is always seen, so every impression yields at least one
  // exposure candidate; the cap only trips on duplicate saturation.
  const std::int64_t max_events = 1000 + 400 * cfg.biased_impressions;
  std::int64_t events = 0;
  while (static_cast<std::int64_t>(biased.interactions.size()) <
         cfg.biased_impressions) {
    if (++events > max_events)
      throw std::runtime_error(
          "biased logging saturated before reaching the requested "
          "impressions; widen slots or reduce biased_impressions");
    const auto u = static_cast<std::int32_t>(rng.uniform_below(users));
    for (std::int32_t i = 0; i < items; ++i) {
      double unif;
      do {
        unif = rng.uniform01();
      } while (unif == 0.0);
      keys[i] = log_weight[i] - std::log(-std::log(unif));
    }
    std::iota(ranked.begin(), ranked.end(), 0);
    std::partial_sort(ranked.begin(), ranked.begin() + cfg.slots, ranked.end(),
                      [&](std::int32_t a, std::int32_t b) {
                        if (keys[a] != keys[b]) return keys[a] > keys[b];
                        return a < b;
                      });
    double slot_prob = 1.0;
    for (std::int32_t s = 0; s < cfg.slots; ++s) {
      if (rng.bernoulli(slot_prob)) {
        const std::int32_t item = ranked[s];
        if (seen_biased.insert(pair_key(u, item)).second) {
          biased.interactions.push_back(
              {u, item, draw_purchase(u, item), Source::kBiasedLog});
          if (static_cast<std::int64_t>(biased.interactions.size()) ==
              cfg.biased_impressions)
            break;
        }
      }
      slot_prob *= cfg.position_decay;
    }
  }

  // Randomized logging: uniform user, uniform item, same purchase draw.
  Dataset randomized;
  randomized.name = "synthetic-randomized";
  randomized.kind = FeedbackKind::kImplicit;
  randomized.rating_min = 0.0;
  randomized.rating_max = 1.0;
  randomized.num_users = users;
  randomized.num_items = items;
  std::unordered_set<std::int64_t> seen_randomized;
  seen_randomized.reserve(cfg.randomized_impressions * 2);
  std::int64_t randomized_events = 0;
  const std::int64_t max_randomized_events =
      1000 + 400 * cfg.randomized_impressions;
  while (static_cast<std::int64_t>(randomized.interactions.size()) <
         cfg.randomized_impressions) {
    if (++randomized_events > max_randomized_events)
      throw std::runtime_error("randomized logging saturated");
    const auto u = static_cast<std::int32_t>(rng.uniform_below(users));
    const auto i = static_cast<std::int32_t>(rng.uniform_below(items));
    if (!seen_randomized.insert(pair_key(u, i)).second) continue;
    randomized.interactions.push_back(
        {u, i, draw_purchase(u, i), Source::kRandomized});
  }

  out.biased = std::move(biased);
  out.randomized = std::move(randomized);
  return out;
}

}  // namespace recdebias
