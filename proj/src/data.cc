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

#include "recdebias/data.h"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_set>

#include "recdebias/rng.h"

namespace recdebias {

namespace {

std::string describe(const Interaction& it) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "(user=%d, item=%d, rating=%g, %s)", it.user,
                it.item, it.rating, to_string(it.source));
  return buf;
}

// One hashable key per (user, item, source).
std::uint64_t triple_key(const Interaction& it) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(it.user))
          << 33) |
         (static_cast<std::uint64_t>(static_cast<std::uint32_t>(it.item))
          << 1) |
         (it.source == Source::kRandomized ? 1u : 0u);
}

}  // namespace

const char* to_string(FeedbackKind kind) {
  return kind == FeedbackKind::kExplicit ? "explicit" : "implicit";
}

const char* to_string(Source source) {
  return source == Source::kBiasedLog ? "biased-log" : "randomized";
}

std::vector<std::string> validate_dataset(const Dataset& ds) {
  std::vector<std::string> violations;
  if (ds.num_users < 1) violations.push_back("num_users must be >= 1");
  if (ds.num_items < 1) violations.push_back("num_items must be >= 1");
  if (ds.interactions.empty()) violations.push_back("no interactions");
  if (ds.rating_min > ds.rating_max)
    violations.push_back("rating_min exceeds rating_max");

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(ds.interactions.size() * 2);
  for (const Interaction& it : ds.interactions) {
    if (it.user < 0 || it.user >= ds.num_users)
      violations.push_back("user index out of range " + describe(it));
    if (it.item < 0 || it.item >= ds.num_items)
      violations.push_back("item index out of range " + describe(it));
    if (ds.kind == FeedbackKind::kImplicit) {
      if (it.rating != 0.0 && it.rating != 1.0)
        violations.push_back("implicit rating not in {0,1} " + describe(it));
    } else if (it.rating < ds.rating_min || it.rating > ds.rating_max) {
      violations.push_back("rating outside declared scale " + describe(it));
    }
    if (!seen.insert(triple_key(it)).second)
      violations.push_back("duplicate (user,item,source) triple " +
                           describe(it));
  }
  return violations;
}

RandomizedParts split_randomized(const std::vector<Interaction>& randomized,
                                 const SplitRatios& ratios,
                                 std::uint64_t seed) {
  if (randomized.empty()) throw std::invalid_argument("no randomized data");
  if (ratios.uniform <= 0.0 || ratios.validation <= 0.0 || ratios.test <= 0.0)
    throw std::invalid_argument("split ratios must be positive");
  if (std::fabs(ratios.uniform + ratios.validation + ratios.test - 1.0) > 1e-9)
    throw std::invalid_argument("split ratios must sum to 1");
  for (const Interaction& it : randomized) {
    if (it.source != Source::kRandomized)
      throw std::invalid_argument("split input contains a non-randomized row");
  }

  std::vector<Interaction> shuffled = randomized;
  Rng rng(seed);
  rng.shuffle(shuffled);

  const auto n = shuffled.size();
  // Round-half-up on the first two parts; remainder is the test set.
  const auto n_uniform = static_cast<std::size_t>(
      std::floor(ratios.uniform * static_cast<double>(n) + 0.5));
  const auto n_validation = static_cast<std::size_t>(
      std::floor(ratios.validation * static_cast<double>(n) + 0.5));
  if (n_uniform + n_validation > n)
    throw std::invalid_argument("split ratios leave no test data");

  RandomizedParts parts;
  parts.uniform.assign(shuffled.begin(), shuffled.begin() + n_uniform);
  parts.validation.assign(shuffled.begin() + n_uniform,
                          shuffled.begin() + n_uniform + n_validation);
  parts.test.assign(shuffled.begin() + n_uniform + n_validation,
                    shuffled.end());
  return parts;
}

DataSplit attach_biased(std::vector<Interaction> train_biased,
                        RandomizedParts parts) {
  if (train_biased.empty())
    throw std::invalid_argument("biased training set is empty");
  for (const Interaction& it : train_biased) {
    if (it.source != Source::kBiasedLog)
      throw std::invalid_argument(
          "biased training set contains a randomized-source row");
  }
  auto check_randomized = [](const std::vector<Interaction>& part,
                             const char* what) {
    for (const Interaction& it : part) {
      if (it.source != Source::kRandomized)
        throw std::invalid_argument(std::string(what) +
                                    " contains a biased-source row");
    }
  };
  check_randomized(parts.uniform, "uniform part");
  check_randomized(parts.validation, "validation part");
  check_randomized(parts.test, "test part");

  DataSplit split;
  split.train_biased = std::move(train_biased);
  split.uniform = std::move(parts.uniform);
  split.validation = std::move(parts.validation);
  split.test = std::move(parts.test);
  return split;
}

}  // namespace recdebias
