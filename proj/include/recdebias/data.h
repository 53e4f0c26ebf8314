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

#ifndef RECDEBIAS_DATA_H_
#define RECDEBIAS_DATA_H_

#include <cstdint>
#include <string>
#include <vector>

namespace recdebias {

// Whether ratings are deliberate numeric scores (explicit, e.g. 1..5) or a
// binary purchase/no-purchase signal (implicit, ratings in {0, 1}).
enum class FeedbackKind { kExplicit, kImplicit };

// How an interaction was collected: from the production logging policy
// (biased), or from a uniformly randomized holdout.
enum class Source { kBiasedLog, kRandomized };

const char* to_string(FeedbackKind kind);
const char* to_string(Source source);

// One observed (user, item, rating) triple. User and item are dense
// 0-based indices; ingestion owns the mapping from raw ids.
struct Interaction {
  std::int32_t user = 0;
  std::int32_t item = 0;
  double rating = 0.0;
  Source source = Source::kBiasedLog;

  friend bool operator==(const Interaction&, const Interaction&) = default;
};

struct Dataset {
  std::string name;
  std::int32_t num_users = 0;
  std::int32_t num_items = 0;
  FeedbackKind kind = FeedbackKind::kExplicit;
  double rating_min = 0.0;
  double rating_max = 0.0;
  std::vector<Interaction> interactions;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Checks every dataset invariant (index ranges, rating scale, implicit
// ratings in {0,1}, duplicate (user,item,source) triples, non-emptiness)
// and returns one human-readable line per violation. Empty means valid.
std::vector<std::string> validate_dataset(const Dataset& ds);

// The four-way experiment partition: biased training data plus the
// uniform-training / validation / test parts carved out of the randomized
// set.
struct DataSplit {
  std::vector<Interaction> train_biased;  // biased-log source only
  std::vector<Interaction> uniform;       // randomized, aids DR/AutoDebias
  std::vector<Interaction> validation;    // randomized, early stopping
  std::vector<Interaction> test;          // randomized, evaluation
};

struct SplitRatios {
  double uniform = 0.05;
  double validation = 0.05;
  double test = 0.90;
};

struct RandomizedParts {
  std::vector<Interaction> uniform;
  std::vector<Interaction> validation;
  std::vector<Interaction> test;
};

// Deterministically shuffles the randomized interactions under `seed`
// (Fisher-Yates over mt19937_64) and cuts them into three contiguous
// parts. Sizes are round-half-up on the first two ratios with the
// remainder going to test, so the parts always partition the input
// exactly. Ratios must be positive and sum to 1 within 1e-9.
// Throws std::invalid_argument on empty input ("no randomized data"),
// bad ratios, or a non-randomized source tag.
RandomizedParts split_randomized(const std::vector<Interaction>& randomized,
                                 const SplitRatios& ratios,
                                 std::uint64_t seed);

// Assembles the four-way split, checking source tags on both sides.
DataSplit attach_biased(std::vector<Interaction> train_biased,
                        RandomizedParts parts);

}  // namespace recdebias

#endif  // RECDEBIAS_DATA_H_
