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

#ifndef RECDEBIAS_INGEST_H_
#define RECDEBIAS_INGEST_H_

#include <cstdint>
#include <string>
#include <vector>

#include "recdebias/data.h"

namespace recdebias {

struct DatasetPair {
  Dataset biased;
  Dataset randomized;
};

// Dense index -> raw id, per axis. Loaders that renumber ids return these
// so ingestion can persist the mapping next to the canonical files.
struct IdMaps {
  std::vector<std::int64_t> user_raw_ids;
  std::vector<std::int64_t> item_raw_ids;
};

// Loads the coat-shopping release from a directory holding train.ascii
// (self-selected condition) and test.ascii (uniformly random condition):
// dense whitespace-separated matrices, one user per row, integer entries
// where 0 = unobserved and 1..5 is a rating.
DatasetPair load_coat(const std::string& directory);

struct YahooLoad {
  Dataset biased;
  Dataset randomized;
  IdMaps ids;
};

// Loads the music-ratings release: line-oriented `user<TAB>item<TAB>rating`
// with 1-based raw ids and ratings 1..5. The train file is the
// self-selected (biased) condition and the test file the random-items
// condition. Raw ids are densified to 0-based indices shared across the
// two files (ascending raw-id order).
YahooLoad load_yahoo(const std::string& train_path,
                     const std::string& test_path);

// Canonical on-disk interaction format: optional `# key=value` metadata
// lines, the header `user,item,rating,source`, then one CSV row per
// interaction (UTF-8, LF). write/read round-trip a dataset exactly.
void write_canonical(const Dataset& ds, const std::string& path);
Dataset read_canonical(const std::string& path);

// `dense,raw` CSV for an id mapping.
void write_id_map(const std::vector<std::int64_t>& raw_ids,
                  const std::string& path);

// Synthetic implicit-feedback logging with the three bias knobs:
//  - selection bias via popularity_skew (Zipf-like logging weights),
//  - exposure bias via slots (only top-ranked items can be shown),
//  - position bias via position_decay (per-slot exposure probability).
struct SyntheticConfig {
  std::int32_t num_users = 0;
  std::int32_t num_items = 0;
  std::int32_t latent_dim = 8;
  std::int32_t slots = 1;          // visible shop positions
  double position_decay = 1.0;     // in (0, 1]
  double popularity_skew = 0.0;    // >= 0
  std::int64_t biased_impressions = 0;
  std::int64_t randomized_impressions = 0;
  double purchase_noise = 0.0;     // in [0, 0.5)
  std::uint64_t seed = 0;
};

// Throws std::invalid_argument describing the first violated constraint.
void validate_config(const SyntheticConfig& cfg);

struct SyntheticOutput {
  Dataset biased;
  Dataset randomized;
  // True purchase probabilities, row-major num_users x num_items.
  std::vector<double> ground_truth;
};

// Deterministic under cfg.seed, bit for bit.
SyntheticOutput generate_synthetic(const SyntheticConfig& cfg);

// Optional `user,item,probability` dump of the ground-truth matrix.
void write_ground_truth(const SyntheticOutput& out, const std::string& path);

}  // namespace recdebias

#endif  // RECDEBIAS_INGEST_H_
