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

#ifndef RECDEBIAS_CONFIG_H_
#define RECDEBIAS_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "recdebias/data.h"
#include "recdebias/ingest.h"
#include "recdebias/propensity.h"
#include "recdebias/train.h"

namespace recdebias {

// One requested model run: the tag from the [run] models list plus the
// hyperparameters from its [model:<tag>] section. The propensity method is
// optional; unset means "naive-bayes when the data is explicit and a
// uniform slice exists, item-popularity otherwise".
struct ModelSpec {
  std::string tag;
  HyperParams hp;
  std::optional<PropensityMethod> propensity;
};

inline constexpr const char* kModelTags[] = {"mf-biased", "mf-uniform", "ips",
                                             "dr", "autodebias"};

struct ExperimentConfig {
  enum class DatasetType { kCoat, kYahoo, kCanonical, kSynthetic };

  DatasetType type = DatasetType::kSynthetic;
  std::string name;
  // coat
  std::string coat_dir;
  // yahoo
  std::string yahoo_train, yahoo_test;
  // canonical
  std::string canonical_biased, canonical_randomized;
  // synthetic
  SyntheticConfig synthetic;

  // When false the uniform slice is withheld from training (the proprietary
  // Set-A situation): mf-uniform/dr/autodebias are skipped and IPS falls
  // back to item-popularity propensities. The randomized data still feeds
  // validation and test.
  bool uniform_training = true;

  std::vector<ModelSpec> models;
  std::int32_t repeats = 1;       // 1..10
  std::uint64_t base_seed = 0;
  SplitRatios ratios;
  std::string out_dir = "runs";
  std::string format = "both";    // csv | markdown | both
};

// INI-style config: [dataset], [run], and [model:<tag>] sections with
// `key = value` lines; `#` or `;` start a comment. Unknown sections, keys,
// or model tags are errors.
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin);
ExperimentConfig load_config(const std::string& path);

}  // namespace recdebias

#endif  // RECDEBIAS_CONFIG_H_
