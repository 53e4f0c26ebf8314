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

// Deterministic stand-in datasets for the two public explicit-feedback
// releases, used by the acceptance suite when the real files are not
// available. Ratings come from a latent-factor model with
// missing-not-at-random self-selection (users preferentially rate items
// they like, popular items get rated more), written in the releases' own
// file formats so the regular loaders ingest them.

#ifndef RECDEBIAS_TESTS_SURROGATE_H_
#define RECDEBIAS_TESTS_SURROGATE_H_

#include <cstdint>
#include <string>

namespace recdebias::surrogate {

// Self-selected + uniform rating matrices shaped like the coat-shopping
// release: 290 users x 300 items, 24 self-selected and 16 uniformly random
// ratings per user, written as train.ascii / test.ascii dense matrices.
void write_coat_like_files(const std::string& dir, std::uint64_t seed);

// Shaped like the music-ratings release: 15400 users x 1000 items, 20
// self-selected ratings per user, and 10 uniformly random ratings for each
// of the first 5400 users, written as train.txt / test.txt tab-separated
// triples with 1-based ids.
void write_yahoo_like_files(const std::string& dir, std::uint64_t seed);

}  // namespace recdebias::surrogate

#endif  // RECDEBIAS_TESTS_SURROGATE_H_
