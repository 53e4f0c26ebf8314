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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "recdebias/ingest.h"
#include "recdebias/metrics.h"
#include "recdebias/rng.h"

using namespace recdebias;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "recdebias_ingest_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

// Upper critical chi-square value via the Wilson-Hilferty approximation;
// z is the standard normal quantile for the target tail.
double chi2_critical(double df, double z) {
  const double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
  return df * t * t * t;
}

// Two-sample chi-square statistic over item histograms.
double two_sample_chi2(const std::vector<double>& c1,
                       const std::vector<double>& c2, double& df) {
  double n1 = 0.0, n2 = 0.0;
  for (double x : c1) n1 += x;
  for (double x : c2) n2 += x;
  const double k1 = std::sqrt(n2 / n1), k2 = std::sqrt(n1 / n2);
  double stat = 0.0;
  df = -1.0;
  for (std::size_t i = 0; i < c1.size(); ++i) {
    const double total = c1[i] + c2[i];
    if (total <= 0.0) continue;
    const double d = k1 * c1[i] - k2 * c2[i];
    stat += d * d / total;
    df += 1.0;
  }
  return stat;
}

std::vector<double> item_counts(const Dataset& ds) {
  std::vector<double> counts(ds.num_items, 0.0);
  for (const Interaction& it : ds.interactions) counts[it.item] += 1.0;
  return counts;
}

Dataset random_dataset(Rng& rng, bool implicit) {
  Dataset ds;
  ds.name = implicit ? "rand-implicit" : "rand-explicit";
  ds.num_users = 6;
  ds.num_items = 7;
  ds.kind = implicit ? FeedbackKind::kImplicit : FeedbackKind::kExplicit;
  ds.rating_min = implicit ? 0.0 : 1.0;
  ds.rating_max = implicit ? 1.0 : 5.0;
  for (std::int32_t u = 0; u < ds.num_users; ++u) {
    for (std::int32_t i = 0; i < ds.num_items; ++i) {
      if (!rng.bernoulli(0.4)) continue;
      const double rating =
          implicit ? (rng.bernoulli(0.5) ? 1.0 : 0.0)
                   : 1.0 + 4.0 * rng.uniform01();  // non-integer on purpose
      ds.interactions.push_back(
          {u, i, rating,
           rng.bernoulli(0.5) ? Source::kBiasedLog : Source::kRandomized});
    }
  }
  if (ds.interactions.empty())
    ds.interactions.push_back({0, 0, implicit ? 1.0 : 3.0, Source::kBiasedLog});
  return ds;
}

}  // namespace

TEST_CASE("coat loader reads dense matrices") {
  const fs::path dir = temp_dir() / "coat_small";
  fs::create_directories(dir);
  write_file(dir / "train.ascii", "0 3 0\n2 0 1\n");
  write_file(dir / "test.ascii", "0 0 4\n0 5 0\n");

  const DatasetPair pair = load_coat(dir.string());
  CHECK(pair.biased.num_users == 2);
  CHECK(pair.biased.num_items == 3);
  REQUIRE(pair.biased.interactions.size() == 3);
  // Single row "0 3 0" contributes exactly (user 0, item 1, rating 3).
  CHECK(pair.biased.interactions[0] ==
        Interaction{0, 1, 3.0, Source::kBiasedLog});
  CHECK(pair.randomized.interactions.size() == 2);
  CHECK(pair.randomized.interactions[0] ==
        Interaction{0, 2, 4.0, Source::kRandomized});
  CHECK(validate_dataset(pair.biased).empty());
  CHECK(validate_dataset(pair.randomized).empty());
}

TEST_CASE("coat loader rejects degenerate matrices") {
  const fs::path dir = temp_dir() / "coat_bad";
  fs::create_directories(dir);
  SUBCASE("all zeros") {
    write_file(dir / "train.ascii", "0 0\n0 0\n");
    write_file(dir / "test.ascii", "0 1\n0 0\n");
    CHECK_THROWS_WITH_AS(load_coat(dir.string()),
                         doctest::Contains("empty dataset"),
                         std::runtime_error);
  }
  SUBCASE("ragged row") {
    write_file(dir / "train.ascii", "1 2 3\n1 2\n");
    write_file(dir / "test.ascii", "0 1 0\n0 0 1\n");
    CHECK_THROWS_WITH_AS(load_coat(dir.string()), doctest::Contains("ragged"),
                         std::runtime_error);
  }
  SUBCASE("entry outside 0..5") {
    write_file(dir / "train.ascii", "1 7\n");
    write_file(dir / "test.ascii", "1 0\n");
    CHECK_THROWS_WITH_AS(load_coat(dir.string()),
                         doctest::Contains("outside 0..5"),
                         std::runtime_error);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_coat((temp_dir() / "nowhere").string()),
                    std::runtime_error);
  }
}

TEST_CASE("yahoo loader densifies 1-based raw ids") {
  const fs::path dir = temp_dir() / "yahoo_small";
  fs::create_directories(dir);
  write_file(dir / "train.txt", "1\t1\t5\n7\t3\t4\n");
  write_file(dir / "test.txt", "1\t9\t1\n");

  const YahooLoad load =
      load_yahoo((dir / "train.txt").string(), (dir / "test.txt").string());
  // Raw users {1,7} -> {0,1}; raw items {1,3,9} -> {0,1,2}.
  CHECK(load.biased.num_users == 2);
  CHECK(load.biased.num_items == 3);
  CHECK(load.biased.interactions[0] == Interaction{0, 0, 5.0, Source::kBiasedLog});
  CHECK(load.biased.interactions[1] == Interaction{1, 1, 4.0, Source::kBiasedLog});
  CHECK(load.randomized.interactions[0] ==
        Interaction{0, 2, 1.0, Source::kRandomized});
  CHECK(load.ids.user_raw_ids == std::vector<std::int64_t>{1, 7});
  CHECK(load.ids.item_raw_ids == std::vector<std::int64_t>{1, 3, 9});
}

TEST_CASE("yahoo loader rejects malformed input") {
  const fs::path dir = temp_dir() / "yahoo_bad";
  fs::create_directories(dir);
  SUBCASE("duplicate triple") {
    write_file(dir / "train.txt", "1\t1\t5\n1\t1\t4\n");
    write_file(dir / "test.txt", "1\t2\t1\n");
    CHECK_THROWS_WITH_AS(
        load_yahoo((dir / "train.txt").string(), (dir / "test.txt").string()),
        doctest::Contains("duplicate triple"), std::runtime_error);
  }
  SUBCASE("rating outside 1..5") {
    write_file(dir / "train.txt", "1\t1\t6\n");
    write_file(dir / "test.txt", "1\t2\t1\n");
    CHECK_THROWS_AS(
        load_yahoo((dir / "train.txt").string(), (dir / "test.txt").string()),
        std::runtime_error);
  }
  SUBCASE("malformed line") {
    write_file(dir / "train.txt", "1\tx\t3\n");
    write_file(dir / "test.txt", "1\t2\t1\n");
    CHECK_THROWS_WITH_AS(
        load_yahoo((dir / "train.txt").string(), (dir / "test.txt").string()),
        doctest::Contains("malformed"), std::runtime_error);
  }
}

TEST_CASE("canonical round-trip reproduces datasets exactly") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const Dataset ds = random_dataset(rng, trial % 2 == 0);
    const fs::path path =
        temp_dir() / ("roundtrip_" + std::to_string(trial) + ".csv");
    write_canonical(ds, path.string());
    const Dataset back = read_canonical(path.string());
    CHECK(back == ds);
  }
}

TEST_CASE("canonical reader handles hand-written and degenerate files") {
  SUBCASE("header only") {
    const fs::path path = temp_dir() / "header_only.csv";
    write_file(path, "user,item,rating,source\n");
    CHECK_THROWS_WITH_AS(read_canonical(path.string()),
                         doctest::Contains("empty dataset"),
                         std::runtime_error);
  }
  SUBCASE("three hand-written rows, no metadata prelude") {
    const fs::path path = temp_dir() / "hand.csv";
    write_file(path,
               "user,item,rating,source\n"
               "0,1,4,biased-log\n"
               "2,0,2,randomized\n"
               "1,2,5,biased-log\n");
    const Dataset ds = read_canonical(path.string());
    REQUIRE(ds.interactions.size() == 3);
    CHECK(ds.interactions[0] == Interaction{0, 1, 4.0, Source::kBiasedLog});
    CHECK(ds.interactions[1] == Interaction{2, 0, 2.0, Source::kRandomized});
    CHECK(ds.interactions[2] == Interaction{1, 2, 5.0, Source::kBiasedLog});
    CHECK(ds.num_users == 3);
    CHECK(ds.num_items == 3);
    CHECK(ds.kind == FeedbackKind::kExplicit);
  }
  SUBCASE("unknown source tag") {
    const fs::path path = temp_dir() / "bad_source.csv";
    write_file(path, "user,item,rating,source\n0,0,1,mystery\n");
    CHECK_THROWS_AS(read_canonical(path.string()), std::runtime_error);
  }
}

TEST_CASE("synthetic generation is deterministic and valid") {
  SyntheticConfig cfg;
  cfg.num_users = 150;
  cfg.num_items = 40;
  cfg.latent_dim = 6;
  cfg.slots = 5;
  cfg.position_decay = 0.8;
  cfg.popularity_skew = 1.0;
  cfg.biased_impressions = 2000;
  cfg.randomized_impressions = 1500;
  cfg.purchase_noise = 0.1;
  cfg.seed = 99;

  const SyntheticOutput a = generate_synthetic(cfg);
  const SyntheticOutput b = generate_synthetic(cfg);
  CHECK(a.biased == b.biased);
  CHECK(a.randomized == b.randomized);
  CHECK(a.ground_truth == b.ground_truth);

  CHECK(a.biased.interactions.size() == 2000);
  CHECK(a.randomized.interactions.size() == 1500);
  CHECK(validate_dataset(a.biased).empty());
  CHECK(validate_dataset(a.randomized).empty());
  for (double p : a.ground_truth) {
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
}

TEST_CASE("bias knobs off leaves exposure statistically uniform") {
  SyntheticConfig cfg;
  cfg.num_users = 2000;
  cfg.num_items = 200;
  cfg.latent_dim = 4;
  cfg.slots = 200;          // every item visible
  cfg.position_decay = 1.0; // no position bias
  cfg.popularity_skew = 0.0; // no selection bias
  cfg.biased_impressions = 100000;
  cfg.randomized_impressions = 100000;
  cfg.purchase_noise = 0.0;
  cfg.seed = 3;

  const SyntheticOutput out = generate_synthetic(cfg);
  const std::vector<double> biased = item_counts(out.biased);
  const std::vector<double> randomized = item_counts(out.randomized);
  double df = 0.0;
  const double stat = two_sample_chi2(biased, randomized, df);
  // p > 0.01 means the statistic stays below the upper 1% critical value.
  CHECK(stat < chi2_critical(df, 2.3263478740408408));
}

TEST_CASE("popularity skew concentrates biased impressions") {
  SyntheticConfig cfg;
  cfg.num_users = 600;
  cfg.num_items = 100;
  cfg.latent_dim = 4;
  cfg.slots = 3;
  cfg.position_decay = 0.7;
  cfg.popularity_skew = 3.0;
  cfg.biased_impressions = 12000;
  cfg.randomized_impressions = 12000;
  cfg.purchase_noise = 0.0;
  cfg.seed = 17;

  const SyntheticOutput out = generate_synthetic(cfg);
  const std::vector<double> biased = item_counts(out.biased);
  const std::vector<double> randomized = item_counts(out.randomized);
  CHECK(gini(biased) > gini(randomized));

  // The top-popularity item's share must beat the uniform share.
  double total = 0.0;
  for (double c : biased) total += c;
  CHECK(biased[0] / total > 1.0 / cfg.num_items);
}

TEST_CASE("synthetic config validation") {
  SyntheticConfig cfg;
  cfg.num_users = 10;
  cfg.num_items = 5;
  cfg.biased_impressions = 10;
  cfg.randomized_impressions = 10;
  CHECK_NOTHROW(validate_config(cfg));
  SUBCASE("slots above num_items") {
    cfg.slots = 6;
    CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
  }
  SUBCASE("purchase noise at 0.5") {
    cfg.purchase_noise = 0.5;
    CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
  }
  SUBCASE("impressions beyond the pair count") {
    cfg.biased_impressions = 51;
    CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
  }
}

TEST_CASE("ground truth dump has one row per pair") {
  SyntheticConfig cfg;
  cfg.num_users = 4;
  cfg.num_items = 3;
  cfg.biased_impressions = 5;
  cfg.randomized_impressions = 5;
  cfg.seed = 1;
  const SyntheticOutput out = generate_synthetic(cfg);
  const fs::path path = temp_dir() / "truth.csv";
  write_ground_truth(out, path.string());

  std::ifstream in(path);
  std::string line;
  int rows = 0;
  std::getline(in, line);
  CHECK(line == "user,item,probability");
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 12);
}
