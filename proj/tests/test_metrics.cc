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
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "recdebias/metrics.h"
#include "recdebias/rng.h"

using namespace recdebias;

namespace {

// Exhaustive pairwise AUC: correctly ordered positive-negative pairs, ties
// counting one half. Independent of the rank-sum implementation.
double auc_bruteforce(std::span<const ScoredLabel> scored) {
  double wins = 0.0;
  std::int64_t pairs = 0;
  for (const ScoredLabel& pos : scored) {
    if (!pos.positive) continue;
    for (const ScoredLabel& neg : scored) {
      if (neg.positive) continue;
      ++pairs;
      if (pos.score > neg.score) wins += 1.0;
      else if (pos.score == neg.score) wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

}  // namespace

TEST_CASE("rmse hand values") {
  const std::vector<double> same = {1.0, 2.0, 3.0};
  CHECK(rmse(same, same) == 0.0);

  const std::vector<double> pred = {1.0, 3.0};
  const std::vector<double> truth = {2.0, 5.0};
  CHECK(rmse(pred, truth) == doctest::Approx(std::sqrt(5.0 / 2.0)).epsilon(1e-12));

  // Constant offset c on every pair comes back as c.
  std::vector<double> shifted = same;
  for (double& x : shifted) x += 0.75;
  CHECK(rmse(shifted, same) == doctest::Approx(0.75).epsilon(1e-12));

  CHECK_THROWS_AS(rmse({}, {}), std::invalid_argument);
}

TEST_CASE("auc hand values") {
  const std::vector<ScoredLabel> separated = {
      {0.9, true}, {0.8, true}, {0.2, false}, {0.1, false}};
  CHECK(auc(separated) == 1.0);

  const std::vector<ScoredLabel> ties = {
      {0.5, true}, {0.5, false}, {0.5, true}, {0.5, false}};
  CHECK(auc(ties) == 0.5);

  // Brute force over the 4 positive-negative pairs gives 3/4.
  const std::vector<ScoredLabel> mixed = {
      {0.9, true}, {0.8, false}, {0.7, true}, {0.6, false}};
  CHECK(auc(mixed) == 0.75);
  CHECK(auc_bruteforce(mixed) == 0.75);

  CHECK_THROWS_AS(auc(std::vector<ScoredLabel>{{0.3, true}, {0.6, true}}),
                  std::invalid_argument);
}

TEST_CASE("auc equals the exhaustive pairwise oracle") {
  Rng rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_below(199));
    std::vector<ScoredLabel> scored(n);
    bool has_pos = false, has_neg = false;
    for (ScoredLabel& s : scored) {
      // Coarse scores so ties actually happen.
      s.score = static_cast<double>(rng.uniform_below(12)) / 4.0;
      s.positive = rng.bernoulli(0.4);
      (s.positive ? has_pos : has_neg) = true;
    }
    if (!has_pos) scored[0].positive = true;
    if (!has_neg) scored[scored.size() - 1].positive = false;
    CHECK(auc(scored) == auc_bruteforce(scored));  // exact
  }
}

TEST_CASE("ndcg hand values") {
  // Model order equals ideal order.
  const std::vector<double> ideal_order = {3.0, 2.0, 1.0};
  CHECK(ndcg_at_k(ideal_order, ideal_order, 3) == 1.0);

  // [0,1] at k=2: DCG = 1/log2(3), IDCG = 1.
  const std::vector<double> ranked = {0.0, 1.0};
  const std::vector<double> ideal = {0.0, 1.0};
  CHECK(ndcg_at_k(ranked, ideal, 2) ==
        doctest::Approx(1.0 / std::log2(3.0)).epsilon(1e-9));
  CHECK(ndcg_at_k(ranked, ideal, 2) == doctest::Approx(0.6309297535714574));

  const std::vector<double> zeros = {0.0, 0.0, 0.0};
  CHECK(ndcg_at_k(zeros, zeros, 3) == 0.0);
}

TEST_CASE("ndcg stays in [0,1] and is 1 only for ideal orders") {
  Rng rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_below(10));
    std::vector<double> rel(n);
    for (double& r : rel) r = static_cast<double>(rng.uniform_below(4));
    std::vector<double> ranked = rel;
    rng.shuffle(ranked);
    const double value = ndcg_at_k(ranked, rel, 5);
    CHECK(value >= 0.0);
    CHECK(value <= 1.0 + 1e-12);

    std::vector<double> best = rel;
    std::sort(best.begin(), best.end(), std::greater<>());
    const double total = std::accumulate(rel.begin(), rel.end(), 0.0);
    if (total > 0.0) CHECK(ndcg_at_k(best, rel, 5) == doctest::Approx(1.0));
  }
}

TEST_CASE("gini hand values") {
  const std::vector<double> equal = {2.0, 2.0, 2.0, 2.0};
  CHECK(gini(equal) == 0.0);

  // (1,3): ((-1)*1 + (1)*3) / (2*4) = 0.25
  CHECK(gini(std::vector<double>{1.0, 3.0}) == doctest::Approx(0.25).epsilon(1e-12));
  // (0,0,1): 2/3, the (n-1)/n bound.
  CHECK(gini(std::vector<double>{0.0, 0.0, 1.0}) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  CHECK_THROWS_AS(gini(std::vector<double>{0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("gini is scale and permutation invariant") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_below(20));
    std::vector<double> phi(n);
    for (double& x : phi) x = rng.uniform01() * 10.0;
    phi[0] += 0.1;  // keep the total positive
    const double base = gini(phi);

    std::vector<double> scaled = phi;
    const double c = 0.1 + 5.0 * rng.uniform01();
    for (double& x : scaled) x *= c;
    CHECK(gini(scaled) == doctest::Approx(base).epsilon(1e-9));

    std::vector<double> shuffled = phi;
    rng.shuffle(shuffled);
    CHECK(gini(shuffled) == doctest::Approx(base).epsilon(1e-12));

    CHECK(base >= 0.0);
    CHECK(base < 1.0);
  }
}

TEST_CASE("entropy hand values") {
  const std::vector<double> onehot = {0.0, 1.0, 0.0};
  CHECK(entropy(onehot) == 0.0);

  const std::vector<double> uniform4 = {0.25, 0.25, 0.25, 0.25};
  CHECK(entropy(uniform4) == doctest::Approx(std::log(4.0)).epsilon(1e-12));

  const std::vector<double> skew = {0.5, 0.25, 0.25};
  CHECK(entropy(skew) == doctest::Approx(1.0397207708399179).epsilon(1e-9));

  CHECK_THROWS_AS(entropy(std::vector<double>{0.5, 0.4}),
                  std::invalid_argument);
}

TEST_CASE("entropy is maximal exactly at the uniform distribution") {
  Rng rng(37);
  for (int n = 2; n <= 10; ++n) {
    const std::vector<double> uniform(n, 1.0 / n);
    const double max_h = entropy(uniform);
    CHECK(max_h == doctest::Approx(std::log(n)).epsilon(1e-12));
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<double> p(n);
      double total = 0.0;
      for (double& x : p) {
        x = rng.uniform01() + 1e-9;
        total += x;
      }
      for (double& x : p) x /= total;
      double max_dev = 0.0;
      for (double x : p) max_dev = std::max(max_dev, std::fabs(x - 1.0 / n));
      const double h = entropy(p);
      CHECK(h <= max_h + 1e-12);
      if (max_dev > 1e-3) CHECK(h < max_h);
    }
  }
}

namespace {

MfModel single_user_model(const std::vector<double>& item_scores) {
  MfModel model = make_model(1, static_cast<std::int32_t>(item_scores.size()),
                             1, -100.0, 100.0);
  model.user_factors[0] = 1.0;
  for (std::size_t i = 0; i < item_scores.size(); ++i)
    model.item_factors[i] = item_scores[i];
  return model;
}

}  // namespace

TEST_CASE("rec_distribution counts top-k appearances") {
  const MfModel model = single_user_model({0.2, 0.9, 0.5});
  const std::vector<std::int32_t> users = {0};
  const std::vector<std::int32_t> candidates = {0, 1, 2};

  const RecDistribution dist = rec_distribution(model, users, candidates, 2);
  std::int64_t total = 0;
  int nonzero = 0;
  for (std::int64_t c : dist.counts) {
    total += c;
    if (c > 0) ++nonzero;
  }
  CHECK(total == 2);
  CHECK(nonzero == 2);
  CHECK(dist.counts[1] == 1);
  CHECK(dist.counts[2] == 1);
}

TEST_CASE("constant scores funnel counts into the lowest indices") {
  MfModel model = make_model(10, 5, 1, 0.0, 1.0);  // all-zero scores
  std::vector<std::int32_t> users(10);
  std::iota(users.begin(), users.end(), 0);
  const std::vector<std::int32_t> candidates = {0, 1, 2, 3, 4};
  const RecDistribution dist = rec_distribution(model, users, candidates, 2);
  CHECK(dist.counts[0] == 10);
  CHECK(dist.counts[1] == 10);
  CHECK(dist.counts[2] == 0);
}

TEST_CASE("rec_distribution is invariant under monotone score transforms") {
  Rng rng(41);
  MfModel model = make_model(6, 8, 3, -1000.0, 1000.0);
  for (double& x : model.user_factors) x = rng.uniform(-1.0, 1.0);
  for (double& x : model.item_factors) x = rng.uniform(-1.0, 1.0);
  for (double& x : model.user_bias) x = rng.uniform(-0.5, 0.5);
  for (double& x : model.item_bias) x = rng.uniform(-0.5, 0.5);
  model.global_bias = 0.3;

  // score' = 2.5 * score + 7 is strictly increasing.
  MfModel transformed = model;
  for (double& x : transformed.user_factors) x *= 2.5;
  for (double& x : transformed.user_bias) x *= 2.5;
  for (double& x : transformed.item_bias) x *= 2.5;
  transformed.global_bias = 2.5 * model.global_bias + 7.0;

  std::vector<std::int32_t> users(6);
  std::iota(users.begin(), users.end(), 0);
  std::vector<std::int32_t> candidates(8);
  std::iota(candidates.begin(), candidates.end(), 0);

  const RecDistribution a = rec_distribution(model, users, candidates, 3);
  const RecDistribution b = rec_distribution(transformed, users, candidates, 3);
  CHECK(a.counts == b.counts);
}

TEST_CASE("rec_distribution rejects an empty user set") {
  const MfModel model = single_user_model({0.1});
  CHECK_THROWS_AS(
      rec_distribution(model, {}, std::vector<std::int32_t>{0}, 1),
      std::invalid_argument);
}

TEST_CASE("explicit positives binarize at rating >= 4") {
  CHECK(is_positive(4.0, FeedbackKind::kExplicit));
  CHECK(is_positive(5.0, FeedbackKind::kExplicit));
  CHECK(!is_positive(3.0, FeedbackKind::kExplicit));
  CHECK(is_positive(1.0, FeedbackKind::kImplicit));
  CHECK(!is_positive(0.0, FeedbackKind::kImplicit));
}
