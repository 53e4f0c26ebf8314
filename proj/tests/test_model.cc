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
#include <filesystem>

#include "doctest.h"
#include "recdebias/model.h"
#include "recdebias/rng.h"
#include "recdebias/train.h"

using namespace recdebias;

TEST_CASE("predict clamps the bias-plus-dot score") {
  SUBCASE("all-zero parameters on a [0,1] scale") {
    const MfModel model = make_model(1, 1, 2, 0.0, 1.0);
    CHECK(predict(model, 0, 0) == 0.0);
  }
  SUBCASE("global bias passthrough") {
    MfModel model = make_model(1, 1, 2, 0.0, 1.0);
    model.global_bias = 0.4;
    CHECK(predict(model, 0, 0) == doctest::Approx(0.4).epsilon(1e-15));
  }
  SUBCASE("dot product by hand: (1,2).(0.5,0.5) = 1.5 inside [1,5]") {
    MfModel model = make_model(1, 1, 2, 1.0, 5.0);
    model.user_factors = {1.0, 2.0};
    model.item_factors = {0.5, 0.5};
    CHECK(predict(model, 0, 0) == doctest::Approx(1.5).epsilon(1e-15));
  }
  SUBCASE("clamping binds at both ends") {
    MfModel model = make_model(1, 1, 1, 1.0, 5.0);
    model.global_bias = 9.0;
    CHECK(predict(model, 0, 0) == 5.0);
    model.global_bias = -3.0;
    CHECK(predict(model, 0, 0) == 1.0);
  }
  SUBCASE("prediction is monotone in global_bias") {
    MfModel model = make_model(1, 1, 1, 1.0, 5.0);
    double last = -1.0;
    for (double g = 0.0; g <= 6.0; g += 0.5) {
      model.global_bias = g;
      const double p = predict(model, 0, 0);
      CHECK(p >= last);
      last = p;
    }
  }
  SUBCASE("index checks") {
    const MfModel model = make_model(2, 3, 1, 0.0, 1.0);
    CHECK_THROWS_AS(predict(model, 2, 0), std::out_of_range);
    CHECK_THROWS_AS(predict(model, 0, 3), std::out_of_range);
  }
}

namespace {

MfModel scored_model(const std::vector<double>& item_scores) {
  MfModel model = make_model(1, static_cast<std::int32_t>(item_scores.size()),
                             1, -10.0, 10.0);
  model.user_factors[0] = 1.0;
  for (std::size_t i = 0; i < item_scores.size(); ++i)
    model.item_factors[i] = item_scores[i];
  return model;
}

}  // namespace

TEST_CASE("recommend_topk ordering, ties, and truncation") {
  const MfModel model = scored_model({0.2, 0.9, 0.5});
  const std::vector<std::int32_t> candidates = {0, 1, 2};

  CHECK(recommend_topk(model, 0, 2, candidates) ==
        std::vector<std::int32_t>{1, 2});

  const MfModel flat = scored_model({0.5, 0.5, 0.5});
  CHECK(recommend_topk(flat, 0, 3, candidates) ==
        std::vector<std::int32_t>{0, 1, 2});

  CHECK(recommend_topk(model, 0, 10, candidates) ==
        std::vector<std::int32_t>{1, 2, 0});

  CHECK_THROWS_AS(recommend_topk(model, 0, 0, candidates),
                  std::invalid_argument);
  CHECK_THROWS_AS(recommend_topk(model, 0, 1, {}), std::invalid_argument);
  CHECK_THROWS_AS(recommend_topk(model, 1, 1, candidates), std::out_of_range);
}

TEST_CASE("pack/unpack round-trips every parameter block") {
  Rng rng(5);
  MfModel model = make_model(3, 4, 2, 1.0, 5.0);
  for (double& x : model.user_factors) x = rng.uniform(-1.0, 1.0);
  for (double& x : model.item_factors) x = rng.uniform(-1.0, 1.0);
  for (double& x : model.user_bias) x = rng.uniform(-1.0, 1.0);
  for (double& x : model.item_bias) x = rng.uniform(-1.0, 1.0);
  model.global_bias = 0.77;

  const std::vector<double> flat = pack_params(model);
  CHECK(flat.size() == param_count(model));
  MfModel copy = make_model(3, 4, 2, 1.0, 5.0);
  unpack_params(flat, copy);
  CHECK(copy == model);

  CHECK_THROWS_AS(unpack_params(std::vector<double>(3, 0.0), copy),
                  std::invalid_argument);
}

TEST_CASE("all_finite spots poisoned parameters") {
  MfModel model = make_model(2, 2, 2, 0.0, 1.0);
  CHECK(all_finite(model));
  model.item_factors[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK(!all_finite(model));
}

TEST_CASE("checkpoint reload predicts identically") {
  Rng rng(77);
  MfModel model = make_model(5, 6, 3, 1.0, 5.0);
  for (double& x : model.user_factors) x = rng.uniform(-0.7, 0.7);
  for (double& x : model.item_factors) x = rng.uniform(-0.7, 0.7);
  for (double& x : model.user_bias) x = rng.uniform(-0.2, 0.2);
  for (double& x : model.item_bias) x = rng.uniform(-0.2, 0.2);
  model.global_bias = 3.21987654321;

  HyperParams hp;
  hp.latent_dim = 3;
  hp.learning_rate = 0.037;

  const auto path =
      (std::filesystem::temp_directory_path() / "recdebias_ckpt_test.txt")
          .string();
  save_checkpoint({"mf-biased", 42, hp, model}, path);
  const Checkpoint back = load_checkpoint(path);

  CHECK(back.model_tag == "mf-biased");
  CHECK(back.seed == 42);
  CHECK(back.hp.learning_rate == hp.learning_rate);
  CHECK(back.model == model);  // bit-for-bit, so predictions match exactly
  for (std::int32_t u = 0; u < 5; ++u)
    for (std::int32_t i = 0; i < 6; ++i)
      CHECK(predict(back.model, u, i) == predict(model, u, i));

  CHECK_THROWS_AS(load_checkpoint(path + ".missing"), std::runtime_error);
}
