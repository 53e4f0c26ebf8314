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

#include "recdebias/train.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "train_util.h"

namespace recdebias {

void validate_hyperparams(const HyperParams& hp) {
  if (hp.latent_dim < 1) throw std::invalid_argument("latent_dim must be >= 1");
  if (!(hp.learning_rate > 0.0))
    throw std::invalid_argument("learning_rate must be > 0");
  if (hp.l2_reg < 0.0) throw std::invalid_argument("l2_reg must be >= 0");
  if (hp.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (hp.max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
  if (hp.patience < 1) throw std::invalid_argument("patience must be >= 1");
  if (!(hp.propensity_floor > 0.0 && hp.propensity_floor <= 1.0))
    throw std::invalid_argument("propensity_floor must be in (0,1]");
  if (hp.propensity_power < 0.0)
    throw std::invalid_argument("propensity_power must be >= 0");
  if (!(hp.imputation_learning_rate > 0.0))
    throw std::invalid_argument("imputation_learning_rate must be > 0");
  // Zero is allowed: it freezes the meta parameters.
  if (!(hp.meta_learning_rate >= 0.0))
    throw std::invalid_argument("meta_learning_rate must be >= 0");
  if (hp.imputation_weight < 0.0)
    throw std::invalid_argument("imputation_weight must be >= 0");
  if (!(hp.all_pairs_sample_rate > 0.0 && hp.all_pairs_sample_rate <= 1.0))
    throw std::invalid_argument("all_pairs_sample_rate must be in (0,1]");
}

DatasetInfo dataset_info(const Dataset& biased, const Dataset& randomized) {
  if (biased.num_users != randomized.num_users ||
      biased.num_items != randomized.num_items)
    throw std::invalid_argument(
        "biased and randomized datasets disagree on shape");
  if (biased.kind != randomized.kind)
    throw std::invalid_argument(
        "biased and randomized datasets disagree on feedback kind");
  DatasetInfo info;
  info.num_users = biased.num_users;
  info.num_items = biased.num_items;
  info.kind = biased.kind;
  info.rating_min = biased.rating_min;
  info.rating_max = biased.rating_max;
  return info;
}

namespace {

using internal::EarlyStopper;
using internal::WallTimer;

// Shared weighted-SGD loop behind both train_mf and train_ips: identical
// code path, so unit weights reproduce plain MF arithmetic exactly.
MfResult train_weighted(const DatasetInfo& info, const DataSplit& split,
                        const HyperParams& hp, std::uint64_t seed,
                        std::vector<WeightedExample> examples,
                        const char* trainer) {
  validate_hyperparams(hp);
  if (examples.empty())
    throw std::invalid_argument(std::string(trainer) +
                                ": training source is empty");
  WallTimer timer;
  Rng rng(seed);

  std::vector<Interaction> source_view;  // only for the global-mean init
  source_view.reserve(examples.size());
  for (const WeightedExample& ex : examples)
    source_view.push_back({ex.user, ex.item, ex.rating, Source::kBiasedLog});
  MfModel model = internal::init_model(info, hp, rng, source_view);

  GradBuffer grad(model);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<WeightedExample> batch;
  batch.reserve(hp.batch_size);

  EarlyStopper stopper(hp.patience);
  MfModel best = model;
  TrainReport report;

  for (std::int32_t epoch = 1; epoch <= hp.max_epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    std::int64_t batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += hp.batch_size) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(hp.batch_size));
      batch.clear();
      for (std::size_t pos = start; pos < end; ++pos)
        batch.push_back(examples[order[pos]]);
      loss_sum += add_weighted_loss_grad(model, batch, hp.l2_reg, grad);
      grad.apply_step(model, hp.learning_rate);
      grad.reset();
      ++batches;
    }
    internal::check_finite(model, trainer);

    const double val_auc =
        internal::validation_auc(model, split.validation, info.kind);
    report.loss_curve.push_back(
        {epoch, loss_sum / static_cast<double>(batches), val_auc});
    report.epochs_run = epoch;
    if (stopper.observe(epoch, val_auc)) best = model;
    if (stopper.should_stop(epoch)) break;
  }

  report.best_validation_auc = stopper.best_auc();
  report.wall_time_seconds = timer.seconds();
  return MfResult{std::move(best), std::move(report)};
}

}  // namespace

MfResult train_mf(const DatasetInfo& info, const DataSplit& split,
                  const HyperParams& hp, std::uint64_t seed,
                  TrainingSource source) {
  const std::vector<Interaction>& chosen =
      source == TrainingSource::kBiased ? split.train_biased : split.uniform;
  if (chosen.empty())
    throw std::invalid_argument(
        source == TrainingSource::kBiased
            ? "train_mf: biased training set is empty"
            : "train_mf: uniform training set is empty");
  std::vector<WeightedExample> examples;
  examples.reserve(chosen.size());
  for (const Interaction& it : chosen)
    examples.push_back({it.user, it.item, it.rating, 1.0});
  return train_weighted(info, split, hp, seed, std::move(examples),
                        "train_mf");
}

MfResult train_ips(const DatasetInfo& info, const DataSplit& split,
                   const HyperParams& hp, std::uint64_t seed,
                   const Propensities& props) {
  if (split.train_biased.empty())
    throw std::invalid_argument("train_ips: biased training set is empty");
  std::vector<WeightedExample> examples;
  examples.reserve(split.train_biased.size());
  for (const Interaction& it : split.train_biased) {
    const double p = props.probability(it.item, it.rating);
    if (p < props.floor || p > 1.0)
      throw std::invalid_argument(
          "train_ips: propensity outside [floor, 1]");
    examples.push_back({it.user, it.item, it.rating, 1.0 / p});
  }
  return train_weighted(info, split, hp, seed, std::move(examples),
                        "train_ips");
}

Propensities estimate_propensities(const DatasetInfo& info,
                                   const DataSplit& split,
                                   PropensityMethod method,
                                   const HyperParams& hp) {
  return estimate_propensities(split.train_biased, info.num_users,
                               info.num_items, method, hp.propensity_floor,
                               hp.propensity_power, split.uniform);
}

namespace {

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double_str(const std::string& text, const std::string& what) {
  double value = 0.0;
  const auto res =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw std::runtime_error("checkpoint: bad number in " + what);
  return value;
}

constexpr char kCheckpointMagic[] = "recdebias-checkpoint v1";

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  const MfModel& m = ckpt.model;
  out << kCheckpointMagic << "\n";
  out << "model " << ckpt.model_tag << "\n";
  out << "seed " << ckpt.seed << "\n";
  const HyperParams& hp = ckpt.hp;
  out << "hyperparams " << hp.latent_dim << ' ' << format_double(hp.learning_rate)
      << ' ' << format_double(hp.l2_reg) << ' ' << hp.batch_size << ' '
      << hp.max_epochs << ' ' << hp.patience << ' '
      << format_double(hp.propensity_floor) << ' '
      << format_double(hp.propensity_power) << ' '
      << format_double(hp.imputation_learning_rate) << ' '
      << format_double(hp.meta_learning_rate) << ' '
      << format_double(hp.imputation_weight) << ' '
      << format_double(hp.all_pairs_sample_rate) << "\n";
  out << "shape " << m.num_users << ' ' << m.num_items << ' ' << m.latent_dim
      << "\n";
  out << "scale " << format_double(m.rating_min) << ' '
      << format_double(m.rating_max) << "\n";
  out << "global " << format_double(m.global_bias) << "\n";
  const auto dump = [&](const char* tag, const std::vector<double>& values) {
    out << tag << ' ' << values.size();
    for (double v : values) out << ' ' << format_double(v);
    out << "\n";
  };
  dump("user_bias", m.user_bias);
  dump("item_bias", m.item_bias);
  dump("user_factors", m.user_factors);
  dump("item_factors", m.item_factors);
  if (!out) throw std::runtime_error("write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path);
  std::string line;
  if (!std::getline(in, line) || line != kCheckpointMagic)
    throw std::runtime_error(path + ": not a recdebias v1 checkpoint");

  Checkpoint ckpt;
  std::string tag;
  in >> tag >> ckpt.model_tag;
  if (tag != "model") throw std::runtime_error(path + ": missing model tag");
  in >> tag >> ckpt.seed;
  if (tag != "seed") throw std::runtime_error(path + ": missing seed");

  HyperParams& hp = ckpt.hp;
  std::string s;
  const auto next_double = [&](const char* what) {
    if (!(in >> s)) throw std::runtime_error(path + ": truncated checkpoint");
    return parse_double_str(s, what);
  };
  in >> tag;
  if (tag != "hyperparams")
    throw std::runtime_error(path + ": missing hyperparams");
  in >> hp.latent_dim;
  hp.learning_rate = next_double("learning_rate");
  hp.l2_reg = next_double("l2_reg");
  in >> hp.batch_size >> hp.max_epochs >> hp.patience;
  hp.propensity_floor = next_double("propensity_floor");
  hp.propensity_power = next_double("propensity_power");
  hp.imputation_learning_rate = next_double("imputation_learning_rate");
  hp.meta_learning_rate = next_double("meta_learning_rate");
  hp.imputation_weight = next_double("imputation_weight");
  hp.all_pairs_sample_rate = next_double("all_pairs_sample_rate");

  std::int32_t num_users = 0, num_items = 0, latent_dim = 0;
  in >> tag >> num_users >> num_items >> latent_dim;
  if (tag != "shape") throw std::runtime_error(path + ": missing shape");
  in >> tag;
  if (tag != "scale") throw std::runtime_error(path + ": missing scale");
  const double rmin = next_double("rating_min");
  const double rmax = next_double("rating_max");

  ckpt.model = make_model(num_users, num_items, latent_dim, rmin, rmax);
  in >> tag;
  if (tag != "global") throw std::runtime_error(path + ": missing global");
  ckpt.model.global_bias = next_double("global");

  const auto read_block = [&](const char* expect, std::vector<double>& dst) {
    in >> tag;
    std::size_t n = 0;
    in >> n;
    if (tag != expect || n != dst.size())
      throw std::runtime_error(path + ": malformed block " +
                               std::string(expect));
    for (std::size_t k = 0; k < n; ++k) dst[k] = next_double(expect);
  };
  read_block("user_bias", ckpt.model.user_bias);
  read_block("item_bias", ckpt.model.item_bias);
  read_block("user_factors", ckpt.model.user_factors);
  read_block("item_factors", ckpt.model.item_factors);
  if (!in) throw std::runtime_error(path + ": truncated checkpoint");
  return ckpt;
}

}  // namespace recdebias
