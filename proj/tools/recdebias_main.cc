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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "recdebias/config.h"
#include "recdebias/harness.h"
#include "recdebias/ingest.h"
#include "recdebias/kernels.h"
#include "recdebias/train.h"

namespace {

using namespace recdebias;

void apply_backend(const std::string& name) {
  if (name.empty() || name == "auto") return;
  if (name == "scalar") kernels::force_backend(kernels::Backend::kScalar);
  else if (name == "avx2") kernels::force_backend(kernels::Backend::kAvx2);
  else if (name == "neon") kernels::force_backend(kernels::Backend::kNeon);
  else throw std::runtime_error("unknown backend '" + name + "'");
}

int cmd_ingest(const std::string& config_path, const std::string& out_dir) {
  const ExperimentConfig cfg = load_config(config_path);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path out(out_dir);

  if (cfg.type == ExperimentConfig::DatasetType::kYahoo) {
    const YahooLoad load = load_yahoo(cfg.yahoo_train, cfg.yahoo_test);
    write_canonical(load.biased, (out / (cfg.name + "-biased.csv")).string());
    write_canonical(load.randomized,
                    (out / (cfg.name + "-randomized.csv")).string());
    write_id_map(load.ids.user_raw_ids,
                 (out / (cfg.name + "-users.map.csv")).string());
    write_id_map(load.ids.item_raw_ids,
                 (out / (cfg.name + "-items.map.csv")).string());
  } else if (cfg.type == ExperimentConfig::DatasetType::kSynthetic) {
    const SyntheticOutput synth = generate_synthetic(cfg.synthetic);
    write_canonical(synth.biased, (out / (cfg.name + "-biased.csv")).string());
    write_canonical(synth.randomized,
                    (out / (cfg.name + "-randomized.csv")).string());
    write_ground_truth(synth,
                       (out / (cfg.name + "-ground-truth.csv")).string());
  } else {
    const DatasetPair pair = load_dataset(cfg);
    write_canonical(pair.biased, (out / (cfg.name + "-biased.csv")).string());
    write_canonical(pair.randomized,
                    (out / (cfg.name + "-randomized.csv")).string());
  }
  std::cout << "ingested '" << cfg.name << "' into " << out_dir << "\n";
  return 0;
}

const ModelSpec& find_model(const ExperimentConfig& cfg,
                            const std::string& tag) {
  for (const ModelSpec& spec : cfg.models)
    if (spec.tag == tag) return spec;
  throw std::runtime_error("model '" + tag +
                           "' is not in the config's models list");
}

int cmd_train(const std::string& config_path, const std::string& tag,
              std::uint64_t seed, const std::string& out_path) {
  const ExperimentConfig cfg = load_config(config_path);
  const ModelSpec& spec = find_model(cfg, tag);
  const DatasetPair data = load_dataset(cfg);
  const DatasetInfo info = dataset_info(data.biased, data.randomized);

  RandomizedParts parts =
      split_randomized(data.randomized.interactions, cfg.ratios, seed);
  if (!cfg.uniform_training) parts.uniform.clear();
  const DataSplit split =
      attach_biased(data.biased.interactions, std::move(parts));

  MfModel model;
  TrainReport report;
  if (tag == "mf-biased") {
    MfResult res = train_mf(info, split, spec.hp, seed, TrainingSource::kBiased);
    model = std::move(res.model);
    report = std::move(res.report);
  } else if (tag == "mf-uniform") {
    if (split.uniform.empty())
      throw std::runtime_error(
          "mf-uniform requires randomized training data, which this dataset "
          "does not provide");
    MfResult res =
        train_mf(info, split, spec.hp, seed, TrainingSource::kUniform);
    model = std::move(res.model);
    report = std::move(res.report);
  } else if (tag == "ips") {
    const PropensityMethod method =
        spec.propensity.value_or(info.kind == FeedbackKind::kExplicit &&
                                         !split.uniform.empty()
                                     ? PropensityMethod::kNaiveBayes
                                     : PropensityMethod::kItemPopularity);
    const Propensities props = estimate_propensities(info, split, method, spec.hp);
    MfResult res = train_ips(info, split, spec.hp, seed, props);
    model = std::move(res.model);
    report = std::move(res.report);
  } else if (tag == "dr") {
    if (split.uniform.empty())
      throw std::runtime_error(
          "dr requires randomized training data, which this dataset does not "
          "provide");
    const PropensityMethod method =
        spec.propensity.value_or(info.kind == FeedbackKind::kExplicit
                                     ? PropensityMethod::kNaiveBayes
                                     : PropensityMethod::kItemPopularity);
    const Propensities props = estimate_propensities(info, split, method, spec.hp);
    DrResult res = train_dr(info, split, spec.hp, seed, props);
    model = std::move(res.model);
    report = std::move(res.report);
  } else if (tag == "autodebias") {
    if (split.uniform.empty())
      throw std::runtime_error(
          "autodebias requires randomized training data, which this dataset "
          "does not provide");
    AutoDebiasResult res = train_autodebias(info, split, spec.hp, seed);
    model = std::move(res.model);
    report = std::move(res.report);
  }

  Checkpoint ckpt{tag, seed, spec.hp, std::move(model)};
  save_checkpoint(ckpt, out_path);
  std::printf("trained %s: %d epochs, best validation AUC %.4f, %.2fs\n",
              tag.c_str(), report.epochs_run, report.best_validation_auc,
              report.wall_time_seconds);
  std::cout << "checkpoint written to " << out_path << "\n";
  return 0;
}

int cmd_evaluate(const std::string& config_path,
                 const std::string& checkpoint_path, std::uint64_t seed,
                 bool seed_given) {
  const ExperimentConfig cfg = load_config(config_path);
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  const DatasetPair data = load_dataset(cfg);
  const DatasetInfo info = dataset_info(data.biased, data.randomized);

  const std::uint64_t split_seed = seed_given ? seed : ckpt.seed;
  RandomizedParts parts =
      split_randomized(data.randomized.interactions, cfg.ratios, split_seed);
  const DataSplit split =
      attach_biased(data.biased.interactions, std::move(parts));

  const MetricValues metrics = evaluate_model(ckpt.model, split.test, info);
  std::printf("model=%s seed=%llu test_size=%zu\n", ckpt.model_tag.c_str(),
              static_cast<unsigned long long>(split_seed), split.test.size());
  std::printf("rmse=%.6f\nauc=%.6f\nndcg_at_5=%.6f\ngini=%.6f\nentropy=%.6f\n",
              metrics.rmse, metrics.auc, metrics.ndcg_at_5, metrics.gini,
              metrics.entropy);
  return 0;
}

int cmd_bench(const std::string& config_path, int repeats_override,
              const std::string& out_override,
              const std::string& format_override) {
  ExperimentConfig cfg = load_config(config_path);
  if (repeats_override > 0) cfg.repeats = repeats_override;
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (!format_override.empty()) cfg.format = format_override;

  const ExperimentOutput output = run_experiment(cfg);
  const AggregateReport report = aggregate(output, "mf-biased");

  std::filesystem::create_directories(cfg.out_dir);
  write_runs_csv(output,
                 (std::filesystem::path(cfg.out_dir) / "runs.csv").string());
  emit_report(report, cfg.format, cfg.out_dir);
  std::cout << markdown_report(report) << "\n";
  std::cout << "artifacts written to " << cfg.out_dir << "\n";
  return 0;
}

int cmd_report(const std::string& runs_path, const std::string& out_dir,
               const std::string& format) {
  const ExperimentOutput output = read_runs_csv(runs_path);
  const AggregateReport report = aggregate(output, "mf-biased");
  emit_report(report, format, out_dir);
  std::cout << markdown_report(report) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recdebias: matrix-factorization debiasing benchmark"};
  app.require_subcommand(1);
  std::string backend = "auto";
  app.add_option("--backend", backend,
                 "kernel backend: auto, scalar, avx2, neon");

  std::string config_path, model_tag, out_path, format, checkpoint_path,
      runs_path;
  std::uint64_t seed = 0;
  int repeats = 0;

  CLI::App* ingest = app.add_subcommand(
      "ingest", "load or generate a dataset and write canonical CSV files");
  ingest->add_option("--config", config_path, "experiment config file")
      ->required();
  ingest->add_option("--out", out_path, "output directory")->required();

  CLI::App* train =
      app.add_subcommand("train", "train one model once and checkpoint it");
  train->add_option("--config", config_path, "experiment config file")
      ->required();
  train->add_option("--model", model_tag, "model tag")
      ->required()
      ->check(CLI::IsMember({"mf-biased", "mf-uniform", "ips", "dr",
                             "autodebias"}));
  train->add_option("--seed", seed, "split/train seed")->default_val(0);
  train->add_option("--out", out_path, "checkpoint path")->required();

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "evaluate a checkpoint on a dataset's test split");
  evaluate->add_option("--config", config_path, "experiment config file")
      ->required();
  evaluate->add_option("--checkpoint", checkpoint_path, "checkpoint path")
      ->required();
  CLI::Option* eval_seed = evaluate->add_option(
      "--seed", seed, "split seed (defaults to the checkpoint's)");

  CLI::App* bench = app.add_subcommand(
      "bench", "run the full seeded comparison and emit reports");
  bench->add_option("--config", config_path, "experiment config file")
      ->required();
  bench->add_option("--repeats", repeats, "override the config's repeats")
      ->check(CLI::Range(1, 10));
  bench->add_option("--out", out_path, "override the output directory");
  bench->add_option("--format", format, "csv, markdown, or both")
      ->check(CLI::IsMember({"csv", "markdown", "both"}));

  CLI::App* report =
      app.add_subcommand("report", "re-aggregate stored per-run results");
  report->add_option("--runs", runs_path, "runs.csv from a bench invocation")
      ->required();
  report->add_option("--out", out_path, "output directory")->default_val("runs");
  report->add_option("--format", format, "csv, markdown, or both")
      ->default_val("both")
      ->check(CLI::IsMember({"csv", "markdown", "both"}));

  CLI11_PARSE(app, argc, argv);

  try {
    apply_backend(backend);
    if (app.got_subcommand(ingest)) return cmd_ingest(config_path, out_path);
    if (app.got_subcommand(train))
      return cmd_train(config_path, model_tag, seed, out_path);
    if (app.got_subcommand(evaluate))
      return cmd_evaluate(config_path, checkpoint_path, seed,
                          eval_seed->count() > 0);
    if (app.got_subcommand(bench))
      return cmd_bench(config_path, repeats, out_path, format);
    if (app.got_subcommand(report))
      return cmd_report(runs_path, out_path, format);
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return 0;
}
