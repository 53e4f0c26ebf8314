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

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "recdebias/harness.h"

namespace recdebias {

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw std::runtime_error(message);
}

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& context) {
  double value = 0.0;
  const auto res =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    fail("bad number '" + text + "' in " + context);
  return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::size_t metric_index(const std::string& name, const std::string& context) {
  for (std::size_t i = 0; i < kMetricNames.size(); ++i)
    if (name == kMetricNames[i]) return i;
  fail("unknown metric '" + name + "' in " + context);
}

std::ofstream open_output(const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write " + path);
  return out;
}

}  // namespace

void write_runs_csv(const ExperimentOutput& output, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "dataset,model,seed,metric,value\n";
  for (const RunResult& run : output.results) {
    for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
      out << output.dataset << ',' << run.model << ',' << run.seed << ','
          << kMetricNames[metric] << ','
          << format_double(metric_value(run.metrics, metric)) << "\n";
    }
  }
  if (!out) fail("write failed for " + path);
}

ExperimentOutput read_runs_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "dataset,model,seed,metric,value")
    fail(path + ": missing runs header");

  ExperimentOutput output;
  std::map<std::pair<std::string, std::uint64_t>, std::size_t> index;
  std::int64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path + " line " + std::to_string(line_no);
    const auto fields = split_csv_line(line);
    if (fields.size() != 5) fail(where + ": expected 5 fields");
    if (output.dataset.empty()) output.dataset = fields[0];
    const std::uint64_t seed = std::stoull(fields[2]);
    const auto key = std::make_pair(fields[1], seed);
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, output.results.size());
      output.results.push_back({fields[1], seed, MetricValues{}});
      it = index.find(key);
    }
    const std::size_t metric = metric_index(fields[3], where);
    RunResult& run = output.results[it->second];
    switch (metric) {
      case 0: run.metrics.rmse = parse_double(fields[4], where); break;
      case 1: run.metrics.auc = parse_double(fields[4], where); break;
      case 2: run.metrics.ndcg_at_5 = parse_double(fields[4], where); break;
      case 3: run.metrics.gini = parse_double(fields[4], where); break;
      case 4: run.metrics.entropy = parse_double(fields[4], where); break;
      case 5:
        run.metrics.training_time_seconds = parse_double(fields[4], where);
        break;
    }
  }
  if (output.results.empty()) fail(path + ": no runs");
  return output;
}

namespace {

void write_aggregate_rows(std::ofstream& out, const AggregateReport& report,
                          bool timings_only) {
  for (const ModelAggregate& model : report.models) {
    for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
      const bool is_timing = metric == 5;
      if (is_timing != timings_only) continue;
      const MetricStats& stats = model.stats[metric];
      out << report.dataset << ',' << model.model << ','
          << kMetricNames[metric] << ',' << format_double(stats.mean) << ','
          << format_double(stats.ci95) << ',';
      if (stats.has_improvement) out << format_double(stats.improvement_pct);
      out << "\n";
    }
  }
}

}  // namespace

void write_results_csv(const AggregateReport& report,
                       const std::string& path) {
  std::ofstream out = open_output(path);
  out << "dataset,model,metric,mean,ci95,improvement_pct\n";
  write_aggregate_rows(out, report, /*timings_only=*/false);
  if (!out) fail("write failed for " + path);
}

void write_timings_csv(const AggregateReport& report,
                       const std::string& path) {
  std::ofstream out = open_output(path);
  out << "dataset,model,metric,mean,ci95,improvement_pct\n";
  write_aggregate_rows(out, report, /*timings_only=*/true);
  if (!out) fail("write failed for " + path);
}

AggregateReport read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) ||
      line != "dataset,model,metric,mean,ci95,improvement_pct")
    fail(path + ": missing results header");

  AggregateReport report;
  std::map<std::string, std::size_t> index;
  std::int64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path + " line " + std::to_string(line_no);
    const auto fields = split_csv_line(line);
    if (fields.size() != 6) fail(where + ": expected 6 fields");
    if (report.dataset.empty()) report.dataset = fields[0];
    auto it = index.find(fields[1]);
    if (it == index.end()) {
      index.emplace(fields[1], report.models.size());
      ModelAggregate agg;
      agg.model = fields[1];
      report.models.push_back(std::move(agg));
      it = index.find(fields[1]);
    }
    const std::size_t metric = metric_index(fields[2], where);
    MetricStats& stats = report.models[it->second].stats[metric];
    stats.mean = parse_double(fields[3], where);
    stats.ci95 = parse_double(fields[4], where);
    if (!fields[5].empty()) {
      stats.has_improvement = true;
      stats.improvement_pct = parse_double(fields[5], where);
    }
  }
  if (report.models.empty()) fail(path + ": no rows");
  return report;
}

namespace {

std::string fixed2(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

std::string fixed3(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", value);
  return buf;
}

}  // namespace

std::string markdown_report(const AggregateReport& report) {
  std::ostringstream md;
  md << "# " << report.dataset << " benchmark\n\n";
  md << "## Metrics (mean ± 95% CI)\n\n";
  md << "| Model | Runs | RMSE | AUC | NDCG@5 | Gini | Entropy | Training "
        "time (s) |\n";
  md << "|---|---|---|---|---|---|---|---|\n";
  for (const ModelAggregate& model : report.models) {
    md << "| " << model.model << " | " << model.runs;
    for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
      const MetricStats& stats = model.stats[metric];
      md << " | " << fixed3(stats.mean) << " ± " << fixed3(stats.ci95);
    }
    md << " |\n";
  }

  // Best improvement per metric column, direction-aware.
  std::array<const ModelAggregate*, 6> best{};
  for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
    for (const ModelAggregate& model : report.models) {
      if (!model.stats[metric].has_improvement) continue;
      if (best[metric] == nullptr ||
          kMetricDirection[metric] * model.stats[metric].improvement_pct >
              kMetricDirection[metric] *
                  best[metric]->stats[metric].improvement_pct)
        best[metric] = &model;
    }
  }

  bool any_improvement = false;
  for (const ModelAggregate& model : report.models)
    if (model.model != report.baseline) any_improvement = true;
  if (any_improvement) {
    md << "\n## Improvement vs " << report.baseline << " (%)\n\n";
    md << "| Model | RMSE | AUC | NDCG@5 | Gini | Entropy | Training time "
          "|\n";
    md << "|---|---|---|---|---|---|---|\n";
    for (const ModelAggregate& model : report.models) {
      if (model.model == report.baseline) continue;
      md << "| " << model.model;
      for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
        const MetricStats& stats = model.stats[metric];
        md << " | ";
        if (!stats.has_improvement) {
          md << "-";
          continue;
        }
        const bool is_best = best[metric] == &model;
        if (is_best) md << "**";
        md << fixed2(stats.improvement_pct) << "%";
        if (is_best) md << "**";
      }
      md << " |\n";
    }
  }

  if (report.single_run)
    md << "\n_Confidence intervals reported as 0: at least one model has a "
          "single run._\n";
  if (!report.skips.empty()) {
    md << "\n## Skipped runs\n\n";
    for (const SkipRecord& skip : report.skips)
      md << "- " << skip.model << " (seed " << skip.seed
         << "): " << skip.reason << "\n";
  }
  return md.str();
}

void write_markdown(const AggregateReport& report, const std::string& path) {
  std::ofstream out = open_output(path);
  out << markdown_report(report);
  if (!out) fail("write failed for " + path);
}

void emit_report(const AggregateReport& report, const std::string& format,
                 const std::string& dir) {
  const std::filesystem::path base(dir);
  std::filesystem::create_directories(base);
  if (format == "csv" || format == "both") {
    write_results_csv(report, (base / "results.csv").string());
    write_timings_csv(report, (base / "timings.csv").string());
  }
  if (format == "markdown" || format == "both") {
    write_markdown(report, (base / "report.md").string());
  }
  if (format != "csv" && format != "markdown" && format != "both")
    fail("unknown report format '" + format + "'");
}

}  // namespace recdebias
