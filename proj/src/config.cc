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

#include "recdebias/config.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace recdebias {

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw std::runtime_error(origin + ": " + what);
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream ss(value);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

using Section = std::map<std::string, std::string>;

struct ParsedIni {
  std::vector<std::pair<std::string, Section>> sections;  // in file order

  Section* find(const std::string& name) {
    for (auto& [key, section] : sections)
      if (key == name) return &section;
    return nullptr;
  }
};

ParsedIni parse_ini(const std::string& text, const std::string& origin) {
  ParsedIni ini;
  Section* current = nullptr;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const std::string where = origin + " line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') fail(where, "unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) fail(where, "empty section name");
      ini.sections.emplace_back(name, Section{});
      current = &ini.sections.back().second;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(where, "expected 'key = value'");
    if (current == nullptr) fail(where, "key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(where, "empty key");
    if (!current->emplace(key, value).second)
      fail(where, "duplicate key '" + key + "'");
  }
  return ini;
}

// Typed readers that consume keys from a section copy, so leftovers can be
// reported as unknown keys.
class SectionReader {
 public:
  SectionReader(Section section, std::string origin, std::string name)
      : section_(std::move(section)),
        origin_(std::move(origin)),
        name_(std::move(name)) {}

  std::optional<std::string> take(const std::string& key) {
    const auto it = section_.find(key);
    if (it == section_.end()) return std::nullopt;
    std::string value = it->second;
    section_.erase(it);
    return value;
  }

  std::string require(const std::string& key) {
    auto value = take(key);
    if (!value)
      fail(origin_, "[" + name_ + "] is missing required key '" + key + "'");
    return *value;
  }

  double take_double(const std::string& key, double fallback) {
    const auto value = take(key);
    return value ? parse_double(*value, key) : fallback;
  }

  std::int64_t take_int(const std::string& key, std::int64_t fallback) {
    const auto value = take(key);
    return value ? parse_int(*value, key) : fallback;
  }

  bool take_bool(const std::string& key, bool fallback) {
    const auto value = take(key);
    if (!value) return fallback;
    if (*value == "true" || *value == "1") return true;
    if (*value == "false" || *value == "0") return false;
    fail(origin_, "key '" + key + "' expects true/false");
  }

  void finish() const {
    if (!section_.empty())
      fail(origin_, "unknown key '" + section_.begin()->first + "' in [" +
                        name_ + "]");
  }

  double parse_double(const std::string& text, const std::string& key) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
      fail(origin_, "key '" + key + "' expects a number, got '" + text + "'");
    return v;
  }

  std::int64_t parse_int(const std::string& text, const std::string& key) {
    std::int64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
      fail(origin_, "key '" + key + "' expects an integer, got '" + text + "'");
    return v;
  }

 private:
  Section section_;
  std::string origin_;
  std::string name_;
};

bool known_model_tag(const std::string& tag) {
  return std::any_of(std::begin(kModelTags), std::end(kModelTags),
                     [&](const char* known) { return tag == known; });
}

HyperParams read_hyperparams(SectionReader& reader, const HyperParams& base) {
  HyperParams hp = base;
  hp.latent_dim =
      static_cast<std::int32_t>(reader.take_int("latent_dim", hp.latent_dim));
  hp.learning_rate = reader.take_double("learning_rate", hp.learning_rate);
  hp.l2_reg = reader.take_double("l2_reg", hp.l2_reg);
  hp.batch_size =
      static_cast<std::int32_t>(reader.take_int("batch_size", hp.batch_size));
  hp.max_epochs =
      static_cast<std::int32_t>(reader.take_int("max_epochs", hp.max_epochs));
  hp.patience =
      static_cast<std::int32_t>(reader.take_int("patience", hp.patience));
  hp.propensity_floor =
      reader.take_double("propensity_floor", hp.propensity_floor);
  hp.propensity_power =
      reader.take_double("propensity_power", hp.propensity_power);
  hp.imputation_learning_rate = reader.take_double(
      "imputation_learning_rate", hp.imputation_learning_rate);
  hp.meta_learning_rate =
      reader.take_double("meta_learning_rate", hp.meta_learning_rate);
  hp.imputation_weight =
      reader.take_double("imputation_weight", hp.imputation_weight);
  hp.all_pairs_sample_rate =
      reader.take_double("all_pairs_sample_rate", hp.all_pairs_sample_rate);
  return hp;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin) {
  ParsedIni ini = parse_ini(text, origin);
  ExperimentConfig cfg;

  Section* dataset_section = ini.find("dataset");
  if (dataset_section == nullptr) fail(origin, "missing [dataset] section");
  SectionReader dataset(*dataset_section, origin, "dataset");
  const std::string type = dataset.require("type");
  cfg.name = dataset.take("name").value_or(type);
  if (type == "coat") {
    cfg.type = ExperimentConfig::DatasetType::kCoat;
    cfg.coat_dir = dataset.require("dir");
  } else if (type == "yahoo") {
    cfg.type = ExperimentConfig::DatasetType::kYahoo;
    cfg.yahoo_train = dataset.require("train");
    cfg.yahoo_test = dataset.require("test");
  } else if (type == "canonical") {
    cfg.type = ExperimentConfig::DatasetType::kCanonical;
    cfg.canonical_biased = dataset.require("biased");
    cfg.canonical_randomized = dataset.require("randomized");
  } else if (type == "synthetic") {
    cfg.type = ExperimentConfig::DatasetType::kSynthetic;
    SyntheticConfig& syn = cfg.synthetic;
    syn.num_users = static_cast<std::int32_t>(dataset.take_int("num_users", 0));
    syn.num_items = static_cast<std::int32_t>(dataset.take_int("num_items", 0));
    syn.latent_dim =
        static_cast<std::int32_t>(dataset.take_int("latent_dim", syn.latent_dim));
    syn.slots = static_cast<std::int32_t>(dataset.take_int("slots", syn.slots));
    syn.position_decay =
        dataset.take_double("position_decay", syn.position_decay);
    syn.popularity_skew =
        dataset.take_double("popularity_skew", syn.popularity_skew);
    syn.biased_impressions = dataset.take_int("biased_impressions", 0);
    syn.randomized_impressions = dataset.take_int("randomized_impressions", 0);
    syn.purchase_noise = dataset.take_double("purchase_noise", syn.purchase_noise);
    syn.seed = static_cast<std::uint64_t>(dataset.take_int("seed", 0));
  } else {
    fail(origin, "unknown dataset type '" + type + "'");
  }
  cfg.uniform_training = dataset.take_bool("uniform_training", true);
  dataset.finish();

  Section* run_section = ini.find("run");
  if (run_section == nullptr) fail(origin, "missing [run] section");
  SectionReader run(*run_section, origin, "run");
  const std::vector<std::string> tags = split_list(run.require("models"));
  if (tags.empty()) fail(origin, "models list is empty");
  cfg.repeats = static_cast<std::int32_t>(run.take_int("repeats", 1));
  if (cfg.repeats < 1 || cfg.repeats > 10)
    fail(origin, "repeats must be within 1..10");
  cfg.base_seed = static_cast<std::uint64_t>(run.take_int("base_seed", 0));
  if (const auto ratios = run.take("ratios")) {
    const auto parts = split_list(*ratios);
    if (parts.size() != 3) fail(origin, "ratios expects three numbers");
    cfg.ratios.uniform = run.parse_double(parts[0], "ratios");
    cfg.ratios.validation = run.parse_double(parts[1], "ratios");
    cfg.ratios.test = run.parse_double(parts[2], "ratios");
  }
  cfg.out_dir = run.take("out").value_or("runs");
  cfg.format = run.take("format").value_or("both");
  if (cfg.format != "csv" && cfg.format != "markdown" && cfg.format != "both")
    fail(origin, "format must be csv, markdown, or both");
  run.finish();

  for (const std::string& tag : tags) {
    if (!known_model_tag(tag)) fail(origin, "unknown model tag '" + tag + "'");
    ModelSpec spec;
    spec.tag = tag;
    if (Section* model_section = ini.find("model:" + tag)) {
      SectionReader reader(*model_section, origin, "model:" + tag);
      spec.hp = read_hyperparams(reader, HyperParams{});
      if (const auto method = reader.take("propensity")) {
        if (*method == "item-popularity")
          spec.propensity = PropensityMethod::kItemPopularity;
        else if (*method == "naive-bayes")
          spec.propensity = PropensityMethod::kNaiveBayes;
        else
          fail(origin, "unknown propensity method '" + *method + "'");
      }
      reader.finish();
    }
    validate_hyperparams(spec.hp);
    cfg.models.push_back(std::move(spec));
  }

  // Reject config sections that match nothing.
  for (const auto& [name, section] : ini.sections) {
    if (name == "dataset" || name == "run") continue;
    if (name.rfind("model:", 0) == 0) {
      const std::string tag = name.substr(6);
      if (!known_model_tag(tag)) fail(origin, "unknown section [" + name + "]");
      continue;
    }
    fail(origin, "unknown section [" + name + "]");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

}  // namespace recdebias
