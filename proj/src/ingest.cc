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

#include "recdebias/ingest.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace recdebias {

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw std::runtime_error(message);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);
  return in;
}

// Shortest decimal form that parses back to the same double.
std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& context) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end)
    fail("bad number '" + text + "' in " + context);
  return value;
}

std::int64_t parse_int(const std::string& text, const std::string& context) {
  std::int64_t value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end)
    fail("bad integer '" + text + "' in " + context);
  return value;
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

void require_valid(const Dataset& ds, const std::string& origin) {
  const auto violations = validate_dataset(ds);
  if (!violations.empty())
    fail(origin + ": " + violations.front() +
         (violations.size() > 1
              ? " (+" + std::to_string(violations.size() - 1) + " more)"
              : ""));
}

Dataset parse_dense_matrix(const std::string& path, const std::string& name,
                           Source source) {
  std::ifstream in = open_input(path);
  Dataset ds;
  ds.name = name;
  ds.kind = FeedbackKind::kExplicit;
  ds.rating_min = 1.0;
  ds.rating_max = 5.0;

  std::string line;
  std::int32_t row = 0;
  std::int64_t cols = -1;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::int64_t value = 0;
    std::int64_t col = 0;
    std::string tok;
    while (ss >> tok) {
      value = parse_int(tok, path + " row " + std::to_string(row));
      if (value < 0 || value > 5)
        fail(path + ": entry " + std::to_string(value) + " outside 0..5 at row " +
             std::to_string(row));
      if (value != 0) {
        ds.interactions.push_back({row, static_cast<std::int32_t>(col),
                                   static_cast<double>(value), source});
      }
      ++col;
    }
    if (col == 0) continue;  // blank line
    if (cols == -1) {
      cols = col;
    } else if (col != cols) {
      fail(path + ": ragged matrix row " + std::to_string(row) + " (" +
           std::to_string(col) + " entries, expected " + std::to_string(cols) +
           ")");
    }
    ++row;
  }
  if (row == 0 || cols <= 0) fail(path + ": empty matrix");
  if (ds.interactions.empty()) fail(path + ": empty dataset");
  ds.num_users = row;
  ds.num_items = static_cast<std::int32_t>(cols);
  return ds;
}

}  // namespace

DatasetPair load_coat(const std::string& directory) {
  const std::filesystem::path dir(directory);
  DatasetPair pair;
  pair.biased = parse_dense_matrix((dir / "train.ascii").string(),
                                   "coat-biased", Source::kBiasedLog);
  pair.randomized = parse_dense_matrix((dir / "test.ascii").string(),
                                       "coat-randomized", Source::kRandomized);
  if (pair.biased.num_users != pair.randomized.num_users ||
      pair.biased.num_items != pair.randomized.num_items)
    fail(directory + ": biased and randomized matrices disagree on shape");
  require_valid(pair.biased, directory + "/train.ascii");
  require_valid(pair.randomized, directory + "/test.ascii");
  return pair;
}

namespace {

struct RawTriple {
  std::int64_t user;
  std::int64_t item;
  double rating;
};

std::vector<RawTriple> read_triples(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<RawTriple> triples;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::int64_t user = 0, item = 0;
    double rating = 0.0;
    if (!(ss >> user >> item >> rating)) {
      fail(path + ": malformed line " + std::to_string(line_no));
    }
    std::string extra;
    if (ss >> extra) fail(path + ": malformed line " + std::to_string(line_no));
    if (rating < 1.0 || rating > 5.0)
      fail(path + ": rating outside 1..5 at line " + std::to_string(line_no));
    triples.push_back({user, item, rating});
  }
  if (triples.empty()) fail(path + ": empty dataset");
  return triples;
}

}  // namespace

YahooLoad load_yahoo(const std::string& train_path,
                     const std::string& test_path) {
  const std::vector<RawTriple> train = read_triples(train_path);
  const std::vector<RawTriple> test = read_triples(test_path);

  // Shared dense mapping in ascending raw-id order.
  std::map<std::int64_t, std::int32_t> user_map, item_map;
  for (const auto* set : {&train, &test}) {
    for (const RawTriple& t : *set) {
      user_map.emplace(t.user, 0);
      item_map.emplace(t.item, 0);
    }
  }
  YahooLoad load;
  for (auto& [raw, dense] : user_map) {
    dense = static_cast<std::int32_t>(load.ids.user_raw_ids.size());
    load.ids.user_raw_ids.push_back(raw);
  }
  for (auto& [raw, dense] : item_map) {
    dense = static_cast<std::int32_t>(load.ids.item_raw_ids.size());
    load.ids.item_raw_ids.push_back(raw);
  }

  const auto build = [&](const std::vector<RawTriple>& triples,
                         const std::string& name, Source source,
                         const std::string& path) {
    Dataset ds;
    ds.name = name;
    ds.kind = FeedbackKind::kExplicit;
    ds.rating_min = 1.0;
    ds.rating_max = 5.0;
    ds.num_users = static_cast<std::int32_t>(load.ids.user_raw_ids.size());
    ds.num_items = static_cast<std::int32_t>(load.ids.item_raw_ids.size());
    std::unordered_set<std::int64_t> seen;
    seen.reserve(triples.size() * 2);
    for (const RawTriple& t : triples) {
      const std::int32_t u = user_map.at(t.user);
      const std::int32_t i = item_map.at(t.item);
      const std::int64_t key =
          static_cast<std::int64_t>(u) * ds.num_items + i;
      if (!seen.insert(key).second)
        fail(path + ": duplicate triple for raw user " + std::to_string(t.user) +
             ", item " + std::to_string(t.item));
      ds.interactions.push_back({u, i, t.rating, source});
    }
    require_valid(ds, path);
    return ds;
  };
  load.biased = build(train, "yahoo-biased", Source::kBiasedLog, train_path);
  load.randomized =
      build(test, "yahoo-randomized", Source::kRandomized, test_path);
  return load;
}

void write_canonical(const Dataset& ds, const std::string& path) {
  require_valid(ds, "write_canonical(" + path + ")");
  std::ofstream out(path, std::ios::binary);  // binary: keep LF endings
  if (!out) fail("cannot write " + path);
  out << "# name=" << ds.name << "\n";
  out << "# kind=" << to_string(ds.kind) << "\n";
  out << "# num_users=" << ds.num_users << "\n";
  out << "# num_items=" << ds.num_items << "\n";
  out << "# rating_min=" << format_double(ds.rating_min) << "\n";
  out << "# rating_max=" << format_double(ds.rating_max) << "\n";
  out << "user,item,rating,source\n";
  for (const Interaction& it : ds.interactions) {
    out << it.user << ',' << it.item << ',' << format_double(it.rating) << ','
        << to_string(it.source) << "\n";
  }
  if (!out) fail("write failed for " + path);
}

Dataset read_canonical(const std::string& path) {
  std::ifstream in = open_input(path);
  Dataset ds;
  ds.name = std::filesystem::path(path).stem().string();

  bool saw_header = false;
  bool meta_users = false, meta_items = false, meta_min = false,
       meta_max = false, meta_kind = false;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path + " line " + std::to_string(line_no);
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      key.erase(key.find_last_not_of(' ') + 1);
      const std::string value = line.substr(eq + 1);
      if (key == "name") {
        ds.name = value;
      } else if (key == "kind") {
        if (value == "explicit") ds.kind = FeedbackKind::kExplicit;
        else if (value == "implicit") ds.kind = FeedbackKind::kImplicit;
        else fail(where + ": unknown kind '" + value + "'");
        meta_kind = true;
      } else if (key == "num_users") {
        ds.num_users = static_cast<std::int32_t>(parse_int(value, where));
        meta_users = true;
      } else if (key == "num_items") {
        ds.num_items = static_cast<std::int32_t>(parse_int(value, where));
        meta_items = true;
      } else if (key == "rating_min") {
        ds.rating_min = parse_double(value, where);
        meta_min = true;
      } else if (key == "rating_max") {
        ds.rating_max = parse_double(value, where);
        meta_max = true;
      }
      continue;
    }
    if (!saw_header) {
      if (line != "user,item,rating,source")
        fail(where + ": expected header 'user,item,rating,source'");
      saw_header = true;
      continue;
    }
    const auto fields = split_fields(line, ',');
    if (fields.size() != 4) fail(where + ": expected 4 fields");
    Interaction it;
    it.user = static_cast<std::int32_t>(parse_int(fields[0], where));
    it.item = static_cast<std::int32_t>(parse_int(fields[1], where));
    it.rating = parse_double(fields[2], where);
    if (fields[3] == "biased-log") it.source = Source::kBiasedLog;
    else if (fields[3] == "randomized") it.source = Source::kRandomized;
    else fail(where + ": unknown source '" + fields[3] + "'");
    ds.interactions.push_back(it);
  }
  if (!saw_header) fail(path + ": missing canonical header");
  if (ds.interactions.empty()) fail(path + ": empty dataset");

  // Files without the metadata prelude get inferred shape and scale.
  if (!meta_users || !meta_items) {
    std::int32_t max_user = 0, max_item = 0;
    for (const Interaction& it : ds.interactions) {
      max_user = std::max(max_user, it.user);
      max_item = std::max(max_item, it.item);
    }
    if (!meta_users) ds.num_users = max_user + 1;
    if (!meta_items) ds.num_items = max_item + 1;
  }
  if (!meta_kind) {
    const bool binary = std::all_of(
        ds.interactions.begin(), ds.interactions.end(), [](const Interaction& it) {
          return it.rating == 0.0 || it.rating == 1.0;
        });
    ds.kind = binary ? FeedbackKind::kImplicit : FeedbackKind::kExplicit;
  }
  if (!meta_min || !meta_max) {
    if (ds.kind == FeedbackKind::kImplicit) {
      ds.rating_min = 0.0;
      ds.rating_max = 1.0;
    } else {
      double lo = 1.0, hi = 5.0;
      for (const Interaction& it : ds.interactions) {
        lo = std::min(lo, it.rating);
        hi = std::max(hi, it.rating);
      }
      if (!meta_min) ds.rating_min = lo;
      if (!meta_max) ds.rating_max = hi;
    }
  }
  require_valid(ds, path);
  return ds;
}

void write_id_map(const std::vector<std::int64_t>& raw_ids,
                  const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write " + path);
  out << "dense,raw\n";
  for (std::size_t dense = 0; dense < raw_ids.size(); ++dense)
    out << dense << ',' << raw_ids[dense] << "\n";
  if (!out) fail("write failed for " + path);
}

void write_ground_truth(const SyntheticOutput& out, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) fail("cannot write " + path);
  file << "user,item,probability\n";
  const std::int32_t num_items = out.biased.num_items;
  for (std::int32_t u = 0; u < out.biased.num_users; ++u) {
    for (std::int32_t i = 0; i < num_items; ++i) {
      file << u << ',' << i << ','
           << format_double(
                  out.ground_truth[static_cast<std::size_t>(u) * num_items + i])
           << "\n";
    }
  }
  if (!file) fail("write failed for " + path);
}

}  // namespace recdebias
