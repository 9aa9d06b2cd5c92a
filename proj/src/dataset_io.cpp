// Copyright 2026 The grouprec Authors.
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

#include "grouprec/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace grouprec {
namespace {

std::vector<std::string> split_on(const std::string& line, const std::string& sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + sep.size();
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_int(const std::string& text, std::int64_t& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw std::runtime_error("not a number: '" + text + "'");
  }
  return value;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

std::string to_string(DatasetFormat format) {
  return format == DatasetFormat::kMovieLens ? "movielens-dat" : "csv";
}

DatasetFormat parse_dataset_format(const std::string& text) {
  if (text == "movielens-dat" || text == "movielens") return DatasetFormat::kMovieLens;
  if (text == "csv") return DatasetFormat::kCsv;
  throw std::invalid_argument("unknown dataset format '" + text + "'");
}

IdMap::IdMap(std::vector<std::int64_t> external) : external_(std::move(external)) {
  for (std::size_t i = 0; i < external_.size(); ++i) {
    if (!index_.emplace(external_[i], static_cast<std::uint32_t>(i)).second) {
      throw std::invalid_argument("duplicate external id " + std::to_string(external_[i]));
    }
  }
}

std::uint32_t IdMap::index(std::int64_t external) const {
  const auto it = index_.find(external);
  if (it == index_.end()) throw std::out_of_range("unknown id " + std::to_string(external));
  return it->second;
}

Dataset parse_ratings(std::istream& in, DatasetFormat format) {
  struct Raw {
    std::int64_t user, item;
    int rating;
  };
  std::vector<Raw> raw;
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  Dataset out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    const bool is_first = std::exchange(first, false);
    if (trim(line).empty()) continue;
    std::vector<std::string> fields =
        format == DatasetFormat::kMovieLens ? split_on(line, "::") : split_csv_line(line);
    const bool count_ok = format == DatasetFormat::kMovieLens
                              ? fields.size() == 4
                              : (fields.size() == 3 || fields.size() == 4);
    std::int64_t user = 0, item = 0, rating = 0;
    const bool numeric = count_ok && parse_int(fields[0], user) && parse_int(fields[1], item) &&
                         parse_int(fields[2], rating);
    if (!numeric) {
      // A leading CSV header is not a malformed rating.
      if (!(is_first && format == DatasetFormat::kCsv)) ++out.malformed_lines;
      continue;
    }
    if (rating < kMinRating || rating > kMaxRating || !seen.emplace(user, item).second) {
      ++out.malformed_lines;
      continue;
    }
    raw.push_back({user, item, static_cast<int>(rating)});
  }
  if (raw.empty()) throw std::runtime_error("no valid rating lines");

  std::vector<std::int64_t> users, items;
  for (const Raw& r : raw) {
    users.push_back(r.user);
    items.push_back(r.item);
  }
  for (auto* ids : {&users, &items}) {
    std::sort(ids->begin(), ids->end());
    ids->erase(std::unique(ids->begin(), ids->end()), ids->end());
  }
  out.users = IdMap(std::move(users));
  out.items = IdMap(std::move(items));
  std::vector<RatingTriple> triples;
  triples.reserve(raw.size());
  for (const Raw& r : raw) {
    triples.push_back({out.users.index(r.user), out.items.index(r.item), r.rating});
  }
  out.ratings = build_ratings(triples, out.users.size(), out.items.size());
  return out;
}

Dataset ingest(const std::string& path, DatasetFormat format) {
  std::ifstream in = open_in(path);
  return parse_ratings(in, format);
}

Dataset filter_dataset(const Dataset& dataset, std::size_t min_count) {
  FilterResult f = filter_min_ratings(dataset.ratings, min_count);
  Dataset out;
  out.users = dataset.users.remapped(f.user_map, f.ratings.n_users());
  out.items = dataset.items.remapped(f.item_map, f.ratings.n_items());
  out.ratings = std::move(f.ratings);
  out.malformed_lines = dataset.malformed_lines;
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return std::string(buf, ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::string stripped = line;
  if (!stripped.empty() && stripped.back() == '\r') stripped.pop_back();
  return split_on(stripped, ",");
}

void write_id_map(const std::string& path, const IdMap& map) {
  std::ofstream out = open_out(path);
  out << "index,external_id\n";
  for (std::size_t i = 0; i < map.size(); ++i) {
    out << i << ',' << map.external(static_cast<std::uint32_t>(i)) << '\n';
  }
}

IdMap read_id_map(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::int64_t> ext;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    std::int64_t index = 0, id = 0;
    if (f.size() != 2 || !parse_int(f[0], index) || !parse_int(f[1], id) ||
        index != static_cast<std::int64_t>(ext.size())) {
      throw std::runtime_error(path + ": bad id map line '" + line + "'");
    }
    ext.push_back(id);
  }
  return IdMap(std::move(ext));
}

void write_split(const std::string& path, const RatingsMatrix& ratings) {
  std::ofstream out = open_out(path);
  out << "user_index,item_index,rating,split\n";
  for (std::size_t e = 0; e < ratings.n_entries(); ++e) {
    const RatingTriple& t = ratings.entry(e);
    out << t.user << ',' << t.item << ',' << t.rating << ','
        << (ratings.is_train(e) ? "train" : "test") << '\n';
  }
}

RatingsMatrix read_split(const std::string& path, std::size_t n_users, std::size_t n_items) {
  std::ifstream in = open_in(path);
  std::string line;
  std::getline(in, line);
  std::vector<RatingTriple> triples;
  std::vector<Split> split;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    std::int64_t u = 0, i = 0, r = 0;
    if (f.size() != 4 || !parse_int(f[0], u) || !parse_int(f[1], i) || !parse_int(f[2], r) ||
        (f[3] != "train" && f[3] != "test")) {
      throw std::runtime_error(path + ": bad split line '" + line + "'");
    }
    triples.push_back({static_cast<UserId>(u), static_cast<ItemId>(i), static_cast<int>(r)});
    split.push_back(f[3] == "train" ? Split::kTrain : Split::kTest);
  }
  // Written in entry order, so the mask lines up after build_ratings sorts.
  return build_ratings(triples, n_users, n_items).with_split(std::move(split));
}

void write_features(const std::string& path, const FeatureMatrix& features) {
  std::ofstream out = open_out(path);
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const auto row = features.row(r);
    for (Eigen::Index c = 0; c < row.size(); ++c) {
      if (c > 0) out << ',';
      out << format_double(row(c));
    }
    out << '\n';
  }
}

FeatureMatrix read_features(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (const std::string& f : split_csv_line(line)) row.push_back(parse_double(f));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error(path + ": ragged feature rows");
    }
    rows.push_back(std::move(row));
  }
  const auto d = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  RowMajorMatrix values(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      values(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    }
  }
  return FeatureMatrix(std::move(values));
}

}  // namespace grouprec
