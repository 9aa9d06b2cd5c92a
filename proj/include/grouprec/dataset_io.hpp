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

#ifndef GROUPREC_DATASET_IO_HPP_
#define GROUPREC_DATASET_IO_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "grouprec/features.hpp"
#include "grouprec/ratings.hpp"

namespace grouprec {

enum class DatasetFormat { kMovieLens, kCsv };

std::string to_string(DatasetFormat format);
// Accepts "movielens-dat" and "csv".
DatasetFormat parse_dataset_format(const std::string& text);

// External id <-> dense internal index.
class IdMap {
 public:
  IdMap() = default;
  // `external` must hold distinct ids; index = position.
  explicit IdMap(std::vector<std::int64_t> external);

  std::size_t size() const { return external_.size(); }
  std::int64_t external(std::uint32_t index) const { return external_.at(index); }
  // Throws std::out_of_range for unknown ids.
  std::uint32_t index(std::int64_t external) const;
  const std::vector<std::int64_t>& externals() const { return external_; }

  // Keeps the entries whose old index maps to a new one (see FilterResult).
  template <typename Map>
  IdMap remapped(const Map& old_to_new, std::size_t new_size) const {
    std::vector<std::int64_t> ext(new_size);
    for (std::size_t old = 0; old < old_to_new.size(); ++old) {
      if (old_to_new[old]) ext[*old_to_new[old]] = external_[old];
    }
    return IdMap(std::move(ext));
  }

 private:
  std::vector<std::int64_t> external_;
  std::unordered_map<std::int64_t, std::uint32_t> index_;
};

struct Dataset {
  RatingsMatrix ratings;
  IdMap users;
  IdMap items;
  std::size_t malformed_lines = 0;
};

// Parses MovieLens `UserID::MovieID::Rating::Timestamp` lines or CSV
// `user,item,rating` lines (an optional trailing timestamp column and a
// non-numeric header line are accepted). Lines with a bad field count,
// non-integer fields, ratings outside [1, 5] or a repeated (user, item) pair
// are skipped and counted as malformed. Ids are densified in ascending
// external order. Throws std::runtime_error when no line is valid.
Dataset parse_ratings(std::istream& in, DatasetFormat format);

// Throws std::runtime_error when the file cannot be read.
Dataset ingest(const std::string& path, DatasetFormat format);

// Applies filter_min_ratings and carries the id maps along.
Dataset filter_dataset(const Dataset& dataset, std::size_t min_count);

// --- Artifact files -------------------------------------------------------
//
// split.csv       user_index,item_index,rating,split   (split: train|test)
// users.csv       index,external_id
// items.csv       index,external_id
// *_features.csv  one row per entity, d comma-separated values (%.17g)
//
// Values are written with enough digits to read back bit-identically.

void write_id_map(const std::string& path, const IdMap& map);
IdMap read_id_map(const std::string& path);

void write_split(const std::string& path, const RatingsMatrix& ratings);
RatingsMatrix read_split(const std::string& path, std::size_t n_users, std::size_t n_items);

void write_features(const std::string& path, const FeatureMatrix& features);
FeatureMatrix read_features(const std::string& path);

// Shortest %.17g rendering; used by every CSV writer here.
std::string format_double(double value);

// Splits a CSV line on commas (no quoting).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace grouprec

#endif  // GROUPREC_DATASET_IO_HPP_
