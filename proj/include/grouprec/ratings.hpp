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

#ifndef GROUPREC_RATINGS_HPP_
#define GROUPREC_RATINGS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace grouprec {

// Dense 0-based indices. External ids (e.g. MovieLens ids) live in IdMap.
using UserId = std::uint32_t;
using ItemId = std::uint32_t;

inline constexpr int kMinRating = 1;
inline constexpr int kMaxRating = 5;

enum class Split : std::uint8_t { kTrain, kTest };

struct RatingTriple {
  UserId user;
  ItemId item;
  int rating;

  friend bool operator==(const RatingTriple&, const RatingTriple&) = default;
};

// One cell seen from a user row: the item, its rating and the entry index.
struct RowCell {
  ItemId item;
  int rating;
  std::size_t entry;
};

// One cell seen from an item column.
struct ColCell {
  UserId user;
  int rating;
  std::size_t entry;
};

// Sparse user x item matrix of ordinal ratings with a train/test flag per
// entry. Entries are stored in (user, item) order; both a row index and a
// column index are kept. Immutable once built.
class RatingsMatrix {
 public:
  RatingsMatrix() = default;

  std::size_t n_users() const { return row_offsets_.empty() ? 0 : row_offsets_.size() - 1; }
  std::size_t n_items() const { return col_offsets_.empty() ? 0 : col_offsets_.size() - 1; }
  std::size_t n_entries() const { return entries_.size(); }
  std::size_t n_train() const;
  std::size_t n_test() const { return n_entries() - n_train(); }

  const std::vector<RatingTriple>& entries() const { return entries_; }
  const RatingTriple& entry(std::size_t e) const { return entries_[e]; }
  Split split(std::size_t e) const { return split_[e]; }
  bool is_train(std::size_t e) const { return split_[e] == Split::kTrain; }

  // Out-of-range ids yield an empty span.
  std::span<const RowCell> row(UserId u) const;
  std::span<const ColCell> col(ItemId i) const;

  // Number of train entries in row u / column i.
  std::size_t train_count_of_user(UserId u) const;
  std::size_t train_count_of_item(ItemId i) const;

  // Copy of this matrix with a new per-entry split (size must match).
  RatingsMatrix with_split(std::vector<Split> split) const;

 private:
  friend RatingsMatrix build_ratings(std::span<const RatingTriple>, std::size_t,
                                     std::size_t);

  std::vector<RatingTriple> entries_;
  std::vector<Split> split_;
  std::vector<std::size_t> row_offsets_;
  std::vector<RowCell> row_cells_;
  std::vector<std::size_t> col_offsets_;
  std::vector<ColCell> col_cells_;
};

// Builds a matrix with every entry marked train. The dimensions are the
// larger of the given minimums and (max id + 1).
// Throws std::invalid_argument on a duplicate (user, item) pair or a rating
// outside [1, 5].
RatingsMatrix build_ratings(std::span<const RatingTriple> triples,
                            std::size_t min_users = 0,
                            std::size_t min_items = 0);

struct FilterResult {
  RatingsMatrix ratings;
  // old id -> new id; nullopt when dropped.
  std::vector<std::optional<UserId>> user_map;
  std::vector<std::optional<ItemId>> item_map;
};

// Drops users with fewer than `min_count` train entries, then drops items
// that lost all of their entries through that removal. Both id spaces are
// re-densified preserving relative order; splits are preserved.
FilterResult filter_min_ratings(const RatingsMatrix& ratings, std::size_t min_count);

}  // namespace grouprec

#endif  // GROUPREC_RATINGS_HPP_
