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

#include "grouprec/ratings.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace grouprec {

std::size_t RatingsMatrix::n_train() const {
  return static_cast<std::size_t>(
      std::count(split_.begin(), split_.end(), Split::kTrain));
}

std::span<const RowCell> RatingsMatrix::row(UserId u) const {
  if (u >= n_users()) return {};
  return std::span<const RowCell>(row_cells_).subspan(
      row_offsets_[u], row_offsets_[u + 1] - row_offsets_[u]);
}

std::span<const ColCell> RatingsMatrix::col(ItemId i) const {
  if (i >= n_items()) return {};
  return std::span<const ColCell>(col_cells_).subspan(
      col_offsets_[i], col_offsets_[i + 1] - col_offsets_[i]);
}

std::size_t RatingsMatrix::train_count_of_user(UserId u) const {
  std::size_t n = 0;
  for (const RowCell& c : row(u)) n += is_train(c.entry) ? 1 : 0;
  return n;
}

std::size_t RatingsMatrix::train_count_of_item(ItemId i) const {
  std::size_t n = 0;
  for (const ColCell& c : col(i)) n += is_train(c.entry) ? 1 : 0;
  return n;
}

RatingsMatrix RatingsMatrix::with_split(std::vector<Split> split) const {
  if (split.size() != entries_.size()) {
    throw std::invalid_argument("split mask size " + std::to_string(split.size()) +
                                " does not match " + std::to_string(entries_.size()) +
                                " entries");
  }
  RatingsMatrix out = *this;
  out.split_ = std::move(split);
  return out;
}

RatingsMatrix build_ratings(std::span<const RatingTriple> triples,
                            std::size_t min_users, std::size_t min_items) {
  RatingsMatrix m;
  m.entries_.assign(triples.begin(), triples.end());
  std::size_t n_users = min_users;
  std::size_t n_items = min_items;
  for (const RatingTriple& t : m.entries_) {
    if (t.rating < kMinRating || t.rating > kMaxRating) {
      throw std::invalid_argument("rating " + std::to_string(t.rating) + " for (" +
                                  std::to_string(t.user) + "," + std::to_string(t.item) +
                                  ") outside [1,5]");
    }
    n_users = std::max<std::size_t>(n_users, std::size_t{t.user} + 1);
    n_items = std::max<std::size_t>(n_items, std::size_t{t.item} + 1);
  }
  std::sort(m.entries_.begin(), m.entries_.end(),
            [](const RatingTriple& a, const RatingTriple& b) {
              return a.user != b.user ? a.user < b.user : a.item < b.item;
            });
  for (std::size_t e = 1; e < m.entries_.size(); ++e) {
    const RatingTriple& a = m.entries_[e - 1];
    const RatingTriple& b = m.entries_[e];
    if (a.user == b.user && a.item == b.item) {
      throw std::invalid_argument("duplicate rating for pair (" + std::to_string(a.user) +
                                  "," + std::to_string(a.item) + ")");
    }
  }
  m.split_.assign(m.entries_.size(), Split::kTrain);

  m.row_offsets_.assign(n_users + 1, 0);
  m.col_offsets_.assign(n_items + 1, 0);
  for (const RatingTriple& t : m.entries_) {
    ++m.row_offsets_[t.user + 1];
    ++m.col_offsets_[t.item + 1];
  }
  for (std::size_t u = 0; u < n_users; ++u) m.row_offsets_[u + 1] += m.row_offsets_[u];
  for (std::size_t i = 0; i < n_items; ++i) m.col_offsets_[i + 1] += m.col_offsets_[i];

  m.row_cells_.resize(m.entries_.size());
  m.col_cells_.resize(m.entries_.size());
  std::vector<std::size_t> col_fill(m.col_offsets_.begin(), m.col_offsets_.end() - 1);
  // Entries are user-major, so rows fill in item order and columns in user order.
  for (std::size_t e = 0; e < m.entries_.size(); ++e) {
    const RatingTriple& t = m.entries_[e];
    m.row_cells_[e] = RowCell{t.item, t.rating, e};
    m.col_cells_[col_fill[t.item]++] = ColCell{t.user, t.rating, e};
  }
  return m;
}

FilterResult filter_min_ratings(const RatingsMatrix& ratings, std::size_t min_count) {
  FilterResult out;
  out.user_map.assign(ratings.n_users(), std::nullopt);
  out.item_map.assign(ratings.n_items(), std::nullopt);

  UserId next_user = 0;
  for (UserId u = 0; u < ratings.n_users(); ++u) {
    if (ratings.train_count_of_user(u) >= min_count) out.user_map[u] = next_user++;
  }

  std::vector<std::size_t> kept_per_item(ratings.n_items(), 0);
  for (const RatingTriple& t : ratings.entries()) {
    if (out.user_map[t.user]) ++kept_per_item[t.item];
  }
  ItemId next_item = 0;
  for (ItemId i = 0; i < ratings.n_items(); ++i) {
    const bool emptied = kept_per_item[i] == 0 && !ratings.col(i).empty();
    if (!emptied) out.item_map[i] = next_item++;
  }

  std::vector<RatingTriple> kept;
  std::vector<Split> kept_split;
  for (std::size_t e = 0; e < ratings.n_entries(); ++e) {
    const RatingTriple& t = ratings.entry(e);
    if (!out.user_map[t.user]) continue;
    kept.push_back({*out.user_map[t.user], *out.item_map[t.item], t.rating});
    kept_split.push_back(ratings.split(e));
  }
  // Relabelling is monotone in both ids, so build_ratings keeps entry order
  // and the split mask lines up.
  out.ratings = build_ratings(kept, next_user, next_item).with_split(std::move(kept_split));
  return out;
}

}  // namespace grouprec
