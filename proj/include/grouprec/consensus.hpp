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

#ifndef GROUPREC_CONSENSUS_HPP_
#define GROUPREC_CONSENSUS_HPP_

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "grouprec/affinity.hpp"
#include "grouprec/group.hpp"

namespace grouprec {

// Item saturation f, applied to the affinity mass s_i = sum_{j in S} W_ij.
enum class ItemSaturation { kIdentity, kLog1p };

// User saturation g_u, applied to a member's weighted coverage term.
// kScaledIdentity is g_u(x) = x / t_u with per-member times t_u > 0.
enum class UserSaturation { kIdentity, kSqrt, kScaledIdentity };

struct SaturationSpec {
  ItemSaturation item = ItemSaturation::kLog1p;
  UserSaturation user = UserSaturation::kIdentity;
  // One t_u per group member, only read for kScaledIdentity.
  std::vector<double> transport_times;
};

// Raised when the running sums of a GscoreState no longer make sense.
class ConsistencyError : public std::logic_error {
 public:
  explicit ConsistencyError(const std::string& what) : std::logic_error(what) {}
};

// Incremental state for the group consensus score
//
//   Gscore(S) = sum_u g_u( w_u * sum_{i in I_u} r_u^i * f(s_i) ),
//   s_i = sum_{j in S} W_ij,
//
// where w_u are the member weights (see member_weights) and I_u the items
// observed by member u. One running sum s_i is kept per distinct observed
// item, so a marginal gain costs O(sum_u |I_u|).
class GscoreState {
 public:
  // `rows` must hold a row of W for every item observed by the group.
  // Throws std::invalid_argument on mismatched or negative inputs.
  GscoreState(const Group& group, std::vector<double> weights, AffinityRows rows);
  GscoreState(const Group& group, std::vector<double> weights,
              std::shared_ptr<const AffinityRows> rows);

  std::size_t n_items() const { return rows_->n_items(); }
  std::size_t n_members() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const AffinityRows& rows() const { return *rows_; }

  const std::vector<ItemId>& selected() const { return selected_; }
  // s_i per distinct observed item, in rows().items order.
  std::span<const double> coverage() const { return coverage_; }

  bool is_observed(ItemId e) const;
  bool is_selected(ItemId e) const;
  bool is_candidate(ItemId e) const { return e < n_items() && !is_observed(e) && !is_selected(e); }
  // Z minus S, ascending.
  std::vector<ItemId> candidates() const;

 private:
  friend double gscore(const GscoreState&, const SaturationSpec&);
  friend double marginal_gain(const GscoreState&, const SaturationSpec&, ItemId);
  friend void commit(GscoreState&, ItemId);

  struct Term {
    std::size_t row;
    double rating;
  };

  std::vector<double> weights_;
  std::vector<std::vector<Term>> terms_;  // per member
  std::shared_ptr<const AffinityRows> rows_;  // shared by copies
  std::vector<double> coverage_;
  std::vector<char> observed_;  // per item
  std::vector<char> in_selection_;
  std::vector<ItemId> selected_;
};

// Throws std::invalid_argument if `sat` does not fit a group of
// `n_members` (missing or non-positive transport times).
void validate(const SaturationSpec& sat, std::size_t n_members);

// Gscore of the current selection. Throws ConsistencyError on a negative s_i.
double gscore(const GscoreState& state, const SaturationSpec& sat);

// Gscore(S + e) - Gscore(S) without touching the state. Throws
// std::invalid_argument when e is observed, already selected or out of range.
double marginal_gain(const GscoreState& state, const SaturationSpec& sat, ItemId e);

// Adds e to S and updates every s_i += W_ie. Throws std::invalid_argument
// when e is not a candidate (duplicate commit included).
void commit(GscoreState& state, ItemId e);

}  // namespace grouprec

#endif  // GROUPREC_CONSENSUS_HPP_
