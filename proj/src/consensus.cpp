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

#include "grouprec/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace grouprec {
namespace {

double saturate_item(ItemSaturation f, double s) {
  return f == ItemSaturation::kLog1p ? std::log1p(s) : s;
}

// f(s + w) - f(s), written to avoid cancellation.
double item_increment(ItemSaturation f, double s, double w) {
  return f == ItemSaturation::kLog1p ? std::log1p(w / (1.0 + s)) : w;
}

double saturate_user(const SaturationSpec& sat, std::size_t member, double z) {
  switch (sat.user) {
    case UserSaturation::kIdentity:
      return z;
    case UserSaturation::kSqrt:
      return std::sqrt(z);
    case UserSaturation::kScaledIdentity:
      return z / sat.transport_times[member];
  }
  return z;
}

// g(z + dz) - g(z).
double user_increment(const SaturationSpec& sat, std::size_t member, double z, double dz) {
  switch (sat.user) {
    case UserSaturation::kIdentity:
      return dz;
    case UserSaturation::kSqrt: {
      const double denom = std::sqrt(z + dz) + std::sqrt(z);
      return denom > 0.0 ? dz / denom : 0.0;
    }
    case UserSaturation::kScaledIdentity:
      return dz / sat.transport_times[member];
  }
  return dz;
}

}  // namespace

void validate(const SaturationSpec& sat, std::size_t n_members) {
  if (sat.user != UserSaturation::kScaledIdentity) return;
  if (sat.transport_times.size() != n_members) {
    throw std::invalid_argument("scaled identity needs one transport time per member");
  }
  for (double t : sat.transport_times) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw std::invalid_argument("transport times must be positive");
    }
  }
}

GscoreState::GscoreState(const Group& group, std::vector<double> weights, AffinityRows rows)
    : GscoreState(group, std::move(weights),
                  std::make_shared<const AffinityRows>(std::move(rows))) {}

GscoreState::GscoreState(const Group& group, std::vector<double> weights,
                         std::shared_ptr<const AffinityRows> rows)
    : weights_(std::move(weights)), rows_(std::move(rows)) {
  if (!rows_) throw std::invalid_argument("affinity rows are null");
  validate_group(group);
  if (weights_.size() != group.size()) {
    throw std::invalid_argument("need one weight per group member");
  }
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("member weights must be finite and non-negative");
    }
  }
  if (static_cast<std::size_t>(rows_->values.rows()) != rows_->items.size()) {
    throw std::invalid_argument("affinity rows do not match their item list");
  }
  if (!rows_->values.allFinite() || (rows_->values.array() < 0.0).any()) {
    throw std::invalid_argument("item affinity must be finite and non-negative");
  }

  std::unordered_map<ItemId, std::size_t> row_of;
  for (std::size_t r = 0; r < rows_->items.size(); ++r) row_of.emplace(rows_->items[r], r);

  observed_.assign(n_items(), 0);
  in_selection_.assign(n_items(), 0);
  coverage_.assign(rows_->items.size(), 0.0);
  terms_.resize(group.size());
  for (std::size_t m = 0; m < group.size(); ++m) {
    for (const ObservedRating& o : group.observed[m]) {
      const auto it = row_of.find(o.item);
      if (it == row_of.end() || o.item >= n_items()) {
        throw std::invalid_argument("no affinity row for observed item " +
                                    std::to_string(o.item));
      }
      terms_[m].push_back({it->second, static_cast<double>(o.rating)});
      observed_[o.item] = 1;
    }
  }
}

bool GscoreState::is_observed(ItemId e) const { return e < n_items() && observed_[e]; }

bool GscoreState::is_selected(ItemId e) const { return e < n_items() && in_selection_[e]; }

std::vector<ItemId> GscoreState::candidates() const {
  std::vector<ItemId> out;
  for (ItemId e = 0; e < n_items(); ++e) {
    if (!observed_[e] && !in_selection_[e]) out.push_back(e);
  }
  return out;
}

double gscore(const GscoreState& state, const SaturationSpec& sat) {
  validate(sat, state.n_members());
  double total = 0.0;
  for (std::size_t m = 0; m < state.n_members(); ++m) {
    double inner = 0.0;
    for (const auto& term : state.terms_[m]) {
      const double s = state.coverage_[term.row];
      if (!(s >= 0.0)) {
        throw ConsistencyError("negative affinity mass " + std::to_string(s));
      }
      inner += term.rating * saturate_item(sat.item, s);
    }
    total += saturate_user(sat, m, state.weights_[m] * inner);
  }
  return total;
}

double marginal_gain(const GscoreState& state, const SaturationSpec& sat, ItemId e) {
  if (!state.is_candidate(e)) {
    throw std::invalid_argument("item " + std::to_string(e) +
                                " is observed, selected or out of range");
  }
  validate(sat, state.n_members());
  const auto column = state.rows_->values.col(e);
  double gain = 0.0;
  for (std::size_t m = 0; m < state.n_members(); ++m) {
    double inner = 0.0;
    double delta = 0.0;
    for (const auto& term : state.terms_[m]) {
      const double s = state.coverage_[term.row];
      inner += term.rating * saturate_item(sat.item, s);
      delta += term.rating *
               item_increment(sat.item, s, column(static_cast<Eigen::Index>(term.row)));
    }
    const double w = state.weights_[m];
    gain += user_increment(sat, m, w * inner, w * delta);
  }
  return gain;
}

void commit(GscoreState& state, ItemId e) {
  if (!state.is_candidate(e)) {
    throw std::invalid_argument("cannot commit item " + std::to_string(e) +
                                ": observed, already selected or out of range");
  }
  const auto column = state.rows_->values.col(e);
  for (std::size_t r = 0; r < state.coverage_.size(); ++r) {
    state.coverage_[r] += column(static_cast<Eigen::Index>(r));
  }
  state.in_selection_[e] = 1;
  state.selected_.push_back(e);
}

}  // namespace grouprec
