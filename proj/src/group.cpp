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

#include "grouprec/group.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace grouprec {

std::vector<ItemId> Group::observed_items() const {
  std::vector<ItemId> items;
  for (const auto& list : observed) {
    for (const ObservedRating& o : list) items.push_back(o.item);
  }
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

void validate_group(const Group& group) {
  if (group.members.empty()) throw std::invalid_argument("group has no members");
  if (group.observed.size() != group.members.size()) {
    throw std::invalid_argument("group observed lists do not match members");
  }
  std::vector<UserId> sorted = group.members;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("group has duplicate members");
  }
}

Group make_group(const RatingsMatrix& ratings, std::vector<UserId> members) {
  Group group;
  group.members = std::move(members);
  group.observed.resize(group.members.size());
  for (std::size_t m = 0; m < group.members.size(); ++m) {
    const UserId u = group.members[m];
    if (u >= ratings.n_users()) {
      throw std::invalid_argument("group member " + std::to_string(u) + " out of range");
    }
    for (const RowCell& c : ratings.row(u)) {
      if (ratings.is_train(c.entry)) group.observed[m].push_back({c.item, c.rating});
    }
  }
  validate_group(group);
  return group;
}

}  // namespace grouprec
