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

#ifndef GROUPREC_GROUP_HPP_
#define GROUPREC_GROUP_HPP_

#include <vector>

#include "grouprec/ratings.hpp"

namespace grouprec {

struct ObservedRating {
  ItemId item;
  int rating;
};

// An ordered set of users together with what each of them rated in the
// train split. observed[m] belongs to members[m].
struct Group {
  std::vector<UserId> members;
  std::vector<std::vector<ObservedRating>> observed;

  std::size_t size() const { return members.size(); }

  // Union of all members' observed items, ascending.
  std::vector<ItemId> observed_items() const;
};

// Throws std::invalid_argument when the group is empty, has duplicate
// members, or observed does not line up with members.
void validate_group(const Group& group);

// Builds a group from the train entries of `ratings`.
Group make_group(const RatingsMatrix& ratings, std::vector<UserId> members);

}  // namespace grouprec

#endif  // GROUPREC_GROUP_HPP_
