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

#ifndef GROUPREC_EVALUATION_HPP_
#define GROUPREC_EVALUATION_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grouprec/features.hpp"
#include "grouprec/group.hpp"
#include "grouprec/ratings.hpp"

namespace grouprec {

enum class GroupKind { kRandom, kSimilar };

std::string to_string(GroupKind kind);
// Throws std::invalid_argument for anything but "random" / "similar".
GroupKind parse_group_kind(const std::string& text);

struct GroupSpec {
  GroupKind kind = GroupKind::kRandom;
  int size = 4;
  int count = 100;
  double sim_threshold = 0.60;
  std::uint64_t seed = 0;
  // Candidate draws allowed while filling one similar group.
  int retry_budget = 1000;
};

struct EvalConfig {
  double holdout_frac = 0.30;
  int repetitions = 5;
  std::vector<int> k_list = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  // Test ratings at or above this are "relevant" for PSR.
  int relevance_threshold = 4;
  double beta = 0.5;
  double dcg_log_base = 2.0;
};

// Throws std::invalid_argument on out-of-range fields.
void validate(const EvalConfig& cfg);

// Holds out every rating of a uniformly drawn ceil(frac * n_items) subset of
// items as test; everything else becomes train. Throws
// std::invalid_argument if that subset would be empty or all items.
RatingsMatrix holdout_split(const RatingsMatrix& ratings, double frac, std::uint64_t seed);

// Per-entry variant: each rating independently becomes test with
// probability frac. Kept as an alternative to the item-level split.
RatingsMatrix holdout_split_entries(const RatingsMatrix& ratings, double frac,
                                    std::uint64_t seed);

struct GroupDraw {
  std::vector<Group> groups;
  // Similar groups that could not be filled within the retry budget.
  std::size_t failed = 0;
};

// Draws `spec.count` groups among users with at least one train entry.
// Random groups sample members uniformly without replacement. Similar groups
// start from a random user and accept further random users only if their
// cosine with every current member exceeds spec.sim_threshold. Groups may
// overlap across draws. Throws std::invalid_argument for size < 2 or too
// few eligible users.
GroupDraw make_groups(const GroupSpec& spec, const FeatureMatrix& user_features,
                      const RatingsMatrix& ratings);

// Test-split lookups used by the metrics.
class TestRelevance {
 public:
  TestRelevance(const RatingsMatrix& ratings, int relevance_threshold);

  // Test rating of (u, i), 0 when there is none.
  int rating(UserId u, ItemId i) const;
  // N_i^+: relevant test ratings of item i over all users.
  std::size_t relevant_count(ItemId i) const;
  // T_u: items relevant to u in the test split, ascending.
  std::span<const ItemId> relevant_items(UserId u) const;
  bool is_relevant(UserId u, ItemId i) const;

 private:
  int threshold_;
  std::vector<std::vector<std::pair<ItemId, int>>> by_user_;
  std::vector<std::vector<ItemId>> relevant_;
  std::vector<std::size_t> relevant_counts_;
};

// sum_p (2^rel_p - 1) / log_base(p + 1), p = 1..len, where rel_p is the
// graded relevance of the item at rank p.
double dcg(std::span<const double> relevance, double log_base = 2.0);

// DCG of `recommended` for every member (test ratings as relevance, 0 when
// unrated), averaged over members.
double group_dcg(const Group& group, std::span<const ItemId> recommended,
                 const TestRelevance& test, double log_base = 2.0);

// Popularity-stratified recall
//
//   (1/|G|) * sum_u sum_{i in S_u+} (1/N_i+)^beta / sum_u sum_{i in T_u} (1/N_i+)^beta
//
// with S_u+ the recommended items relevant to u. nullopt when no member has
// a relevant test item.
std::optional<double> psr(const Group& group, std::span<const ItemId> recommended,
                          const TestRelevance& test, double beta);

}  // namespace grouprec

#endif  // GROUPREC_EVALUATION_HPP_
