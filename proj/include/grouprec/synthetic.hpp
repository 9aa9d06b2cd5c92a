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

#ifndef GROUPREC_SYNTHETIC_HPP_
#define GROUPREC_SYNTHETIC_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "grouprec/features.hpp"
#include "grouprec/group.hpp"
#include "grouprec/ratings.hpp"

namespace grouprec {

// Clustered ratings: items belong to clusters round-robin, every user likes
// one or two clusters, rates liked clusters more often and higher.
struct SyntheticSpec {
  int n_users = 300;
  int n_items = 240;
  int n_clusters = 6;
  double density = 0.25;
  std::uint64_t seed = 7;
};

std::vector<RatingTriple> synthetic_ratings(const SyntheticSpec& spec);

// Three well separated item clusters of ten items each and three users who
// each rated half of a different cluster. Oracle scores favour cluster 0 for
// every user, so score aggregation piles into one cluster.
struct ClusterFixture {
  FeatureMatrix item_features;
  std::vector<int> item_cluster;
  Group group;
  // Members x candidates, candidates ascending.
  std::vector<ItemId> candidates;
  Eigen::MatrixXd oracle_scores;
};

ClusterFixture three_cluster_fixture();

}  // namespace grouprec

#endif  // GROUPREC_SYNTHETIC_HPP_
