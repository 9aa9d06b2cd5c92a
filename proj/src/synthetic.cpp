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

#include "grouprec/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace grouprec {

std::vector<RatingTriple> synthetic_ratings(const SyntheticSpec& spec) {
  if (spec.n_users < 1 || spec.n_items < 1 || spec.n_clusters < 1) {
    throw std::invalid_argument("synthetic dataset needs users, items and clusters");
  }
  if (!(spec.density > 0.0 && spec.density <= 1.0)) {
    throw std::invalid_argument("synthetic density must lie in (0, 1]");
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> cluster_of(0, spec.n_clusters - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.7);

  std::vector<RatingTriple> triples;
  for (int u = 0; u < spec.n_users; ++u) {
    std::vector<char> likes(static_cast<std::size_t>(spec.n_clusters), 0);
    likes[static_cast<std::size_t>(cluster_of(rng))] = 1;
    if (unit(rng) < 0.5) likes[static_cast<std::size_t>(cluster_of(rng))] = 1;
    for (int i = 0; i < spec.n_items; ++i) {
      const bool liked = likes[static_cast<std::size_t>(i % spec.n_clusters)] != 0;
      const double p = std::min(1.0, spec.density * (liked ? 1.6 : 0.6));
      if (unit(rng) >= p) continue;
      const double base = liked ? 4.4 : 2.0;
      const int rating = static_cast<int>(std::lround(std::clamp(base + noise(rng), 1.0, 5.0)));
      triples.push_back({static_cast<UserId>(u), static_cast<ItemId>(i), rating});
    }
  }
  return triples;
}

ClusterFixture three_cluster_fixture() {
  constexpr int kClusters = 3;
  constexpr int kPerCluster = 10;
  constexpr int kObserved = 5;
  constexpr int kItems = kClusters * kPerCluster;

  ClusterFixture fx;
  RowMajorMatrix features = RowMajorMatrix::Zero(kItems, kClusters);
  for (int i = 0; i < kItems; ++i) {
    const int c = i / kPerCluster;
    fx.item_cluster.push_back(c);
    features(i, c) = 2.0 + 0.02 * (i % kPerCluster);
    features(i, (c + 1) % kClusters) = 0.01 * ((i * 7) % 5);
  }
  fx.item_features = FeatureMatrix(std::move(features));

  // Member c rated the first half of cluster c; member 0 most enthusiastically.
  const int observed_rating[kClusters] = {5, 4, 4};
  fx.group.members = {0, 1, 2};
  fx.group.observed.resize(kClusters);
  for (int c = 0; c < kClusters; ++c) {
    for (int t = 0; t < kObserved; ++t) {
      fx.group.observed[c].push_back({static_cast<ItemId>(c * kPerCluster + t), observed_rating[c]});
    }
  }

  for (int i = 0; i < kItems; ++i) {
    if (i % kPerCluster >= kObserved) fx.candidates.push_back(static_cast<ItemId>(i));
  }
  // Cluster 0 items are liked by everyone; the others only by their owner.
  fx.oracle_scores.resize(kClusters, static_cast<Eigen::Index>(fx.candidates.size()));
  for (std::size_t col = 0; col < fx.candidates.size(); ++col) {
    const int c = fx.item_cluster[fx.candidates[col]];
    for (int m = 0; m < kClusters; ++m) {
      double score = 1.0;
      if (c == 0) score = m == 0 ? 5.0 : 2.0;
      else if (m == c) score = 4.0;
      fx.oracle_scores(m, static_cast<Eigen::Index>(col)) = score;
    }
  }
  return fx;
}

}  // namespace grouprec
