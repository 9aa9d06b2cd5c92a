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

#ifndef GROUPREC_AFFINITY_HPP_
#define GROUPREC_AFFINITY_HPP_

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "grouprec/features.hpp"
#include "grouprec/group.hpp"

namespace grouprec {

// RBF bandwidths swept by experiments: 2^-3 ... 2^3.
inline constexpr std::array<double, 7> kGammaGrid = {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};

// Rows of the item affinity matrix W for a fixed list of source items.
// values(r, j) = W(items[r], j). Column-major, so W(., j) over all source
// rows is contiguous.
struct AffinityRows {
  std::vector<ItemId> items;
  Eigen::MatrixXd values;

  std::size_t n_items() const { return static_cast<std::size_t>(values.cols()); }

  // Picks rows of a dense n x n matrix. Throws std::invalid_argument on
  // negative entries or out-of-range items.
  static AffinityRows from_dense(const Eigen::MatrixXd& W, std::vector<ItemId> items);
};

// Item-item affinity W_ij = exp(-gamma * |x_i - x_j|^2) over item features.
// Holds a reference to the features; they must outlive this object.
class ItemAffinity {
 public:
  ItemAffinity(const FeatureMatrix& item_features, double gamma);

  double gamma() const { return gamma_; }
  std::size_t n_items() const { return features_->rows(); }

  double operator()(ItemId i, ItemId j) const;
  std::vector<double> row(ItemId i) const;

  // Materializes the rows needed by one group (its observed items).
  AffinityRows rows_for(std::vector<ItemId> items) const;

 private:
  const FeatureMatrix* features_;
  double gamma_;
};

// Squared feature distances from a fixed list of items to every item. They
// do not depend on gamma, so one instance serves a whole gamma sweep.
class SquaredDistanceRows {
 public:
  SquaredDistanceRows(const FeatureMatrix& item_features, std::vector<ItemId> items);

  const std::vector<ItemId>& items() const { return items_; }
  AffinityRows affinity(double gamma) const;

 private:
  std::vector<ItemId> items_;
  Eigen::MatrixXd distances_;
};

enum class UserAffinityMode { kCosine, kIndicator, kIdentity };

// User-user affinity A. Cosine mode reads user features (which must outlive
// this object); a zero feature vector has cosine 0 with every other user.
class UserAffinity {
 public:
  explicit UserAffinity(UserAffinityMode mode, const FeatureMatrix* user_features = nullptr);

  UserAffinityMode mode() const { return mode_; }
  double operator()(UserId u, UserId v, const Group& group) const;

 private:
  UserAffinityMode mode_;
  const FeatureMatrix* features_;
};

double cosine_similarity(const FeatureMatrix& features, UserId u, UserId v);

// Per-member weight w_u = sum_{l != u} A_ul. A single-member group gets
// weight 1 so that it reduces to personalized recommendation.
std::vector<double> member_weights(const Group& group, const UserAffinity& affinity);

// Same rule for an explicit |G| x |G| affinity matrix over the members.
std::vector<double> member_weights(const Eigen::MatrixXd& member_affinity);

}  // namespace grouprec

#endif  // GROUPREC_AFFINITY_HPP_
