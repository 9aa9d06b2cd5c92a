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

#include "grouprec/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace grouprec {

AffinityRows AffinityRows::from_dense(const Eigen::MatrixXd& W, std::vector<ItemId> items) {
  if (W.rows() != W.cols()) throw std::invalid_argument("affinity matrix must be square");
  if ((W.array() < 0.0).any()) throw std::invalid_argument("affinity must be non-negative");
  AffinityRows rows;
  rows.values.resize(static_cast<Eigen::Index>(items.size()), W.cols());
  for (std::size_t r = 0; r < items.size(); ++r) {
    if (items[r] >= W.rows()) throw std::invalid_argument("affinity row out of range");
    rows.values.row(static_cast<Eigen::Index>(r)) = W.row(items[r]);
  }
  rows.items = std::move(items);
  return rows;
}

ItemAffinity::ItemAffinity(const FeatureMatrix& item_features, double gamma)
    : features_(&item_features), gamma_(gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("RBF gamma must be positive and finite");
  }
}

double ItemAffinity::operator()(ItemId i, ItemId j) const {
  if (i == j) return 1.0;
  const double dist = (features_->row(i) - features_->row(j)).squaredNorm();
  return std::exp(-gamma_ * dist);
}

std::vector<double> ItemAffinity::row(ItemId i) const {
  if (i >= n_items()) throw std::out_of_range("item " + std::to_string(i) + " out of range");
  std::vector<double> out(n_items());
  for (ItemId j = 0; j < n_items(); ++j) out[j] = (*this)(i, j);
  return out;
}

AffinityRows ItemAffinity::rows_for(std::vector<ItemId> items) const {
  return SquaredDistanceRows(*features_, std::move(items)).affinity(gamma_);
}

SquaredDistanceRows::SquaredDistanceRows(const FeatureMatrix& item_features,
                                         std::vector<ItemId> items)
    : items_(std::move(items)) {
  const auto n = static_cast<Eigen::Index>(item_features.rows());
  const RowMajorMatrix& X = item_features.values();
  distances_.resize(static_cast<Eigen::Index>(items_.size()), n);
  for (std::size_t r = 0; r < items_.size(); ++r) {
    if (items_[r] >= item_features.rows()) {
      throw std::out_of_range("item " + std::to_string(items_[r]) + " out of range");
    }
    const auto source = X.row(items_[r]);
    distances_.row(static_cast<Eigen::Index>(r)) =
        (X.rowwise() - source).rowwise().squaredNorm().transpose();
    distances_(static_cast<Eigen::Index>(r), items_[r]) = 0.0;
  }
}

AffinityRows SquaredDistanceRows::affinity(double gamma) const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("RBF gamma must be positive and finite");
  }
  return AffinityRows{items_, (-gamma * distances_.array()).exp().matrix()};
}

double cosine_similarity(const FeatureMatrix& features, UserId u, UserId v) {
  if (u == v) return 1.0;
  const auto a = features.row(u);
  const auto b = features.row(v);
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(a.dot(b) / (na * nb), 0.0, 1.0);
}

UserAffinity::UserAffinity(UserAffinityMode mode, const FeatureMatrix* user_features)
    : mode_(mode), features_(user_features) {
  if (mode_ == UserAffinityMode::kCosine && features_ == nullptr) {
    throw std::invalid_argument("cosine user affinity needs user features");
  }
}

double UserAffinity::operator()(UserId u, UserId v, const Group& group) const {
  switch (mode_) {
    case UserAffinityMode::kCosine:
      return cosine_similarity(*features_, u, v);
    case UserAffinityMode::kIndicator: {
      const auto in_group = [&](UserId x) {
        return std::find(group.members.begin(), group.members.end(), x) != group.members.end();
      };
      return in_group(u) && in_group(v) ? 1.0 : 0.0;
    }
    case UserAffinityMode::kIdentity:
      return u == v ? 1.0 : 0.0;
  }
  return 0.0;
}

std::vector<double> member_weights(const Group& group, const UserAffinity& affinity) {
  const std::size_t m = group.size();
  Eigen::MatrixXd A(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      A(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          affinity(group.members[a], group.members[b], group);
    }
  }
  return member_weights(A);
}

std::vector<double> member_weights(const Eigen::MatrixXd& member_affinity) {
  const Eigen::Index m = member_affinity.rows();
  if (member_affinity.cols() != m || m == 0) {
    throw std::invalid_argument("member affinity must be a non-empty square matrix");
  }
  if (m == 1) return {1.0};
  std::vector<double> w(static_cast<std::size_t>(m), 0.0);
  for (Eigen::Index u = 0; u < m; ++u) {
    for (Eigen::Index l = 0; l < m; ++l) {
      if (l == u) continue;
      const double a = member_affinity(u, l);
      if (a < 0.0) throw std::invalid_argument("user affinity must be non-negative");
      w[static_cast<std::size_t>(u)] += a;
    }
  }
  return w;
}

}  // namespace grouprec
