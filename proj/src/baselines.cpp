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

#include "grouprec/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace grouprec {

PredictedScores::PredictedScores(std::vector<ItemId> candidates, Eigen::MatrixXd values)
    : candidates_(std::move(candidates)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.cols()) != candidates_.size()) {
    throw std::invalid_argument("score columns do not match candidates");
  }
  if (!std::is_sorted(candidates_.begin(), candidates_.end()) ||
      std::adjacent_find(candidates_.begin(), candidates_.end()) != candidates_.end()) {
    throw std::invalid_argument("candidates must be strictly ascending");
  }
  if (!values_.allFinite()) throw std::invalid_argument("predicted scores must be finite");
}

PredictedScores PredictedScores::from_factors(const Factorization& factors, const Group& group,
                                              std::vector<ItemId> candidates, bool clamp) {
  Eigen::MatrixXd values(static_cast<Eigen::Index>(group.size()),
                         static_cast<Eigen::Index>(candidates.size()));
  for (std::size_t m = 0; m < group.size(); ++m) {
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const UserId u = group.members[m];
      const ItemId i = candidates[c];
      values(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c)) =
          clamp ? factors.predict_clamped(u, i) : factors.predict(u, i);
    }
  }
  return PredictedScores(std::move(candidates), std::move(values));
}

RankedItems top_k(const std::vector<ItemId>& candidates, const Eigen::VectorXd& score, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1, got " + std::to_string(k));
  if (candidates.empty()) throw std::invalid_argument("candidate set is empty");
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double sa = score(static_cast<Eigen::Index>(a));
                      const double sb = score(static_cast<Eigen::Index>(b));
                      return sa != sb ? sa > sb : candidates[a] < candidates[b];
                    });
  RankedItems ranked;
  for (std::size_t r = 0; r < take; ++r) {
    ranked.items.push_back(candidates[order[r]]);
    ranked.scores.push_back(score(static_cast<Eigen::Index>(order[r])));
  }
  return ranked;
}

Eigen::VectorXd group_relevance(const PredictedScores& scores) {
  return scores.values().colwise().sum().transpose();
}

Eigen::VectorXd group_disagreement(const PredictedScores& scores) {
  const Eigen::MatrixXd& v = scores.values();
  const Eigen::Index m = v.rows();
  Eigen::VectorXd dis = Eigen::VectorXd::Zero(v.cols());
  if (m < 2) return dis;
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = a + 1; b < m; ++b) {
      dis += (v.row(a) - v.row(b)).cwiseAbs().transpose();
    }
  }
  return dis * (2.0 / (static_cast<double>(m) * static_cast<double>(m - 1)));
}

RankedItems average_misery(const PredictedScores& scores, int k) {
  return top_k(scores.candidates(), group_relevance(scores), k);
}

RankedItems fm(const PredictedScores& scores, int k, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("FM lambda must lie in [0, 1]");
  }
  const Eigen::VectorXd combined =
      lambda * group_relevance(scores).array() +
      (1.0 - lambda) * (1.0 - group_disagreement(scores).array());
  return top_k(scores.candidates(), combined, k);
}

RankedItems least_misery(const PredictedScores& scores, int k) {
  if (scores.n_members() == 0) throw std::invalid_argument("no group members");
  return top_k(scores.candidates(), scores.values().colwise().minCoeff().transpose(), k);
}

RankedItems most_pleasure(const PredictedScores& scores, int k) {
  if (scores.n_members() == 0) throw std::invalid_argument("no group members");
  return top_k(scores.candidates(), scores.values().colwise().maxCoeff().transpose(), k);
}

RankedItems plurality(const PredictedScores& scores, int k) {
  const Eigen::MatrixXd& v = scores.values();
  Eigen::VectorXd votes = Eigen::VectorXd::Zero(v.cols());
  if (v.cols() > 0) {
    for (Eigen::Index m = 0; m < v.rows(); ++m) {
      const double best = v.row(m).maxCoeff();
      for (Eigen::Index c = 0; c < v.cols(); ++c) {
        if (v(m, c) == best) votes(c) += 1.0;
      }
    }
  }
  return top_k(scores.candidates(), votes, k);
}

}  // namespace grouprec
