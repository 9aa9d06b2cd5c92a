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

#ifndef GROUPREC_BASELINES_HPP_
#define GROUPREC_BASELINES_HPP_

#include <vector>

#include <Eigen/Dense>

#include "grouprec/factorization.hpp"
#include "grouprec/group.hpp"

namespace grouprec {

// Predicted ratings of each group member (rows) for each candidate item
// (columns). Candidates are kept in ascending id order.
class PredictedScores {
 public:
  // Throws std::invalid_argument on shape mismatch, unsorted or duplicate
  // candidates, or non-finite scores.
  PredictedScores(std::vector<ItemId> candidates, Eigen::MatrixXd values);

  // r_u^i = y_u . x_i for u in the group and i in `candidates`, clamped to
  // [1, 5] when `clamp` is set.
  static PredictedScores from_factors(const Factorization& factors, const Group& group,
                                      std::vector<ItemId> candidates, bool clamp = true);

  const std::vector<ItemId>& candidates() const { return candidates_; }
  const Eigen::MatrixXd& values() const { return values_; }
  std::size_t n_members() const { return static_cast<std::size_t>(values_.rows()); }

 private:
  std::vector<ItemId> candidates_;
  Eigen::MatrixXd values_;
};

// A ranked list with the aggregate score of every entry.
struct RankedItems {
  std::vector<ItemId> items;
  std::vector<double> scores;
};

// rel(G, i): sum of member scores.
Eigen::VectorXd group_relevance(const PredictedScores& scores);

// dis(G, i): mean absolute score difference over unordered member pairs;
// 0 for a single member.
Eigen::VectorXd group_disagreement(const PredictedScores& scores);

// Top-k by rel(G, i). Ties go to the lower item id.
RankedItems average_misery(const PredictedScores& scores, int k);

// Top-k by lambda * rel(G, i) + (1 - lambda) * (1 - dis(G, i)).
// Throws std::invalid_argument for lambda outside [0, 1].
RankedItems fm(const PredictedScores& scores, int k, double lambda);

// Top-k by the minimum member score.
RankedItems least_misery(const PredictedScores& scores, int k);

// Top-k by the maximum member score.
RankedItems most_pleasure(const PredictedScores& scores, int k);

// Top-k by the number of members for whom the item attains their maximum
// score over the candidates (every tied maximum counts).
RankedItems plurality(const PredictedScores& scores, int k);

// Top-k of arbitrary per-candidate scores with the shared tie rule. All of
// the above call this. Throws std::invalid_argument for k < 1 or no
// candidates.
RankedItems top_k(const std::vector<ItemId>& candidates, const Eigen::VectorXd& score, int k);

}  // namespace grouprec

#endif  // GROUPREC_BASELINES_HPP_
