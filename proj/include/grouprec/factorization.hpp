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

#ifndef GROUPREC_FACTORIZATION_HPP_
#define GROUPREC_FACTORIZATION_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "grouprec/features.hpp"
#include "grouprec/ratings.hpp"

namespace grouprec {

struct FactorizationConfig {
  int dim = 150;
  double reg = 0.1;
  int max_iters = 50;
  // Stop once an alternation improves the objective by at most tol * objective.
  double tol = 1e-6;
  std::uint64_t seed = 0;
  // Active-set pivots per row solve; 0 means 3 * dim.
  int max_block_iters = 0;
};

// Throws std::invalid_argument for dim < 1, reg <= 0, max_iters < 1 or tol < 0.
void validate(const FactorizationConfig& cfg);

struct Factorization {
  FeatureMatrix users;
  FeatureMatrix items;
  // objective_trace[0] is the objective at the random start; one value is
  // appended after every full alternation (users, then items).
  std::vector<double> objective_trace;

  // Raw inner product y_u . x_i.
  double predict(UserId u, ItemId i) const;
  // Prediction clamped to the rating scale [1, 5].
  double predict_clamped(UserId u, ItemId i) const;
};

// Weighted-regularized non-negative alternating least squares over the
// train entries of `ratings`. Observed train cells carry weight 1, all other
// cells weight 0; the minimized objective is
//
//   sum_{(u,i) train} (r_ui - y_u . x_i)^2 + reg * (|Y|_F^2 + |X|_F^2)
//
// subject to Y, X >= 0. Every row update is an exact non-negative solve of
// its convex block, so the objective never increases.
//
// Throws std::invalid_argument when there are no train entries and
// std::runtime_error when a non-finite value appears.
Factorization factorize(const RatingsMatrix& ratings, const FactorizationConfig& cfg);

// Objective above for given factors.
double factorization_objective(const RatingsMatrix& ratings, const RowMajorMatrix& users,
                               const RowMajorMatrix& items, double reg);

// Minimizes y'Hy - 2b'y subject to y >= 0, for symmetric positive definite H.
// Starts from the unconstrained solution clamped at zero and pivots on the
// active set until the KKT conditions hold or `max_iters` pivots were made.
// If the result is worse than `start` (feasible), `start` is returned.
Eigen::VectorXd solve_nonnegative_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& b,
                                     const Eigen::VectorXd& start, int max_iters);

}  // namespace grouprec

#endif  // GROUPREC_FACTORIZATION_HPP_
