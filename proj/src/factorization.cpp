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

#include "grouprec/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace grouprec {
namespace {

// Train entries of one orientation in compressed form.
struct TrainIndex {
  std::vector<std::size_t> offsets;
  std::vector<Eigen::Index> other;
  std::vector<double> rating;
};

TrainIndex index_by_user(const RatingsMatrix& ratings) {
  TrainIndex idx;
  idx.offsets.push_back(0);
  for (UserId u = 0; u < ratings.n_users(); ++u) {
    for (const RowCell& c : ratings.row(u)) {
      if (!ratings.is_train(c.entry)) continue;
      idx.other.push_back(c.item);
      idx.rating.push_back(c.rating);
    }
    idx.offsets.push_back(idx.other.size());
  }
  return idx;
}

TrainIndex index_by_item(const RatingsMatrix& ratings) {
  TrainIndex idx;
  idx.offsets.push_back(0);
  for (ItemId i = 0; i < ratings.n_items(); ++i) {
    for (const ColCell& c : ratings.col(i)) {
      if (!ratings.is_train(c.entry)) continue;
      idx.other.push_back(c.user);
      idx.rating.push_back(c.rating);
    }
    idx.offsets.push_back(idx.other.size());
  }
  return idx;
}

double quadratic(const Eigen::MatrixXd& H, const Eigen::VectorXd& b, const Eigen::VectorXd& y) {
  return y.dot(H * y) - 2.0 * b.dot(y);
}

// Solves H_PP s_P = b_P with s zero outside P.
Eigen::VectorXd solve_passive(const Eigen::MatrixXd& H, const Eigen::VectorXd& b,
                              const std::vector<char>& passive) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    if (passive[j]) idx.push_back(j);
  }
  Eigen::VectorXd s = Eigen::VectorXd::Zero(b.size());
  if (idx.empty()) return s;
  const Eigen::MatrixXd Hpp = H(idx, idx);
  const Eigen::VectorXd bp = b(idx);
  const Eigen::VectorXd sp = Hpp.llt().solve(bp);
  s(idx) = sp;
  return s;
}

// Re-solves every row of `target` against the fixed `other` factor.
void update_rows(RowMajorMatrix& target, const RowMajorMatrix& other, const TrainIndex& index,
                 double reg, int max_block_iters) {
  const Eigen::Index d = target.cols();
  Eigen::MatrixXd gathered;
  for (Eigen::Index r = 0; r < target.rows(); ++r) {
    const std::size_t begin = index.offsets[r];
    const std::size_t end = index.offsets[r + 1];
    if (begin == end) {
      // Only the penalty acts on this row; its minimizer is zero.
      target.row(r).setZero();
      continue;
    }
    const auto n = static_cast<Eigen::Index>(end - begin);
    gathered.resize(n, d);
    Eigen::VectorXd values(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      gathered.row(k) = other.row(index.other[begin + k]);
      values(k) = index.rating[begin + k];
    }
    Eigen::MatrixXd H = gathered.transpose() * gathered;
    H.diagonal().array() += reg;
    const Eigen::VectorXd b = gathered.transpose() * values;
    const Eigen::VectorXd start = target.row(r).transpose();
    target.row(r) = solve_nonnegative_qp(H, b, start, max_block_iters).transpose();
  }
}

}  // namespace

void validate(const FactorizationConfig& cfg) {
  if (cfg.dim < 1) throw std::invalid_argument("factorization dim must be >= 1");
  if (!(cfg.reg > 0.0)) throw std::invalid_argument("factorization reg must be > 0");
  if (cfg.max_iters < 1) throw std::invalid_argument("factorization max_iters must be >= 1");
  if (!(cfg.tol >= 0.0)) throw std::invalid_argument("factorization tol must be >= 0");
  if (cfg.max_block_iters < 0) {
    throw std::invalid_argument("factorization max_block_iters must be >= 0");
  }
}

Eigen::VectorXd solve_nonnegative_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& b,
                                     const Eigen::VectorXd& start, int max_iters) {
  const Eigen::Index d = b.size();
  std::vector<char> passive(d, 1);

  // Unconstrained solution, clamped at zero.
  Eigen::VectorXd y = solve_passive(H, b, passive).cwiseMax(0.0);
  for (Eigen::Index j = 0; j < d; ++j) passive[j] = y(j) > 0.0;

  const double kkt_tol = 1e-10 * (1.0 + b.lpNorm<Eigen::Infinity>());
  int pivots = 0;
  while (pivots < max_iters) {
    // Move to the minimizer on the passive set while staying feasible.
    bool capped = false;
    for (;;) {
      const Eigen::VectorXd s = solve_passive(H, b, passive);
      double alpha = 1.0;
      Eigen::Index blocking = -1;
      for (Eigen::Index j = 0; j < d; ++j) {
        if (!passive[j] || s(j) > 0.0) continue;
        const double step = y(j) / (y(j) - s(j));
        if (step < alpha) {
          alpha = step;
          blocking = j;
        }
      }
      if (blocking < 0) {
        y = s;
        break;
      }
      y += alpha * (s - y);
      y(blocking) = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) {
        if (passive[j] && y(j) <= 0.0) {
          passive[j] = 0;
          y(j) = 0.0;
        }
      }
      if (++pivots >= max_iters) {
        capped = true;
        break;
      }
    }
    if (capped) break;

    const Eigen::VectorXd w = b - H * y;
    Eigen::Index enter = -1;
    double best = kkt_tol;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (!passive[j] && w(j) > best) {
        best = w(j);
        enter = j;
      }
    }
    if (enter < 0) break;  // KKT-feasible
    passive[enter] = 1;
    ++pivots;
  }

  y = y.cwiseMax(0.0);
  if (quadratic(H, b, y) > quadratic(H, b, start)) return start;
  return y;
}

double factorization_objective(const RatingsMatrix& ratings, const RowMajorMatrix& users,
                               const RowMajorMatrix& items, double reg) {
  double loss = 0.0;
  for (std::size_t e = 0; e < ratings.n_entries(); ++e) {
    if (!ratings.is_train(e)) continue;
    const RatingTriple& t = ratings.entry(e);
    const double err = t.rating - users.row(t.user).dot(items.row(t.item));
    loss += err * err;
  }
  return loss + reg * (users.squaredNorm() + items.squaredNorm());
}

double Factorization::predict(UserId u, ItemId i) const {
  return users.row(u).dot(items.row(i));
}

double Factorization::predict_clamped(UserId u, ItemId i) const {
  return std::clamp(predict(u, i), static_cast<double>(kMinRating),
                    static_cast<double>(kMaxRating));
}

Factorization factorize(const RatingsMatrix& ratings, const FactorizationConfig& cfg) {
  validate(cfg);
  const std::size_t n_train = ratings.n_train();
  if (n_train == 0) throw std::invalid_argument("factorize: no train entries");

  double mean_rating = 0.0;
  for (std::size_t e = 0; e < ratings.n_entries(); ++e) {
    if (ratings.is_train(e)) mean_rating += ratings.entry(e).rating;
  }
  mean_rating /= static_cast<double>(n_train);

  const auto n_users = static_cast<Eigen::Index>(ratings.n_users());
  const auto n_items = static_cast<Eigen::Index>(ratings.n_items());
  const Eigen::Index d = cfg.dim;
  const int block_iters = cfg.max_block_iters > 0 ? cfg.max_block_iters : 3 * cfg.dim;

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double scale = mean_rating / static_cast<double>(d);
  RowMajorMatrix users(n_users, d);
  RowMajorMatrix items(n_items, d);
  for (Eigen::Index r = 0; r < n_users; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) users(r, c) = scale * unit(rng);
  }
  for (Eigen::Index r = 0; r < n_items; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) items(r, c) = scale * unit(rng);
  }

  const TrainIndex by_user = index_by_user(ratings);
  const TrainIndex by_item = index_by_item(ratings);

  std::vector<double> trace;
  trace.push_back(factorization_objective(ratings, users, items, cfg.reg));
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    update_rows(users, items, by_user, cfg.reg, block_iters);
    update_rows(items, users, by_item, cfg.reg, block_iters);
    const double objective = factorization_objective(ratings, users, items, cfg.reg);
    if (!users.allFinite() || !items.allFinite() || !std::isfinite(objective)) {
      throw std::runtime_error("factorize: non-finite value at iteration " +
                               std::to_string(iter));
    }
    const double previous = trace.back();
    trace.push_back(objective);
    if (previous - objective <= cfg.tol * std::abs(previous)) break;
  }

  return Factorization{FeatureMatrix(std::move(users)), FeatureMatrix(std::move(items)),
                       std::move(trace)};
}

}  // namespace grouprec
