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

// Random instances and direct-formula reference implementations shared by
// the unit tests and the acceptance suite. Nothing here calls the library's
// scoring or metric code.

#ifndef GROUPREC_TESTS_ORACLES_HPP_
#define GROUPREC_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "grouprec/affinity.hpp"
#include "grouprec/consensus.hpp"
#include "grouprec/group.hpp"
#include "grouprec/ratings.hpp"

namespace grouprec::testing {

struct InstanceShape {
  int min_items = 5;
  int max_items = 20;
  int max_members = 4;
  int max_observed = 4;
  // Probability that an off-diagonal W entry is exactly zero.
  double w_zero_prob = 0.2;
  bool indicator_affinity = false;
};

// A group over n items with a dense non-negative W (n x n) and a member
// affinity matrix A (|G| x |G|).
struct RandomInstance {
  int n = 0;
  Group group;
  Eigen::MatrixXd W;
  Eigen::MatrixXd A;

  // w_u = sum_{l != u} A_ul, or 1 for a single member.
  std::vector<double> weights() const {
    const auto m = static_cast<Eigen::Index>(group.size());
    std::vector<double> w(group.size(), 0.0);
    for (Eigen::Index u = 0; u < m; ++u) {
      if (m == 1) {
        w[static_cast<std::size_t>(u)] = 1.0;
        continue;
      }
      for (Eigen::Index l = 0; l < m; ++l) {
        if (l != u) w[static_cast<std::size_t>(u)] += A(u, l);
      }
    }
    return w;
  }

  GscoreState state() const {
    return GscoreState(group, weights(), AffinityRows::from_dense(W, group.observed_items()));
  }

  std::vector<ItemId> candidates() const {
    const std::vector<ItemId> seen = group.observed_items();
    std::vector<ItemId> out;
    for (int i = 0; i < n; ++i) {
      if (!std::binary_search(seen.begin(), seen.end(), static_cast<ItemId>(i))) {
        out.push_back(static_cast<ItemId>(i));
      }
    }
    return out;
  }
};

inline RandomInstance random_instance(std::mt19937_64& rng, const InstanceShape& shape) {
  std::uniform_int_distribution<int> n_dist(shape.min_items, shape.max_items);
  std::uniform_int_distribution<int> m_dist(1, shape.max_members);
  std::uniform_int_distribution<int> rating(kMinRating, kMaxRating);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  RandomInstance inst;
  inst.n = n_dist(rng);
  const int m = m_dist(rng);
  // Keep at least one candidate outside every observed set.
  const int max_obs = std::max(1, std::min(shape.max_observed, inst.n - 1));
  std::uniform_int_distribution<int> obs_dist(1, max_obs);
  std::vector<int> pool(static_cast<std::size_t>(inst.n));
  for (int i = 0; i < inst.n; ++i) pool[static_cast<std::size_t>(i)] = i;
  // The dropped slot is never observed, so it stays a candidate.
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.pop_back();

  for (int u = 0; u < m; ++u) {
    inst.group.members.push_back(static_cast<UserId>(u));
    std::vector<int> items = pool;
    std::shuffle(items.begin(), items.end(), rng);
    const int count = std::min<int>(obs_dist(rng), static_cast<int>(items.size()));
    std::vector<ObservedRating> obs;
    for (int t = 0; t < count; ++t) {
      obs.push_back({static_cast<ItemId>(items[static_cast<std::size_t>(t)]), rating(rng)});
    }
    std::sort(obs.begin(), obs.end(),
              [](const ObservedRating& a, const ObservedRating& b) { return a.item < b.item; });
    inst.group.observed.push_back(std::move(obs));
  }

  inst.W.resize(inst.n, inst.n);
  for (int i = 0; i < inst.n; ++i) {
    for (int j = 0; j < inst.n; ++j) {
      inst.W(i, j) = i == j ? 1.0 : (unit(rng) < shape.w_zero_prob ? 0.0 : unit(rng));
    }
  }
  inst.A.resize(m, m);
  for (int u = 0; u < m; ++u) {
    for (int v = 0; v < m; ++v) {
      inst.A(u, v) = shape.indicator_affinity ? 1.0 : (u == v ? 1.0 : unit(rng));
    }
  }
  return inst;
}

// Gscore evaluated straight from the definition.
inline double oracle_gscore(const RandomInstance& inst, const std::vector<ItemId>& S,
                            const SaturationSpec& sat) {
  const std::vector<double> w = inst.weights();
  double total = 0.0;
  for (std::size_t u = 0; u < inst.group.size(); ++u) {
    double inner = 0.0;
    for (const ObservedRating& o : inst.group.observed[u]) {
      double s = 0.0;
      for (ItemId j : S) s += inst.W(o.item, j);
      const double fs = sat.item == ItemSaturation::kLog1p ? std::log(1.0 + s) : s;
      inner += o.rating * fs;
    }
    const double x = w[u] * inner;
    switch (sat.user) {
      case UserSaturation::kIdentity: total += x; break;
      case UserSaturation::kSqrt: total += std::sqrt(x); break;
      case UserSaturation::kScaledIdentity: total += x / sat.transport_times[u]; break;
    }
  }
  return total;
}

// Best value over all subsets of exactly min(k, |Z|) candidates, by plain
// recursion.
inline double oracle_best_value(const RandomInstance& inst, int k, const SaturationSpec& sat) {
  const std::vector<ItemId> z = inst.candidates();
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), z.size());
  double best = -1.0;
  std::vector<ItemId> chosen;
  std::function<void(std::size_t)> rec = [&](std::size_t next) {
    if (chosen.size() == take) {
      best = std::max(best, oracle_gscore(inst, chosen, sat));
      return;
    }
    for (std::size_t i = next; i + (take - chosen.size()) <= z.size(); ++i) {
      chosen.push_back(z[i]);
      rec(i + 1);
      chosen.pop_back();
    }
  };
  rec(0);
  return best;
}

// Closed-form per-item score of the modular case (f and g identity):
// c_j = sum_u w_u sum_{i in I_u} r_u^i W_ij.
inline std::vector<double> modular_scores(const RandomInstance& inst) {
  const std::vector<double> w = inst.weights();
  std::vector<double> c(static_cast<std::size_t>(inst.n), 0.0);
  for (int j = 0; j < inst.n; ++j) {
    for (std::size_t u = 0; u < inst.group.size(); ++u) {
      for (const ObservedRating& o : inst.group.observed[u]) {
        c[static_cast<std::size_t>(j)] += w[u] * o.rating * inst.W(o.item, j);
      }
    }
  }
  return c;
}

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return c;
}

// sum_p (2^rel_p - 1) / log2(p + 1).
inline double oracle_dcg(const std::vector<int>& relevance) {
  double total = 0.0;
  for (std::size_t p = 1; p <= relevance.size(); ++p) {
    total += (std::pow(2.0, relevance[p - 1]) - 1.0) / std::log2(static_cast<double>(p) + 1.0);
  }
  return total;
}

// Test ratings as a plain (user, item) -> rating map.
using TestMap = std::map<std::pair<UserId, ItemId>, int>;

inline double oracle_group_dcg(const std::vector<UserId>& members,
                               const std::vector<ItemId>& recommended, const TestMap& test) {
  double sum = 0.0;
  for (UserId u : members) {
    std::vector<int> rel;
    for (ItemId i : recommended) {
      const auto it = test.find({u, i});
      rel.push_back(it == test.end() ? 0 : it->second);
    }
    sum += oracle_dcg(rel);
  }
  return sum / static_cast<double>(members.size());
}

inline std::optional<double> oracle_psr(const std::vector<UserId>& members,
                                        const std::vector<ItemId>& recommended,
                                        const TestMap& test, int threshold, double beta) {
  std::map<ItemId, int> relevant_count;
  for (const auto& [key, r] : test) {
    if (r >= threshold) ++relevant_count[key.second];
  }
  const auto weight = [&](ItemId i) {
    return std::pow(1.0 / static_cast<double>(relevant_count.at(i)), beta);
  };
  const std::set<ItemId> rec(recommended.begin(), recommended.end());
  double num = 0.0;
  double den = 0.0;
  for (UserId u : members) {
    for (const auto& [key, r] : test) {
      if (key.first != u || r < threshold) continue;
      den += weight(key.second);
      if (rec.count(key.second)) num += weight(key.second);
    }
  }
  if (den == 0.0) return std::nullopt;
  return num / den / static_cast<double>(members.size());
}

}  // namespace grouprec::testing

#endif  // GROUPREC_TESTS_ORACLES_HPP_
