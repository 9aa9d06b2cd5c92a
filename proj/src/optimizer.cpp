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

#include "grouprec/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace grouprec {
namespace {

std::vector<ItemId> checked_candidates(const GscoreState& state, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1, got " + std::to_string(k));
  std::vector<ItemId> candidates = state.candidates();
  if (candidates.empty()) throw std::invalid_argument("candidate set is empty");
  return candidates;
}

void finish(RecommendationResult& result, const GscoreState& final_state,
            const SaturationSpec& sat) {
  result.objective = gscore(final_state, sat);
  result.certificate = approximation_factor(result.selected.size());
}

// C(n, k), saturating at cap + 1.
std::size_t bounded_binomial(std::size_t n, std::size_t k, std::size_t cap) {
  k = std::min(k, n - k);
  long double c = 1.0L;
  for (std::size_t i = 0; i < k; ++i) {
    c = c * static_cast<long double>(n - i) / static_cast<long double>(i + 1);
    if (c > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::size_t>(std::llround(c));
}

struct Enumeration {
  const SaturationSpec& sat;
  const std::vector<ItemId>& candidates;
  std::size_t size;
  std::vector<ItemId> chosen;
  ExhaustiveResult best;
  bool found = false;

  void visit(const GscoreState& state, std::size_t start) {
    if (chosen.size() == size) {
      const double value = gscore(state, sat);
      if (!found || value > best.value) {
        best.value = value;
        best.selected = chosen;
        found = true;
      }
      return;
    }
    const std::size_t remaining = size - chosen.size();
    for (std::size_t idx = start; idx + remaining <= candidates.size(); ++idx) {
      GscoreState next = state;
      commit(next, candidates[idx]);
      chosen.push_back(candidates[idx]);
      visit(next, idx + 1);
      chosen.pop_back();
    }
  }
};

}  // namespace

double approximation_factor(std::size_t k) {
  if (k == 0) return 0.0;
  const double kd = static_cast<double>(k);
  return 1.0 - std::pow(1.0 - 1.0 / kd, kd);
}

std::size_t eager_scan_count(std::size_t n_candidates, std::size_t k) {
  std::size_t total = 0;
  for (std::size_t t = 0; t < std::min(k, n_candidates); ++t) total += n_candidates - t;
  return total;
}

RecommendationResult saga(const GscoreState& state, const SaturationSpec& sat, int k) {
  const std::vector<ItemId> candidates = checked_candidates(state, k);
  const std::size_t target = std::min<std::size_t>(static_cast<std::size_t>(k), candidates.size());

  GscoreState work = state;
  RecommendationResult result;
  LazyQueue queue;
  for (ItemId e : candidates) {
    queue.push({e, marginal_gain(work, sat, e), 0});
    ++result.gain_evaluations;
  }

  std::size_t round = 0;
  while (result.selected.size() < target) {
    LazyEntry top = queue.pop();
    if (top.stamp != round) {
      top.gain = marginal_gain(work, sat, top.item);
      top.stamp = round;
      ++result.gain_evaluations;
      if (!queue.empty() && LazyQueue::ranks_before(queue.top(), top)) {
        queue.push(top);
        continue;
      }
    }
    commit(work, top.item);
    result.selected.push_back(top.item);
    result.gains.push_back(top.gain);
    ++round;
  }
  finish(result, work, sat);
  return result;
}

RecommendationResult eager_greedy(const GscoreState& state, const SaturationSpec& sat, int k) {
  const std::vector<ItemId> candidates = checked_candidates(state, k);
  const std::size_t target = std::min<std::size_t>(static_cast<std::size_t>(k), candidates.size());

  GscoreState work = state;
  RecommendationResult result;
  while (result.selected.size() < target) {
    bool have = false;
    LazyEntry best{0, 0.0, 0};
    for (ItemId e : work.candidates()) {
      const LazyEntry entry{e, marginal_gain(work, sat, e), result.selected.size()};
      ++result.gain_evaluations;
      if (!have || LazyQueue::ranks_before(entry, best)) {
        best = entry;
        have = true;
      }
    }
    commit(work, best.item);
    result.selected.push_back(best.item);
    result.gains.push_back(best.gain);
  }
  finish(result, work, sat);
  return result;
}

ExhaustiveResult exhaustive(const GscoreState& state, const SaturationSpec& sat, int k,
                            std::size_t max_subsets) {
  const std::vector<ItemId> candidates = checked_candidates(state, k);
  const std::size_t size = std::min<std::size_t>(static_cast<std::size_t>(k), candidates.size());
  const std::size_t subsets = bounded_binomial(candidates.size(), size, max_subsets);
  if (subsets > max_subsets) {
    throw std::invalid_argument("exhaustive search over C(" + std::to_string(candidates.size()) +
                                "," + std::to_string(size) + ") subsets exceeds cap " +
                                std::to_string(max_subsets));
  }
  Enumeration search{sat, candidates, size, {}, {}, false};
  search.visit(state, 0);
  return search.best;
}

}  // namespace grouprec
