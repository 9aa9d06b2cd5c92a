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

#ifndef GROUPREC_OPTIMIZER_HPP_
#define GROUPREC_OPTIMIZER_HPP_

#include <cstddef>
#include <queue>
#include <vector>

#include "grouprec/consensus.hpp"

namespace grouprec {

// Queue entry: a candidate, its last computed gain and the selection size
// at which that gain was computed.
struct LazyEntry {
  ItemId item;
  double gain;
  std::size_t stamp;
};

// Max-queue ordered by cached gain, ties broken towards the lowest item id.
// Under submodularity a cached gain upper-bounds the current true gain.
class LazyQueue {
 public:
  void push(LazyEntry entry) { heap_.push(entry); }
  const LazyEntry& top() const { return heap_.top(); }
  LazyEntry pop() {
    LazyEntry e = heap_.top();
    heap_.pop();
    return e;
  }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

  // True when a ranks strictly before b in pop order.
  static bool ranks_before(const LazyEntry& a, const LazyEntry& b) {
    return a.gain != b.gain ? a.gain > b.gain : a.item < b.item;
  }

 private:
  struct Less {
    bool operator()(const LazyEntry& a, const LazyEntry& b) const { return ranks_before(b, a); }
  };
  std::priority_queue<LazyEntry, std::vector<LazyEntry>, Less> heap_;
};

struct RecommendationResult {
  std::vector<ItemId> selected;  // in selection order
  std::vector<double> gains;     // marginal gain of each selected item
  double objective = 0.0;        // Gscore of the final selection
  double certificate = 0.0;      // 1 - (1 - 1/k)^k for k = selected.size()
  std::size_t gain_evaluations = 0;
};

// Greedy guarantee factor 1 - (1 - 1/k)^k; 0 for k == 0.
double approximation_factor(std::size_t k);

// Number of gain evaluations a full-rescan greedy makes picking k of n.
std::size_t eager_scan_count(std::size_t n_candidates, std::size_t k);

// Lazy (accelerated) greedy. Gains are first computed against the current
// selection and kept in a LazyQueue; each round pops the best cached entry,
// recomputes its gain unless it is already fresh for this round, and either
// commits it or pushes it back when it no longer ranks first. Picks
// min(k, |candidates|) items. Does not modify `state`.
//
// Throws std::invalid_argument for k < 1 or an empty candidate set.
RecommendationResult saga(const GscoreState& state, const SaturationSpec& sat, int k);

// Full rescan of every candidate each round; same tie rule as saga.
RecommendationResult eager_greedy(const GscoreState& state, const SaturationSpec& sat, int k);

struct ExhaustiveResult {
  std::vector<ItemId> selected;  // ascending
  double value = 0.0;
};

inline constexpr std::size_t kDefaultExhaustiveCap = 2'000'000;

// Best subset of size min(k, |candidates|) by enumeration. Throws
// std::invalid_argument when C(|candidates|, k) exceeds `max_subsets`.
ExhaustiveResult exhaustive(const GscoreState& state, const SaturationSpec& sat, int k,
                            std::size_t max_subsets = kDefaultExhaustiveCap);

}  // namespace grouprec

#endif  // GROUPREC_OPTIMIZER_HPP_
