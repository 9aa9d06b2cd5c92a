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

#include "grouprec/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "grouprec/affinity.hpp"

namespace grouprec {

std::string to_string(GroupKind kind) {
  return kind == GroupKind::kRandom ? "random" : "similar";
}

GroupKind parse_group_kind(const std::string& text) {
  if (text == "random") return GroupKind::kRandom;
  if (text == "similar") return GroupKind::kSimilar;
  throw std::invalid_argument("unknown group kind '" + text + "'");
}

void validate(const EvalConfig& cfg) {
  if (!(cfg.holdout_frac > 0.0 && cfg.holdout_frac < 1.0)) {
    throw std::invalid_argument("holdout fraction must lie in (0, 1)");
  }
  if (cfg.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (cfg.k_list.empty()) throw std::invalid_argument("k list is empty");
  for (int k : cfg.k_list) {
    if (k < 1) throw std::invalid_argument("every k must be >= 1");
  }
  if (!(cfg.beta >= 0.0 && std::isfinite(cfg.beta))) throw std::invalid_argument("beta must be >= 0");
  if (!(cfg.dcg_log_base > 1.0)) throw std::invalid_argument("DCG log base must be > 1");
}

RatingsMatrix holdout_split(const RatingsMatrix& ratings, double frac, std::uint64_t seed) {
  if (!(frac > 0.0 && frac < 1.0)) throw std::invalid_argument("holdout fraction must lie in (0, 1)");
  const std::size_t n = ratings.n_items();
  // The epsilon keeps e.g. 0.3 * 10 from rounding up to 4.
  const auto held = static_cast<std::size_t>(std::ceil(frac * static_cast<double>(n) - 1e-9));
  if (held == 0 || held >= n) {
    throw std::invalid_argument("holdout of " + std::to_string(frac) + " over " +
                                std::to_string(n) + " items selects none or all of them");
  }
  std::vector<ItemId> items(n);
  std::iota(items.begin(), items.end(), ItemId{0});
  std::mt19937_64 rng(seed);
  std::shuffle(items.begin(), items.end(), rng);

  std::vector<char> is_test_item(n, 0);
  for (std::size_t t = 0; t < held; ++t) is_test_item[items[t]] = 1;
  std::vector<Split> split(ratings.n_entries());
  for (std::size_t e = 0; e < ratings.n_entries(); ++e) {
    split[e] = is_test_item[ratings.entry(e).item] ? Split::kTest : Split::kTrain;
  }
  return ratings.with_split(std::move(split));
}

RatingsMatrix holdout_split_entries(const RatingsMatrix& ratings, double frac,
                                    std::uint64_t seed) {
  if (!(frac > 0.0 && frac < 1.0)) throw std::invalid_argument("holdout fraction must lie in (0, 1)");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(frac);
  std::vector<Split> split(ratings.n_entries());
  for (auto& s : split) s = coin(rng) ? Split::kTest : Split::kTrain;
  return ratings.with_split(std::move(split));
}

GroupDraw make_groups(const GroupSpec& spec, const FeatureMatrix& user_features,
                      const RatingsMatrix& ratings) {
  if (spec.size < 2) throw std::invalid_argument("group size must be >= 2");
  if (spec.count < 0) throw std::invalid_argument("group count must be >= 0");
  if (user_features.rows() != ratings.n_users()) {
    throw std::invalid_argument("user features do not cover every user");
  }
  std::vector<UserId> eligible;
  for (UserId u = 0; u < ratings.n_users(); ++u) {
    if (ratings.train_count_of_user(u) > 0) eligible.push_back(u);
  }
  const auto size = static_cast<std::size_t>(spec.size);
  if (eligible.size() < size) {
    throw std::invalid_argument("only " + std::to_string(eligible.size()) +
                                " eligible users for groups of " + std::to_string(size));
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
  GroupDraw draw;
  for (int g = 0; g < spec.count; ++g) {
    std::vector<UserId> members;
    if (spec.kind == GroupKind::kRandom) {
      // Partial Fisher-Yates over a copy keeps the draw without replacement.
      std::vector<UserId> pool = eligible;
      for (std::size_t t = 0; t < size; ++t) {
        std::uniform_int_distribution<std::size_t> rest(t, pool.size() - 1);
        std::swap(pool[t], pool[rest(rng)]);
        members.push_back(pool[t]);
      }
    } else {
      members.push_back(eligible[pick(rng)]);
      for (int attempt = 0; attempt < spec.retry_budget && members.size() < size; ++attempt) {
        const UserId cand = eligible[pick(rng)];
        if (std::find(members.begin(), members.end(), cand) != members.end()) continue;
        const bool similar = std::all_of(members.begin(), members.end(), [&](UserId m) {
          return cosine_similarity(user_features, cand, m) > spec.sim_threshold;
        });
        if (similar) members.push_back(cand);
      }
      if (members.size() < size) {
        ++draw.failed;
        continue;
      }
    }
    draw.groups.push_back(make_group(ratings, std::move(members)));
  }
  return draw;
}

TestRelevance::TestRelevance(const RatingsMatrix& ratings, int relevance_threshold)
    : threshold_(relevance_threshold),
      by_user_(ratings.n_users()),
      relevant_(ratings.n_users()),
      relevant_counts_(ratings.n_items(), 0) {
  for (std::size_t e = 0; e < ratings.n_entries(); ++e) {
    if (ratings.is_train(e)) continue;
    const RatingTriple& t = ratings.entry(e);
    // Entries are (user, item)-ordered, so each list stays sorted.
    by_user_[t.user].emplace_back(t.item, t.rating);
    if (t.rating >= threshold_) {
      relevant_[t.user].push_back(t.item);
      ++relevant_counts_[t.item];
    }
  }
}

int TestRelevance::rating(UserId u, ItemId i) const {
  if (u >= by_user_.size()) return 0;
  const auto& list = by_user_[u];
  const auto it = std::lower_bound(list.begin(), list.end(), i,
                                   [](const auto& p, ItemId x) { return p.first < x; });
  return it != list.end() && it->first == i ? it->second : 0;
}

std::size_t TestRelevance::relevant_count(ItemId i) const {
  return i < relevant_counts_.size() ? relevant_counts_[i] : 0;
}

std::span<const ItemId> TestRelevance::relevant_items(UserId u) const {
  if (u >= relevant_.size()) return {};
  return relevant_[u];
}

bool TestRelevance::is_relevant(UserId u, ItemId i) const { return rating(u, i) >= threshold_; }

double dcg(std::span<const double> relevance, double log_base) {
  double total = 0.0;
  const double log_of_base = std::log(log_base);
  for (std::size_t p = 0; p < relevance.size(); ++p) {
    const double discount = std::log(static_cast<double>(p) + 2.0) / log_of_base;
    total += (std::exp2(relevance[p]) - 1.0) / discount;
  }
  return total;
}

double group_dcg(const Group& group, std::span<const ItemId> recommended,
                 const TestRelevance& test, double log_base) {
  if (group.members.empty()) return 0.0;
  std::vector<double> relevance(recommended.size());
  double total = 0.0;
  for (UserId u : group.members) {
    for (std::size_t p = 0; p < recommended.size(); ++p) {
      relevance[p] = test.rating(u, recommended[p]);
    }
    total += dcg(relevance, log_base);
  }
  return total / static_cast<double>(group.members.size());
}

std::optional<double> psr(const Group& group, std::span<const ItemId> recommended,
                          const TestRelevance& test, double beta) {
  const auto weight = [&](ItemId i) {
    return std::pow(1.0 / static_cast<double>(test.relevant_count(i)), beta);
  };
  double numerator = 0.0;
  double denominator = 0.0;
  for (UserId u : group.members) {
    for (ItemId i : test.relevant_items(u)) denominator += weight(i);
    for (ItemId i : recommended) {
      if (test.is_relevant(u, i)) numerator += weight(i);
    }
  }
  if (!(denominator > 0.0)) return std::nullopt;
  return numerator / denominator / static_cast<double>(group.members.size());
}

}  // namespace grouprec
