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

#include "grouprec/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace grouprec {
namespace {

using testing::InstanceShape;
using testing::oracle_gscore;
using testing::random_instance;
using testing::RandomInstance;

const SaturationSpec kLinear{ItemSaturation::kLog1p, UserSaturation::kIdentity, {}};
const SaturationSpec kConcave{ItemSaturation::kLog1p, UserSaturation::kSqrt, {}};
const SaturationSpec kModular{ItemSaturation::kIdentity, UserSaturation::kIdentity, {}};

// Two members rating items 0 and 1 with a 5, candidate 2 fully similar to both.
GscoreState two_member_state() {
  Group g;
  g.members = {0, 1};
  g.observed = {{{0, 5}}, {{1, 5}}};
  Eigen::MatrixXd W = Eigen::MatrixXd::Identity(3, 3);
  W(0, 2) = W(2, 0) = W(1, 2) = W(2, 1) = 1.0;
  Eigen::MatrixXd A = Eigen::MatrixXd::Ones(2, 2);
  return GscoreState(g, member_weights(A), AffinityRows::from_dense(W, {0, 1}));
}

std::vector<ItemId> random_subset(std::mt19937_64& rng, std::vector<ItemId> pool,
                                  std::size_t max_size) {
  std::shuffle(pool.begin(), pool.end(), rng);
  std::uniform_int_distribution<std::size_t> size(0, std::min(max_size, pool.size()));
  pool.resize(size(rng));
  return pool;
}

TEST(Gscore, EmptySelectionScoresZero) {
  const GscoreState s = two_member_state();
  EXPECT_EQ(gscore(s, kLinear), 0.0);
  EXPECT_EQ(gscore(s, kConcave), 0.0);
  EXPECT_EQ(gscore(s, kModular), 0.0);
}

TEST(Gscore, HandEvaluatedTwoMemberInstance) {
  GscoreState s = two_member_state();
  commit(s, 2);
  EXPECT_NEAR(gscore(s, kLinear), 10.0 * std::log(2.0), 1e-12);
  EXPECT_NEAR(gscore(s, kConcave), 2.0 * std::sqrt(5.0 * std::log(2.0)), 1e-12);
}

TEST(Gscore, MatchesDirectFormulaOnRandomInstances) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const RandomInstance inst = random_instance(rng, InstanceShape{});
    GscoreState s = inst.state();
    const auto S = random_subset(rng, inst.candidates(), 6);
    for (ItemId e : S) commit(s, e);
    for (const SaturationSpec& sat : {kLinear, kConcave, kModular}) {
      const double expected = oracle_gscore(inst, S, sat);
      EXPECT_NEAR(gscore(s, sat), expected, 1e-12 * (1.0 + expected));
      EXPECT_GE(gscore(s, sat), 0.0);
    }
  }
}

TEST(Gscore, ScaledIdentityDividesByTransportTime) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    const RandomInstance inst = random_instance(rng, InstanceShape{});
    SaturationSpec sat{ItemSaturation::kLog1p, UserSaturation::kScaledIdentity, {}};
    std::uniform_real_distribution<double> t(0.5, 3.0);
    for (std::size_t m = 0; m < inst.group.size(); ++m) sat.transport_times.push_back(t(rng));
    GscoreState s = inst.state();
    const auto S = random_subset(rng, inst.candidates(), 4);
    for (ItemId e : S) commit(s, e);
    EXPECT_NEAR(gscore(s, sat), oracle_gscore(inst, S, sat), 1e-12);
  }
}

TEST(Gscore, ScaledIdentityNeedsValidTimes) {
  const GscoreState s = two_member_state();
  SaturationSpec sat{ItemSaturation::kLog1p, UserSaturation::kScaledIdentity, {1.0}};
  EXPECT_THROW(gscore(s, sat), std::invalid_argument);
  sat.transport_times = {1.0, 0.0};
  EXPECT_THROW(marginal_gain(s, sat, 2), std::invalid_argument);
  sat.transport_times = {1.0, 2.0};
  EXPECT_NO_THROW(gscore(s, sat));
}

TEST(MarginalGain, ZeroAffinityColumnGivesZeroGainUnderIdentity) {
  Group g;
  g.members = {0, 1};
  g.observed = {{{0, 4}}, {{1, 2}}};
  Eigen::MatrixXd W = Eigen::MatrixXd::Identity(3, 3);
  const GscoreState s(g, {1.0, 1.0}, AffinityRows::from_dense(W, {0, 1}));
  EXPECT_EQ(marginal_gain(s, kModular, 2), 0.0);
  EXPECT_EQ(marginal_gain(s, kLinear, 2), 0.0);
}

TEST(MarginalGain, EqualsScoreDifferenceAndCommitAddsIt) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 200; ++trial) {
    const RandomInstance inst = random_instance(rng, InstanceShape{});
    GscoreState s = inst.state();
    for (ItemId e : random_subset(rng, inst.candidates(), 5)) commit(s, e);
    const auto z = s.candidates();
    if (z.empty()) continue;
    const ItemId e = z[std::uniform_int_distribution<std::size_t>(0, z.size() - 1)(rng)];
    for (const SaturationSpec& sat : {kLinear, kConcave, kModular}) {
      const double before = gscore(s, sat);
      const double delta = marginal_gain(s, sat, e);
      GscoreState next = s;
      commit(next, e);
      EXPECT_NEAR(gscore(next, sat), before + delta, 1e-12 * (1.0 + before));
    }
  }
}

TEST(Commit, RunningSumsMatchRecomputation) {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 100; ++trial) {
    const RandomInstance inst = random_instance(rng, InstanceShape{});
    GscoreState s = inst.state();
    const auto S = random_subset(rng, inst.candidates(), 8);
    for (ItemId e : S) commit(s, e);
    EXPECT_EQ(s.selected(), S);
    const auto rows = s.rows().items;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      double direct = 0.0;
      for (ItemId j : S) direct += inst.W(rows[r], j);
      EXPECT_NEAR(s.coverage()[r], direct, 1e-13);
    }
  }
}

TEST(Commit, RejectsObservedSelectedAndOutOfRange) {
  GscoreState s = two_member_state();
  EXPECT_FALSE(s.is_candidate(0));
  EXPECT_THROW(commit(s, 0), std::invalid_argument);
  EXPECT_THROW(commit(s, 3), std::invalid_argument);
  EXPECT_THROW(marginal_gain(s, kLinear, 1), std::invalid_argument);
  commit(s, 2);
  EXPECT_TRUE(s.is_selected(2));
  EXPECT_THROW(commit(s, 2), std::invalid_argument);
  EXPECT_THROW(marginal_gain(s, kLinear, 2), std::invalid_argument);
  EXPECT_TRUE(s.candidates().empty());
}

TEST(GscoreState, CopiesAreIndependent) {
  GscoreState a = two_member_state();
  GscoreState b = a;
  commit(b, 2);
  EXPECT_TRUE(a.selected().empty());
  EXPECT_EQ(gscore(a, kLinear), 0.0);
  EXPECT_GT(gscore(b, kLinear), 0.0);
}

TEST(GscoreState, ConstructorValidatesInputs) {
  Group g;
  g.members = {0, 1};
  g.observed = {{{0, 5}}, {{1, 5}}};
  const Eigen::MatrixXd W = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_THROW(GscoreState(g, {1.0}, AffinityRows::from_dense(W, {0, 1})),
               std::invalid_argument);
  EXPECT_THROW(GscoreState(g, {1.0, -1.0}, AffinityRows::from_dense(W, {0, 1})),
               std::invalid_argument);
  EXPECT_THROW(GscoreState(g, {1.0, 1.0}, AffinityRows::from_dense(W, {0})),
               std::invalid_argument);
  EXPECT_THROW(GscoreState(g, {1.0, 1.0}, std::shared_ptr<const AffinityRows>()),
               std::invalid_argument);
  Group dup = g;
  dup.members = {0, 0};
  EXPECT_THROW(GscoreState(dup, {1.0, 1.0}, AffinityRows::from_dense(W, {0, 1})),
               std::invalid_argument);
}

TEST(Gscore, MonotoneAndSubmodularOnRandomChains) {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 200; ++trial) {
    const RandomInstance inst = random_instance(rng, InstanceShape{});
    auto z = inst.candidates();
    if (z.size() < 2) continue;
    std::shuffle(z.begin(), z.end(), rng);
    const ItemId e = z.back();
    z.pop_back();
    for (const SaturationSpec& sat : {kLinear, kConcave}) {
      GscoreState s = inst.state();
      double previous_value = gscore(s, sat);
      double previous_gain = marginal_gain(s, sat, e);
      for (ItemId x : z) {
        commit(s, x);
        const double value = gscore(s, sat);
        const double gain = marginal_gain(s, sat, e);
        EXPECT_GE(value, previous_value - 1e-9);
        EXPECT_LE(gain, previous_gain + 1e-9);
        previous_value = value;
        previous_gain = gain;
      }
    }
  }
}

TEST(Gscore, IndicatorModularCaseIsSumOfItemScores) {
  std::mt19937_64 rng(36);
  InstanceShape shape;
  shape.indicator_affinity = true;
  for (int trial = 0; trial < 100; ++trial) {
    const RandomInstance inst = random_instance(rng, shape);
    const auto c = testing::modular_scores(inst);
    GscoreState s = inst.state();
    double expected = 0.0;
    for (ItemId e : random_subset(rng, inst.candidates(), 5)) {
      commit(s, e);
      expected += c[e];
    }
    EXPECT_NEAR(gscore(s, kModular), expected, 1e-12 * (1.0 + expected));
  }
}

}  // namespace
}  // namespace grouprec
