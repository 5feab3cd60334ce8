// Copyright 2026 The biasd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "dynamics.h"
#include "oracle.h"
#include "rng.h"
#include "synthgen.h"
#include "test_util.h"

namespace biasd {
namespace {

Dataset Synthetic(double rho, uint64_t seed, size_t n = 1000) {
  SyntheticConfig cfg;
  cfg.n_users = cfg.n_items = n;
  cfg.rho1 = cfg.rho2 = rho;
  cfg.seed = seed;
  return Generate(cfg);
}

TEST(AcceptanceProbabilities, Examples) {
  const std::vector<ScoredItem> three = {{0, 0.8}, {1, 0.4}, {2, 0.2}};
  EXPECT_EQ(AcceptanceProbabilities(three), (std::vector<double>{1.0, 0.5, 0.25}));
  const std::vector<ScoredItem> one = {{4, 0.3}};
  EXPECT_EQ(AcceptanceProbabilities(one), std::vector<double>{1.0});
  const std::vector<ScoredItem> equal = {{0, 0.1}, {1, 0.1}};
  EXPECT_EQ(AcceptanceProbabilities(equal), (std::vector<double>{1.0, 1.0}));
  EXPECT_BIASD_ERROR(AcceptanceProbabilities({}), kInvalidArgument);
  const std::vector<ScoredItem> zero = {{0, 0.0}};
  EXPECT_BIASD_ERROR(AcceptanceProbabilities(zero), kInvalidArgument);
}

TEST(Step, UserWithoutCandidatesIsUnchanged) {
  // User 2 shares nothing with anyone, and its only neighbour is a subset.
  Labeling labels({0, 0, 1}, {0, 1, 0, 1, 0});
  auto s = InteractionMatrix::FromRows(5, {{0, 1}, {0, 1, 2}, {4}});
  DynamicsConfig cfg;
  cfg.k = 1;
  cfg.r = 3;
  const StepResult step = Step(s, labels, cfg, 1);
  EXPECT_EQ(std::vector<ItemId>(step.matrix.row(2).begin(), step.matrix.row(2).end()),
            std::vector<ItemId>{4});
  EXPECT_EQ(std::vector<ItemId>(step.matrix.row(1).begin(), step.matrix.row(1).end()),
            (std::vector<ItemId>{0, 1, 2}));
  // User 0 always accepts its single top item.
  EXPECT_TRUE(step.matrix.Contains(0, 2));
  EXPECT_EQ(step.accepted, 1);
}

TEST(Step, ReplaysPinnedStreams) {
  std::mt19937_64 gen(4);
  auto s = oracle::RandomMatrix(gen, 12, 20, 0.3);
  auto labels = oracle::RandomLabels(gen, 12, 20, 2, 2);
  DynamicsConfig cfg;
  cfg.k = 3;
  cfg.r = 4;
  cfg.seed = 99;
  const size_t t = 3;
  const StepResult step = Step(s, labels, cfg, t);

  const auto brute = oracle::Recommend(oracle::ToDense(s), 3, 4);
  auto expect = oracle::ToDense(s);
  int64_t accepted = 0;
  for (UserId u = 0; u < 12; ++u) {
    const auto& top = brute[u].top;
    if (top.empty()) continue;
    Rng rng(DeriveSeed(99, {t, u}));
    for (const auto& [item, util] : top) {
      if (rng.UnitDouble() < util / top.front().second) {
        expect[u][item] = 1;
        ++accepted;
      }
    }
  }
  EXPECT_EQ(oracle::ToDense(step.matrix), expect);
  EXPECT_EQ(step.accepted, accepted);
}

TEST(Step, ThreadCountDoesNotMatter) {
  const Dataset d = Synthetic(0.7, 3, 300);
  DynamicsConfig one;
  one.k = 20;
  DynamicsConfig four = one;
  four.threads = 4;
  EXPECT_EQ(Step(d.matrix, d.labels, one, 1).matrix,
            Step(d.matrix, d.labels, four, 1).matrix);
  four.reranker = one.reranker = Reranker::kGulm;
  EXPECT_EQ(Step(d.matrix, d.labels, one, 2).matrix,
            Step(d.matrix, d.labels, four, 2).matrix);
}

TEST(RunDynamics, ZeroIterations) {
  const Dataset d = Synthetic(0.7, 3, 100);
  DynamicsConfig cfg;
  cfg.iterations = 0;
  const Trajectory t = RunDynamics(d.matrix, d.labels, cfg);
  ASSERT_EQ(t.points.size(), 1u);
  EXPECT_FALSE(t.points[0].mean_accepted.has_value());
  EXPECT_EQ(*t.points[0].at(0, 0, 2).pr, PreferenceRatio(d.matrix, d.labels, 0, 0));
}

TEST(RunDynamics, SelectionsOnlyGrow) {
  const Dataset d = Synthetic(0.7, 8, 200);
  DynamicsConfig cfg;
  cfg.iterations = 1;
  cfg.k = 10;
  const StepResult step = Step(d.matrix, d.labels, cfg, 1);
  for (UserId u = 0; u < 200; ++u) {
    for (ItemId i : d.matrix.row(u)) EXPECT_TRUE(step.matrix.Contains(u, i));
  }
  EXPECT_EQ(step.matrix.NumSelections(), d.matrix.NumSelections() + step.accepted);
}

// Own-category PR averaged over both groups; single groups drift a few
// points either way at one seed.
double OwnPr(const TrajectoryPoint& p) {
  return (*p.at(0, 0, 2).pr + *p.at(1, 1, 2).pr) / 2.0;
}

TEST(RunDynamics, NeutralPreferenceStaysPut) {
  double drift = 0.0, accepted = 0.0;
  size_t steps = 0;
  for (uint64_t seed : {31, 5, 8}) {
    const Dataset d = Synthetic(0.6, seed);
    DynamicsConfig cfg;
    cfg.seed = seed;
    const Trajectory t = RunDynamics(d.matrix, d.labels, cfg);
    drift += OwnPr(t.points.back()) - OwnPr(t.points.front());
    for (size_t i = 1; i < t.points.size(); ++i, ++steps) {
      accepted += *t.points[i].mean_accepted;
    }
  }
  EXPECT_NEAR(drift / 3.0, 0.0, 0.02);
  EXPECT_NEAR(accepted / steps, 7.0, 1.0);
}

TEST(RunDynamics, StrongPreferenceGrows) {
  const Dataset d = Synthetic(0.8, 32);
  DynamicsConfig cfg;
  cfg.seed = 32;
  const Trajectory t = RunDynamics(d.matrix, d.labels, cfg);
  EXPECT_GT(*t.points.back().at(0, 0, 2).pr, *t.points.front().at(0, 0, 2).pr);
  EXPECT_GT(*t.points.back().at(1, 1, 2).pr, *t.points.front().at(1, 1, 2).pr);
}

TEST(RunDynamics, TrajectoryCsv) {
  const Dataset d = Synthetic(0.7, 5, 100);
  DynamicsConfig cfg;
  cfg.iterations = 1;
  cfg.k = 10;
  std::ostringstream out;
  WriteTrajectoryCsv(RunDynamics(d.matrix, d.labels, cfg), out);
  std::istringstream in(out.str());
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 9u);
  EXPECT_EQ(lines[0], "iteration,group,category,pr,bias,mean_accepted");
  EXPECT_EQ(lines[1].substr(0, 6), "0,0,0,");
  EXPECT_EQ(lines[1].substr(lines[1].size() - 3), ",NA");
  EXPECT_EQ(lines[8].substr(0, 6), "1,1,1,");
}

}  // namespace
}  // namespace biasd
