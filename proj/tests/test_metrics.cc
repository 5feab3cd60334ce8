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

#include <cmath>
#include <random>
#include <sstream>

#include "metrics.h"
#include "oracle.h"
#include "test_util.h"

namespace biasd {
namespace {

// Users 0,1 in group 0, user 2 in group 1; items 0,1 in category 0.
struct Fixture {
  Labeling labels{{0, 0, 1}, {0, 0, 1, 1}};
  InteractionMatrix s = InteractionMatrix::FromRows(4, {{0, 1, 2}, {0}, {2, 3}});
  InteractionMatrix r = InteractionMatrix::FromRows(4, {{3}, {1, 2}, {0}});
};

TEST(InteractionMatrix, FromRowsSortsAndValidates) {
  auto m = InteractionMatrix::FromRows(5, {{4, 1}, {}});
  EXPECT_EQ(m.n_users(), 2u);
  EXPECT_EQ(m.row(0)[0], 1u);
  EXPECT_TRUE(m.Contains(0, 4));
  EXPECT_FALSE(m.Contains(1, 4));
  EXPECT_EQ(m.NumSelections(), 2);
  EXPECT_BIASD_ERROR(InteractionMatrix::FromRows(3, {{3}}), kInvalidArgument);
  EXPECT_BIASD_ERROR(InteractionMatrix::FromRows(3, {{1, 1}}), kInvalidArgument);
}

TEST(InteractionMatrix, AddReportsNovelty) {
  InteractionMatrix m(2, 3);
  EXPECT_TRUE(m.Add(1, 2));
  EXPECT_FALSE(m.Add(1, 2));
  EXPECT_TRUE(m.Add(1, 0));
  EXPECT_EQ(m.row(1)[0], 0u);
}

TEST(Labeling, RejectsGapsInIds) {
  EXPECT_BIASD_ERROR(Labeling({0, 2}, {0}), kInvalidArgument);
  EXPECT_BIASD_ERROR(Labeling({0}, {1}), kInvalidArgument);
  Labeling l({1, 0, 1}, {0, 0, 0});
  EXPECT_EQ(l.n_groups(), 2u);
  EXPECT_EQ(l.group_size(1), 2);
  EXPECT_EQ(l.category_size(0), 3);
}

TEST(PreferenceRatio, TwoOfThree) {
  // A selected {0,1} in C, B selected {2} outside it.
  Labeling labels({0, 0}, {0, 0, 1});
  auto m = InteractionMatrix::FromRows(3, {{0, 1}, {2}});
  EXPECT_DOUBLE_EQ(PreferenceRatio(m, labels, 0, 0), 2.0 / 3.0);
}

TEST(PreferenceRatio, AllInCategory) {
  Labeling labels({0, 1}, {0, 1});
  auto m = InteractionMatrix::FromRows(2, {{0}, {1}});
  EXPECT_EQ(PreferenceRatio(m, labels, 0, 0), 1.0);
}

TEST(PreferenceRatio, EmptyGroupActivity) {
  Labeling labels({0, 1}, {0, 1});
  auto m = InteractionMatrix::FromRows(2, {{0}, {}});
  EXPECT_BIASD_ERROR(PreferenceRatio(m, labels, 1, 0), kEmptyGroupActivity);
}

TEST(PreferenceRatio, DimensionMismatch) {
  Labeling labels({0, 1}, {0, 1});
  auto m = InteractionMatrix::FromRows(3, {{0}, {1}});
  EXPECT_BIASD_ERROR(PreferenceRatio(m, labels, 0, 0), kDimensionMismatch);
}

TEST(CategoryPrior, Fractions) {
  std::vector<CategoryId> half(1000, 0), tenth(1000, 1), thirty(1000, 1);
  for (size_t i = 0; i < 500; ++i) half[i] = 1;
  for (size_t i = 0; i < 100; ++i) tenth[i] = 0;
  for (size_t i = 0; i < 300; ++i) thirty[i] = 0;
  EXPECT_EQ(CategoryPrior(Labeling({0}, half), 0), 0.5);
  EXPECT_EQ(CategoryPrior(Labeling({0}, tenth), 0), 0.1);
  EXPECT_EQ(CategoryPrior(Labeling({0}, thirty), 0), 0.3);
}

TEST(Bias, RatioOverPrior) {
  std::vector<CategoryId> even(20, 1);
  for (size_t i = 0; i < 10; ++i) even[i] = 0;
  auto seven_three = InteractionMatrix::FromRows(20, {{0, 1, 2, 3, 4, 5, 6, 10, 11, 12}});
  EXPECT_NEAR(Bias(seven_three, Labeling({0}, even), 0, 0), 1.4, 1e-12);

  // PR equal to the category's share of items gives bias 1.
  std::vector<CategoryId> seventy = {0, 0, 0, 0, 0, 0, 0, 1, 1, 1};
  auto all = InteractionMatrix::FromRows(10, {{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}});
  EXPECT_NEAR(Bias(all, Labeling({0}, seventy), 0, 0), 1.0, 1e-12);

  auto uniform = InteractionMatrix::FromRows(20, {{0, 10}, {1, 2, 11, 12}});
  Labeling two({0, 1}, even);
  for (GroupId g = 0; g < 2; ++g) {
    for (CategoryId c = 0; c < 2; ++c) EXPECT_NEAR(Bias(uniform, two, g, c), 1.0, 1e-12);
  }
}

TEST(BiasDisparity, Examples) {
  EXPECT_NEAR(BiasDisparity(1.39, 1.67), 0.20, 0.005);
  // -0.51 is what unrounded biases near 0.58 and 0.28 give; the rounded pair
  // itself yields -0.30 / 0.58.
  EXPECT_NEAR(BiasDisparity(0.58, 0.28), -0.30 / 0.58, 1e-12);
  bool reachable = false;
  for (double in = 0.575; in <= 0.585; in += 0.0005) {
    for (double out = 0.275; out <= 0.285; out += 0.0005) {
      reachable |= std::fabs(BiasDisparity(in, out) + 0.51) <= 0.005;
    }
  }
  EXPECT_TRUE(reachable);
  EXPECT_EQ(BiasDisparity(1.3, 1.3), 0.0);
  EXPECT_BIASD_ERROR(BiasDisparity(0.0, 1.0), kZeroInputBias);
}

TEST(BiasReport, HandFixture) {
  Fixture f;
  const BiasReport rep = MakeBiasReport(f.s, f.r, f.labels);
  ASSERT_EQ(rep.cells.size(), 4u);
  // Group 0: input 3 of 4 in C0; output 1 of 3.
  EXPECT_DOUBLE_EQ(*rep.at(0, 0).pr_input, 0.75);
  EXPECT_DOUBLE_EQ(*rep.at(0, 0).pr_output, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(*rep.at(0, 0).bias_input, 1.5);
  EXPECT_DOUBLE_EQ(*rep.at(0, 0).bias_output, 2.0 / 3.0);
  EXPECT_NEAR(*rep.at(0, 0).bias_disparity, -5.0 / 9.0, 1e-12);
  EXPECT_NEAR(*rep.at(0, 1).bias_disparity, 5.0 / 3.0, 1e-12);
  // Group 1 never chose C0 in the input.
  EXPECT_EQ(*rep.at(1, 0).bias_input, 0.0);
  EXPECT_FALSE(rep.at(1, 0).bias_disparity.has_value());
  EXPECT_DOUBLE_EQ(*rep.at(1, 1).bias_disparity, -1.0);

  std::ostringstream csv;
  WriteBiasReportCsv(rep, csv);
  EXPECT_EQ(csv.str(),
            "group,category,pr_in,pr_out,bias_in,bias_out,bias_disparity\n"
            "0,0,0.750000,0.333333,1.500000,0.666667,-0.555556\n"
            "0,1,0.250000,0.666667,0.500000,1.333333,1.666667\n"
            "1,0,0.000000,1.000000,0.000000,2.000000,NA\n"
            "1,1,1.000000,0.000000,2.000000,0.000000,-1.000000\n");
}

TEST(BiasReport, SameMatrixHasNoDisparity) {
  Fixture f;
  const BiasReport rep = MakeBiasReport(f.s, f.s, f.labels);
  for (const BiasCell& c : rep.cells) {
    if (c.bias_disparity) EXPECT_EQ(*c.bias_disparity, 0.0);
  }
}

TEST(BiasReport, InactiveOutputGroupIsNA) {
  Fixture f;
  auto r = InteractionMatrix::FromRows(4, {{3}, {1}, {}});
  const BiasReport rep = MakeBiasReport(f.s, r, f.labels);
  EXPECT_FALSE(rep.at(1, 1).pr_output.has_value());
  EXPECT_FALSE(rep.at(1, 1).bias_disparity.has_value());
  EXPECT_TRUE(rep.at(1, 1).pr_input.has_value());
}

TEST(MetricProperties, IdentitiesOnRandomData) {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t n = 2 + gen() % 20, m = 2 + gen() % 20;
    const size_t groups = 1 + gen() % std::min<size_t>(n, 4);
    const size_t cats = 1 + gen() % std::min<size_t>(m, 4);
    auto labels = oracle::RandomLabels(gen, n, m, groups, cats);
    auto s = oracle::RandomMatrix(gen, n, m, 0.3);
    const auto counts = CountSelections(s, labels);
    for (GroupId g = 0; g < groups; ++g) {
      if (counts.GroupTotal(g) == 0) continue;
      double sum = 0.0;
      for (CategoryId c = 0; c < cats; ++c) {
        const double pr = PreferenceRatio(s, labels, g, c);
        sum += pr;
        EXPECT_NEAR(Bias(s, labels, g, c), pr / CategoryPrior(labels, c), 1e-12);
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
    const double b = std::uniform_real_distribution<double>(0.01, 5.0)(gen);
    EXPECT_EQ(BiasDisparity(b, b), 0.0);
  }
}

TEST(MetricProperties, TwoEqualCategoriesDoublePreference) {
  std::mt19937_64 gen(7);
  std::vector<CategoryId> cats(40);
  for (size_t i = 0; i < 40; ++i) cats[i] = i % 2;
  Labeling labels({0, 0, 1, 1, 1}, cats);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = oracle::RandomMatrix(gen, 5, 40, 0.4);
    for (GroupId g = 0; g < 2; ++g) {
      for (CategoryId c = 0; c < 2; ++c) {
        if (CountSelections(s, labels).GroupTotal(g) == 0) continue;
        EXPECT_NEAR(Bias(s, labels, g, c), 2.0 * PreferenceRatio(s, labels, g, c),
                    1e-12);
      }
    }
  }
}

}  // namespace
}  // namespace biasd
