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

// Group Utility Loss Minimization (GULM) re-ranking.
//
// For each user group, the category that is over-represented in the
// recommendations relative to the group's input data is "shed": recommended
// items from it are swapped, one user at a time, for the best unrecommended
// candidate of the other category. Swaps are taken greedily in order of
// utility loss V(u, drop) - V(u, add) until the group's output preference
// ratio matches its input preference ratio (to the nearest whole swap).
//
// Only the two-category setting is supported.

#ifndef BIASD_GULM_H_
#define BIASD_GULM_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "metrics.h"
#include "recommender.h"

namespace biasd {

struct SwapCandidate {
  UserId user = 0;
  uint32_t drop_index = 0;  // index into the user's candidate ranking
  uint32_t add_index = 0;
  ItemId drop_item = 0;
  ItemId add_item = 0;
  double loss = 0.0;
};

struct SwapTarget {
  CategoryId category = 0;  // category to shed
  int64_t count = 0;        // 0 when the group needs no correction
};

struct GroupPlan {
  GroupId group = 0;
  CategoryId shed_category = 0;
  int64_t target_swaps = 0;
  std::vector<SwapCandidate> swaps;  // in execution order
  double total_loss = 0.0;

  int64_t shortfall() const {
    return target_swaps - static_cast<int64_t>(swaps.size());
  }
};

struct RerankPlan {
  std::vector<GroupPlan> groups;
};

// Number of swaps that brings group `g`'s output preference ratio for its
// over-represented category down to the input ratio, rounded half-to-even.
SwapTarget TargetSwapCount(const RecommendationSet& recs,
                           const InteractionMatrix& s, const Labeling& labels,
                           GroupId g);

// Pairs u's lowest-ranked recommended item in `shed` with u's highest-ranked
// unrecommended candidate outside `shed`.
std::optional<SwapCandidate> UserSwapCandidate(const RecommendationSet& recs,
                                               UserId u, CategoryId shed,
                                               const Labeling& labels);

// Replaces the candidate's drop item by its add item in u's picks.
void ApplySwap(RecommendationSet& recs, const SwapCandidate& swap);

struct RerankResult {
  RecommendationSet recs;
  RerankPlan plan;
};

// Requires full candidate rankings. Shortfalls are reported in the plan and
// on the run log.
RerankResult Rerank(const RecommendationSet& recs, const InteractionMatrix& s,
                    const Labeling& labels);

inline constexpr const char* kRerankPlanHeader =
    "group,target_swaps,executed_swaps,total_loss,shortfall";

void WriteRerankPlanCsv(const RerankPlan& plan, std::ostream& out);

}  // namespace biasd

#endif  // BIASD_GULM_H_
