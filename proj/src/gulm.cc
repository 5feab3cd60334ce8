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

#include "gulm.h"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "csv.h"
#include "error.h"
#include "log.h"

namespace biasd {
namespace {

void RequireTwoCategories(const Labeling& labels) {
  if (labels.n_categories() != 2) {
    throw Error(ErrorCode::kUnsupported,
                "re-ranking supports exactly two categories, got " +
                    std::to_string(labels.n_categories()));
  }
}

}  // namespace

SwapTarget TargetSwapCount(const RecommendationSet& recs,
                           const InteractionMatrix& s, const Labeling& labels,
                           GroupId g) {
  RequireTwoCategories(labels);
  CheckCompatible(s, labels);
  const GroupCategoryCounts in = CountSelections(s, labels);
  const GroupCategoryCounts out = CountSelections(ToInteractionMatrix(recs), labels);
  const int64_t total_out = out.GroupTotal(g);
  if (total_out == 0 || in.GroupTotal(g) == 0) return {};

  for (CategoryId c = 0; c < 2; ++c) {
    const double excess = static_cast<double>(out.counts[g][c]) -
                          PreferenceRatio(in, g, c) * static_cast<double>(total_out);
    if (excess > 0.0) {
      // Default rounding mode is to-nearest-even.
      const auto count = static_cast<int64_t>(std::nearbyint(excess));
      if (count > 0) return {c, count};
    }
  }
  return {};
}

std::optional<SwapCandidate> UserSwapCandidate(const RecommendationSet& recs,
                                               UserId u, CategoryId shed,
                                               const Labeling& labels) {
  const UserRecommendations& rec = recs.user(u);
  std::optional<uint32_t> drop;
  for (auto it = rec.picks.rbegin(); it != rec.picks.rend(); ++it) {
    if (labels.category_of(rec.candidates[*it].item) == shed) {
      drop = *it;
      break;
    }
  }
  if (!drop) return std::nullopt;

  std::optional<uint32_t> add;
  size_t next_pick = 0;
  for (uint32_t j = 0; j < rec.candidates.size(); ++j) {
    if (next_pick < rec.picks.size() && rec.picks[next_pick] == j) {
      ++next_pick;
      continue;
    }
    if (labels.category_of(rec.candidates[j].item) != shed) {
      add = j;
      break;
    }
  }
  if (!add) return std::nullopt;

  SwapCandidate out;
  out.user = u;
  out.drop_index = *drop;
  out.add_index = *add;
  out.drop_item = rec.candidates[*drop].item;
  out.add_item = rec.candidates[*add].item;
  out.loss = rec.candidates[*drop].utility - rec.candidates[*add].utility;
  return out;
}

void ApplySwap(RecommendationSet& recs, const SwapCandidate& swap) {
  auto& picks = recs.mutable_user(swap.user).picks;
  auto it = std::lower_bound(picks.begin(), picks.end(), swap.drop_index);
  if (it == picks.end() || *it != swap.drop_index) {
    throw Error(ErrorCode::kInternal, "swap drops an unrecommended item");
  }
  picks.erase(it);
  picks.insert(std::lower_bound(picks.begin(), picks.end(), swap.add_index),
               swap.add_index);
}

RerankResult Rerank(const RecommendationSet& recs, const InteractionMatrix& s,
                    const Labeling& labels) {
  RequireTwoCategories(labels);
  if (!recs.has_full_candidates()) {
    throw Error(ErrorCode::kInvalidArgument,
                "re-ranking needs full candidate rankings");
  }
  if (recs.n_users() != labels.n_users()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "recommendations and labeling disagree on user count");
  }

  RerankResult result{recs, {}};
  std::vector<std::vector<UserId>> members(labels.n_groups());
  for (UserId u = 0; u < labels.n_users(); ++u) {
    members[labels.group_of(u)].push_back(u);
  }

  for (GroupId g = 0; g < labels.n_groups(); ++g) {
    GroupPlan plan;
    plan.group = g;
    const SwapTarget target = TargetSwapCount(recs, s, labels, g);
    plan.shed_category = target.category;
    plan.target_swaps = target.count;

    auto worse = [](const SwapCandidate& a, const SwapCandidate& b) {
      if (a.loss != b.loss) return a.loss > b.loss;
      return a.user > b.user;
    };
    std::priority_queue<SwapCandidate, std::vector<SwapCandidate>,
                        decltype(worse)>
        heap(worse);
    if (target.count > 0) {
      for (UserId u : members[g]) {
        if (auto c = UserSwapCandidate(result.recs, u, target.category, labels)) {
          heap.push(*c);
        }
      }
    }
    while (static_cast<int64_t>(plan.swaps.size()) < plan.target_swaps &&
           !heap.empty()) {
      const SwapCandidate best = heap.top();
      heap.pop();
      ApplySwap(result.recs, best);
      plan.swaps.push_back(best);
      plan.total_loss += best.loss;
      if (auto next = UserSwapCandidate(result.recs, best.user, target.category,
                                        labels)) {
        heap.push(*next);
      }
    }
    if (plan.shortfall() > 0) {
      LogLine("rerank: group " + std::to_string(g) + " shortfall of " +
              std::to_string(plan.shortfall()) + " swap(s) out of " +
              std::to_string(plan.target_swaps));
    }
    result.plan.groups.push_back(std::move(plan));
  }
  return result;
}

void WriteRerankPlanCsv(const RerankPlan& plan, std::ostream& out) {
  out << kRerankPlanHeader << '\n';
  for (const GroupPlan& g : plan.groups) {
    out << g.group << ',' << g.target_swaps << ',' << g.swaps.size() << ','
        << FormatFixed(g.total_loss) << ',' << g.shortfall() << '\n';
  }
}

}  // namespace biasd
