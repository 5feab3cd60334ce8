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

#include "dynamics.h"

#include <algorithm>

#include "csv.h"
#include "error.h"
#include "gulm.h"
#include "parallel.h"
#include "rng.h"

namespace biasd {

std::vector<double> AcceptanceProbabilities(std::span<const ScoredItem> recs) {
  if (recs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no recommendations to accept");
  }
  const double top = recs.front().utility;
  if (!(top > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "top utility must be positive");
  }
  std::vector<double> p;
  p.reserve(recs.size());
  for (const ScoredItem& it : recs) p.push_back(it.utility / top);
  return p;
}

StepResult Step(const InteractionMatrix& s, const Labeling& labels,
                const DynamicsConfig& cfg, size_t iteration) {
  CheckCompatible(s, labels);
  RecommendationSet recs =
      Recommend(s, {.k = cfg.k, .r = cfg.r, .threads = cfg.threads});
  if (cfg.reranker == Reranker::kGulm) {
    recs = Rerank(recs, s, labels).recs;
  }

  std::vector<std::vector<ItemId>> accepted(s.n_users());
  ParallelChunks(s.n_users(), ResolveThreads(cfg.threads),
                 [&](size_t begin, size_t end, size_t) {
                   for (size_t u = begin; u < end; ++u) {
                     const auto list = recs.Recommended(static_cast<UserId>(u));
                     if (list.empty()) continue;
                     // Re-ranked lists may start with a swapped-in item, so
                     // normalize by the highest utility present.
                     std::vector<ScoredItem> ordered = list;
                     std::stable_sort(ordered.begin(), ordered.end(),
                                      [](const ScoredItem& a, const ScoredItem& b) {
                                        return a.utility > b.utility;
                                      });
                     const auto p = AcceptanceProbabilities(ordered);
                     Rng rng(DeriveSeed(cfg.seed, {iteration, u}));
                     for (size_t j = 0; j < ordered.size(); ++j) {
                       if (rng.Bernoulli(p[j])) accepted[u].push_back(ordered[j].item);
                     }
                   }
                 });

  StepResult out{s, 0};
  for (UserId u = 0; u < s.n_users(); ++u) {
    for (ItemId i : accepted[u]) {
      if (out.matrix.Add(u, i)) ++out.accepted;
    }
  }
  return out;
}

TrajectoryPoint Snapshot(const InteractionMatrix& s, const Labeling& labels,
                         size_t iteration) {
  const GroupCategoryCounts counts = CountSelections(s, labels);
  TrajectoryPoint point;
  point.iteration = iteration;
  for (GroupId g = 0; g < labels.n_groups(); ++g) {
    const bool active = counts.GroupTotal(g) > 0;
    for (CategoryId c = 0; c < labels.n_categories(); ++c) {
      TrajectoryCell cell{g, c, std::nullopt, std::nullopt};
      if (active) {
        cell.pr = PreferenceRatio(counts, g, c);
        cell.bias = *cell.pr / CategoryPrior(labels, c);
      }
      point.cells.push_back(cell);
    }
  }
  return point;
}

Trajectory RunDynamics(const InteractionMatrix& s0, const Labeling& labels,
                       const DynamicsConfig& cfg) {
  if (cfg.k == 0 || cfg.r == 0) {
    throw Error(ErrorCode::kInvalidArgument, "K and r must be >= 1");
  }
  Trajectory traj;
  traj.n_groups = labels.n_groups();
  traj.n_categories = labels.n_categories();
  traj.points.push_back(Snapshot(s0, labels, 0));
  InteractionMatrix current = s0;
  for (size_t t = 1; t <= cfg.iterations; ++t) {
    StepResult step = Step(current, labels, cfg, t);
    current = std::move(step.matrix);
    TrajectoryPoint point = Snapshot(current, labels, t);
    point.mean_accepted = s0.n_users() == 0
                              ? 0.0
                              : static_cast<double>(step.accepted) /
                                    static_cast<double>(s0.n_users());
    traj.points.push_back(std::move(point));
  }
  return traj;
}

void WriteTrajectoryCsv(const Trajectory& t, std::ostream& out) {
  out << kTrajectoryHeader << '\n';
  for (const TrajectoryPoint& p : t.points) {
    for (const TrajectoryCell& c : p.cells) {
      out << p.iteration << ',' << c.group << ',' << c.category << ','
          << FormatFixed(c.pr) << ',' << FormatFixed(c.bias) << ','
          << FormatFixed(p.mean_accepted) << '\n';
    }
  }
}

}  // namespace biasd
