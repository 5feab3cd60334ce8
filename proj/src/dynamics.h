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

// Iterated recommend -> accept -> retrain feedback loop.
//
// At every iteration each user receives top-r recommendations (optionally
// re-ranked with GULM). Utilities are normalized by the user's top
// recommendation and each recommendation is accepted independently with that
// probability; accepted items are added to the data for the next iteration.
//
// Randomness for user u at iteration t comes from a private stream seeded by
// DeriveSeed(seed, {t, u}), so results do not depend on thread count.

#ifndef BIASD_DYNAMICS_H_
#define BIASD_DYNAMICS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "metrics.h"
#include "recommender.h"

namespace biasd {

enum class Reranker { kNone, kGulm };

struct DynamicsConfig {
  size_t iterations = 5;
  size_t k = 50;
  size_t r = 10;
  uint64_t seed = 1;
  Reranker reranker = Reranker::kNone;
  size_t threads = 1;
};

struct TrajectoryCell {
  GroupId group = 0;
  CategoryId category = 0;
  std::optional<double> pr;
  std::optional<double> bias;
};

struct TrajectoryPoint {
  size_t iteration = 0;
  std::vector<TrajectoryCell> cells;  // row-major over (group, category)
  std::optional<double> mean_accepted;  // empty for iteration 0

  const TrajectoryCell& at(GroupId g, CategoryId c, size_t n_categories) const {
    return cells[g * n_categories + c];
  }
};

struct Trajectory {
  size_t n_groups = 0;
  size_t n_categories = 0;
  std::vector<TrajectoryPoint> points;  // iterations 0..T
};

// p_j = V(u, i_j) / V(u, i_1). Throws kInvalidArgument on an empty list or a
// non-positive top utility.
std::vector<double> AcceptanceProbabilities(std::span<const ScoredItem> recs);

struct StepResult {
  InteractionMatrix matrix;
  int64_t accepted = 0;
};

// One feedback iteration applied to `s`. `iteration` selects the random
// substreams (the first step of a run is iteration 1).
StepResult Step(const InteractionMatrix& s, const Labeling& labels,
                const DynamicsConfig& cfg, size_t iteration);

Trajectory RunDynamics(const InteractionMatrix& s0, const Labeling& labels,
                       const DynamicsConfig& cfg);

// Snapshot of the preference ratios and biases of `s`.
TrajectoryPoint Snapshot(const InteractionMatrix& s, const Labeling& labels,
                         size_t iteration);

inline constexpr const char* kTrajectoryHeader =
    "iteration,group,category,pr,bias,mean_accepted";

void WriteTrajectoryCsv(const Trajectory& t, std::ostream& out);

}  // namespace biasd

#endif  // BIASD_DYNAMICS_H_
