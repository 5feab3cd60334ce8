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

// Seeded generator of two-group / two-category synthetic selection data.
//
// Users [0, n1) form group 0 and favor category 0 (items [0, m1)); the rest
// form group 1 and favor category 1. Every user makes exactly
// round(density * n_items) distinct selections. Each selection independently
// picks the user's favored category with probability rho of the user's group,
// then a uniformly random not-yet-selected item inside that category.

#ifndef BIASD_SYNTHGEN_H_
#define BIASD_SYNTHGEN_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "metrics.h"

namespace biasd {

struct SyntheticConfig {
  size_t n_users = 1000;
  size_t n_items = 1000;
  double group_fraction = 0.5;     // share of users in group 0
  double category_fraction = 0.5;  // share of items in category 0
  double rho1 = 0.7;               // group 0 preference for category 0
  double rho2 = 0.7;               // group 1 preference for category 1
  double density = 0.05;
  uint64_t seed = 1;
};

struct SyntheticSizes {
  size_t group1 = 0;
  size_t group2 = 0;
  size_t category1 = 0;
  size_t category2 = 0;
  size_t selections_per_user = 0;
};

struct Dataset {
  InteractionMatrix matrix;
  Labeling labels;
};

// Resolves and validates block sizes. Throws kInvalidArgument for
// out-of-range parameters and kConfigInfeasible when a category cannot hold
// the expected demand.
SyntheticSizes ResolveSizes(const SyntheticConfig& cfg);

// "G1=500 G2=500 C1=500 C2=500 s=50".
std::string Describe(const SyntheticConfig& cfg);

// Deterministic in `cfg` (including the seed). Category exhaustion events are
// reported on the run log.
Dataset Generate(const SyntheticConfig& cfg);

// Text dataset format:
//   data file:     "n_users n_items", then "user_id|group_id|item item ..."
//   category file: one "item_id category_id" line per item
void WriteDataset(const Dataset& data, std::ostream& data_out,
                  std::ostream& categories_out);
Dataset ReadDataset(std::istream& data_in, std::istream& categories_in);

}  // namespace biasd

#endif  // BIASD_SYNTHGEN_H_
