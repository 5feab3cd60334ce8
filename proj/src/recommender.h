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

// User-based K-nearest-neighbor recommender over implicit feedback.
//
// Similarity between users is the Jaccard index of their selection sets. The
// utility of an unselected item for user u is the similarity-weighted fraction
// of u's K nearest neighbors that selected it.
//
// Equal similarities (and equal utilities) are common because Jaccard values
// of small sets are coarse. Ties are ordered by a fixed pseudo-random key per
// (user, other) pair rather than by index, because index order correlates
// with group and category membership in block-labeled data and would favor
// the low-index blocks. The order is a pure function of the ids, so results
// do not depend on thread scheduling.

#ifndef BIASD_RECOMMENDER_H_
#define BIASD_RECOMMENDER_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "metrics.h"

namespace biasd {

enum class TieDomain { kUser, kItem };

// Tie-break key of `other` (a user or an item) from the point of view of
// `owner`. Lower keys rank first; equal keys fall back to ascending id.
uint64_t TieKey(TieDomain domain, UserId owner, uint32_t other);
bool TieBefore(TieDomain domain, UserId owner, uint32_t a, uint32_t b);

struct Neighbor {
  UserId user;
  double similarity;
};

// Sorted by similarity descending, then by TieKey.
using NeighborList = std::vector<Neighbor>;

struct ScoredItem {
  ItemId item;
  double utility;

  bool operator==(const ScoredItem&) const = default;
};

struct UserRecommendations {
  // All items with positive utility, by utility descending then TieKey. For sets loaded from CSV this holds only the recommended items.
  std::vector<ScoredItem> candidates;
  // Ascending indices into `candidates` of the recommended items.
  std::vector<uint32_t> picks;

  bool operator==(const UserRecommendations&) const = default;
};

class RecommendationSet {
 public:
  RecommendationSet() = default;
  RecommendationSet(size_t n_items, size_t r,
                    std::vector<UserRecommendations> users,
                    bool full_candidates);

  size_t n_users() const { return users_.size(); }
  size_t n_items() const { return n_items_; }
  size_t r() const { return r_; }
  // False when only the recommended items are known (e.g. loaded from CSV).
  bool has_full_candidates() const { return full_candidates_; }

  const UserRecommendations& user(UserId u) const { return users_[u]; }
  UserRecommendations& mutable_user(UserId u) { return users_[u]; }

  // Recommended items of `u` in rank order.
  std::vector<ScoredItem> Recommended(UserId u) const;

  bool operator==(const RecommendationSet&) const = default;

 private:
  size_t n_items_ = 0;
  size_t r_ = 0;
  bool full_candidates_ = false;
  std::vector<UserRecommendations> users_;
};

// |a ∩ b| / |a ∪ b| over sorted item sets; 0 when both are empty.
double JaccardSimilarity(std::span<const ItemId> a, std::span<const ItemId> b);

// The K most similar users to `u` (excluding `u`). Zero-similarity users fill
// the list when fewer than K users overlap with `u`.
NeighborList TopKNeighbors(const InteractionMatrix& s, UserId u, size_t k);

// Neighbor lists for every user.
std::vector<NeighborList> AllTopKNeighbors(const InteractionMatrix& s, size_t k,
                                           size_t threads = 1);

// Utility of item `i` for user `u` given u's neighbors. Zero when the neighbor
// similarities sum to zero. Throws kAlreadySelected if u selected i.
double Utility(const InteractionMatrix& s, UserId u, ItemId i,
               const NeighborList& neighbors);

struct RecommendOptions {
  size_t k = 50;
  size_t r = 10;
  size_t threads = 1;  // 0 = hardware concurrency
};

// Top-r recommendations with full candidate rankings for every user. Users
// with fewer than r candidates are listed on the run log.
RecommendationSet Recommend(const InteractionMatrix& s,
                            const RecommendOptions& options);

// Binary matrix of the recommended items.
InteractionMatrix ToInteractionMatrix(const RecommendationSet& recs);

// Selection counts over every (user, candidate) pair, each counted once.
GroupCategoryCounts CountCandidates(const RecommendationSet& recs,
                                    const Labeling& labels);

double CandidatePreferenceRatio(const InteractionMatrix& s, size_t k,
                                const Labeling& labels, GroupId g,
                                CategoryId c);

inline constexpr const char* kRecommendationHeader = "user,rank,item,utility";

// CSV with one row per recommended item, rank 1-based.
void WriteRecommendationsCsv(const RecommendationSet& recs, std::ostream& out);

// Loads recommended items only; the result has no full candidate rankings.
RecommendationSet ReadRecommendationsCsv(std::istream& in, size_t n_users,
                                         size_t n_items);

}  // namespace biasd

#endif  // BIASD_RECOMMENDER_H_
