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

#include "recommender.h"

#include <algorithm>
#include <string>

#include "csv.h"
#include "error.h"
#include "log.h"
#include "parallel.h"
#include "rng.h"

namespace biasd {
namespace {

// Orders neighbors of `owner`: similarity descending, then tie key.
struct NeighborOrder {
  UserId owner;
  bool operator()(const Neighbor& a, const Neighbor& b) const {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return TieBefore(TieDomain::kUser, owner, a.user, b.user);
  }
};

struct CandidateOrder {
  UserId owner;
  bool operator()(const ScoredItem& a, const ScoredItem& b) const {
    if (a.utility != b.utility) return a.utility > b.utility;
    return TieBefore(TieDomain::kItem, owner, a.item, b.item);
  }
};

// Item -> users who selected it, users ascending.
std::vector<std::vector<UserId>> BuildColumns(const InteractionMatrix& s) {
  std::vector<std::vector<UserId>> columns(s.n_items());
  for (UserId u = 0; u < s.n_users(); ++u) {
    for (ItemId i : s.row(u)) columns[i].push_back(u);
  }
  return columns;
}

// Reusable per-thread buffers.
struct Scratch {
  std::vector<int32_t> overlap;
  std::vector<UserId> touched_users;
  std::vector<double> score;
  std::vector<ItemId> touched_items;
};

NeighborList NeighborsFromColumns(
    const InteractionMatrix& s,
    const std::vector<std::vector<UserId>>& columns, UserId u, size_t k,
    Scratch& scratch) {
  const size_t n = s.n_users();
  scratch.overlap.resize(n, 0);
  scratch.touched_users.clear();
  for (ItemId i : s.row(u)) {
    for (UserId v : columns[i]) {
      if (v == u) continue;
      if (scratch.overlap[v]++ == 0) scratch.touched_users.push_back(v);
    }
  }

  NeighborList overlapping;
  overlapping.reserve(scratch.touched_users.size());
  const int64_t own = static_cast<int64_t>(s.row(u).size());
  for (UserId v : scratch.touched_users) {
    const int64_t inter = scratch.overlap[v];
    const int64_t uni = own + static_cast<int64_t>(s.row(v).size()) - inter;
    overlapping.push_back(
        {v, static_cast<double>(inter) / static_cast<double>(uni)});
    scratch.overlap[v] = 0;
  }

  const size_t keep = std::min(k, overlapping.size());
  const NeighborOrder order{u};
  std::partial_sort(overlapping.begin(), overlapping.begin() + keep,
                    overlapping.end(), order);
  overlapping.resize(keep);

  // Fill with zero-similarity users, which tie with each other.
  if (overlapping.size() < k) {
    std::vector<char> taken(n, 0);
    taken[u] = 1;
    for (const Neighbor& nb : overlapping) taken[nb.user] = 1;
    NeighborList zeros;
    for (UserId v = 0; v < n; ++v) {
      if (!taken[v]) zeros.push_back({v, 0.0});
    }
    const size_t fill = std::min(k - overlapping.size(), zeros.size());
    std::partial_sort(zeros.begin(), zeros.begin() + fill, zeros.end(), order);
    overlapping.insert(overlapping.end(), zeros.begin(), zeros.begin() + fill);
  }
  return overlapping;
}

UserRecommendations RankCandidates(const InteractionMatrix& s, UserId u,
                                   const NeighborList& neighbors, size_t r,
                                   Scratch& scratch) {
  scratch.score.resize(s.n_items(), 0.0);
  scratch.touched_items.clear();
  double total = 0.0;
  for (const Neighbor& nb : neighbors) {
    total += nb.similarity;
    if (nb.similarity == 0.0) continue;
    for (ItemId i : s.row(nb.user)) {
      if (scratch.score[i] == 0.0) scratch.touched_items.push_back(i);
      scratch.score[i] += nb.similarity;
    }
  }

  UserRecommendations out;
  for (ItemId i : scratch.touched_items) {
    const double num = scratch.score[i];
    scratch.score[i] = 0.0;
    if (total > 0.0 && !s.Contains(u, i)) {
      out.candidates.push_back({i, num / total});
    }
  }
  std::sort(out.candidates.begin(), out.candidates.end(), CandidateOrder{u});
  const size_t take = std::min(r, out.candidates.size());
  for (uint32_t j = 0; j < take; ++j) out.picks.push_back(j);
  return out;
}

}  // namespace

uint64_t TieKey(TieDomain domain, UserId owner, uint32_t other) {
  const uint64_t salt = domain == TieDomain::kUser ? 0x75736572ULL : 0x6974656DULL;
  return SplitMix64(SplitMix64((uint64_t{owner} << 32) ^ salt) ^ other);
}

bool TieBefore(TieDomain domain, UserId owner, uint32_t a, uint32_t b) {
  const uint64_t ka = TieKey(domain, owner, a);
  const uint64_t kb = TieKey(domain, owner, b);
  if (ka != kb) return ka < kb;
  return a < b;
}

RecommendationSet::RecommendationSet(size_t n_items, size_t r,
                                     std::vector<UserRecommendations> users,
                                     bool full_candidates)
    : n_items_(n_items),
      r_(r),
      full_candidates_(full_candidates),
      users_(std::move(users)) {}

std::vector<ScoredItem> RecommendationSet::Recommended(UserId u) const {
  const auto& rec = users_[u];
  std::vector<ScoredItem> out;
  out.reserve(rec.picks.size());
  for (uint32_t j : rec.picks) out.push_back(rec.candidates[j]);
  return out;
}

double JaccardSimilarity(std::span<const ItemId> a, std::span<const ItemId> b) {
  size_t inter = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++inter;
      ++ia;
      ++ib;
    }
  }
  const size_t uni = a.size() + b.size() - inter;
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

NeighborList TopKNeighbors(const InteractionMatrix& s, UserId u, size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "K must be >= 1");
  const auto columns = BuildColumns(s);
  Scratch scratch;
  return NeighborsFromColumns(s, columns, u, k, scratch);
}

std::vector<NeighborList> AllTopKNeighbors(const InteractionMatrix& s, size_t k,
                                           size_t threads) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "K must be >= 1");
  const auto columns = BuildColumns(s);
  std::vector<NeighborList> out(s.n_users());
  ParallelChunks(s.n_users(), ResolveThreads(threads),
                 [&](size_t begin, size_t end, size_t) {
                   Scratch scratch;
                   for (size_t u = begin; u < end; ++u) {
                     out[u] = NeighborsFromColumns(
                         s, columns, static_cast<UserId>(u), k, scratch);
                   }
                 });
  return out;
}

double Utility(const InteractionMatrix& s, UserId u, ItemId i,
               const NeighborList& neighbors) {
  if (s.Contains(u, i)) {
    throw Error(ErrorCode::kAlreadySelected,
                "user " + std::to_string(u) + " already selected item " +
                    std::to_string(i));
  }
  double num = 0.0;
  double den = 0.0;
  for (const Neighbor& nb : neighbors) {
    den += nb.similarity;
    if (s.Contains(nb.user, i)) num += nb.similarity;
  }
  return den > 0.0 ? num / den : 0.0;
}

RecommendationSet Recommend(const InteractionMatrix& s,
                            const RecommendOptions& options) {
  if (options.k == 0 || options.r == 0) {
    throw Error(ErrorCode::kInvalidArgument, "K and r must be >= 1");
  }
  const auto columns = BuildColumns(s);
  std::vector<UserRecommendations> users(s.n_users());
  ParallelChunks(s.n_users(), ResolveThreads(options.threads),
                 [&](size_t begin, size_t end, size_t) {
                   Scratch scratch;
                   for (size_t u = begin; u < end; ++u) {
                     const auto uid = static_cast<UserId>(u);
                     const NeighborList nbs = NeighborsFromColumns(
                         s, columns, uid, options.k, scratch);
                     users[u] = RankCandidates(s, uid, nbs, options.r, scratch);
                   }
                 });

  std::string short_users;
  size_t n_short = 0;
  for (UserId u = 0; u < users.size(); ++u) {
    if (users[u].candidates.size() < options.r) {
      ++n_short;
      short_users += ' ' + std::to_string(u);
    }
  }
  if (n_short > 0) {
    LogLine("recommend: " + std::to_string(n_short) +
            " user(s) with fewer than r=" + std::to_string(options.r) +
            " candidates:" + short_users);
  }
  return RecommendationSet(s.n_items(), options.r, std::move(users), true);
}

InteractionMatrix ToInteractionMatrix(const RecommendationSet& recs) {
  std::vector<std::vector<ItemId>> rows(recs.n_users());
  for (UserId u = 0; u < recs.n_users(); ++u) {
    for (const ScoredItem& it : recs.Recommended(u)) rows[u].push_back(it.item);
  }
  return InteractionMatrix::FromRows(recs.n_items(), std::move(rows));
}

GroupCategoryCounts CountCandidates(const RecommendationSet& recs,
                                    const Labeling& labels) {
  if (recs.n_users() != labels.n_users() || recs.n_items() != labels.n_items()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "recommendations and labeling disagree on dimensions");
  }
  GroupCategoryCounts out;
  out.counts.assign(labels.n_groups(),
                    std::vector<int64_t>(labels.n_categories(), 0));
  for (UserId u = 0; u < recs.n_users(); ++u) {
    auto& row = out.counts[labels.group_of(u)];
    for (const ScoredItem& it : recs.user(u).candidates) {
      ++row[labels.category_of(it.item)];
    }
  }
  return out;
}

double CandidatePreferenceRatio(const InteractionMatrix& s, size_t k,
                                const Labeling& labels, GroupId g,
                                CategoryId c) {
  CheckCompatible(s, labels);
  const RecommendationSet recs = Recommend(s, {.k = k, .r = 1});
  return PreferenceRatio(CountCandidates(recs, labels), g, c);
}

void WriteRecommendationsCsv(const RecommendationSet& recs, std::ostream& out) {
  out << kRecommendationHeader << '\n';
  for (UserId u = 0; u < recs.n_users(); ++u) {
    size_t rank = 1;
    for (const ScoredItem& it : recs.Recommended(u)) {
      out << u << ',' << rank++ << ',' << it.item << ','
          << FormatFixed(it.utility) << '\n';
    }
  }
}

RecommendationSet ReadRecommendationsCsv(std::istream& in, size_t n_users,
                                         size_t n_items) {
  std::vector<UserRecommendations> users(n_users);
  std::string line;
  size_t line_no = 0;
  size_t max_rank = 0;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kParse, "recommendations line " +
                                       std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != kRecommendationHeader) fail("unexpected header");
      continue;
    }
    if (line.empty()) continue;
    const auto f = Split(line, ',');
    if (f.size() != 4) fail("expected 4 fields");
    const auto u = ParseUint(f[0]);
    const auto rank = ParseUint(f[1]);
    const auto item = ParseUint(f[2]);
    const auto utility = ParseDouble(f[3]);
    if (!u || !rank || !item || !utility) fail("malformed field");
    if (*u >= n_users || *item >= n_items) fail("id out of range");
    auto& rec = users[*u];
    if (*rank != rec.candidates.size() + 1) fail("ranks must be consecutive");
    rec.picks.push_back(static_cast<uint32_t>(rec.candidates.size()));
    rec.candidates.push_back({static_cast<ItemId>(*item), *utility});
    max_rank = std::max<size_t>(max_rank, *rank);
  }
  if (line_no == 0) fail("missing header");
  return RecommendationSet(n_items, max_rank, std::move(users), false);
}

}  // namespace biasd
