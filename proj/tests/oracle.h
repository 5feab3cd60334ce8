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

// Slow, direct reference implementations used to check the library.

#ifndef BIASD_TESTS_ORACLE_H_
#define BIASD_TESTS_ORACLE_H_

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "gulm.h"
#include "metrics.h"
#include "recommender.h"

namespace oracle {

using Dense = std::vector<std::vector<int>>;  // [user][item] in {0,1}

inline Dense ToDense(const biasd::InteractionMatrix& s) {
  Dense d(s.n_users(), std::vector<int>(s.n_items(), 0));
  for (uint32_t u = 0; u < s.n_users(); ++u) {
    for (uint32_t i : s.row(u)) d[u][i] = 1;
  }
  return d;
}

inline double Jaccard(const Dense& d, size_t u, size_t v) {
  int inter = 0, uni = 0;
  for (size_t i = 0; i < d[u].size(); ++i) {
    inter += d[u][i] & d[v][i];
    uni += d[u][i] | d[v][i];
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

// Keys used for tie-breaking, recomputed from scratch.
inline uint64_t Mix(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}
inline uint64_t UserKey(uint32_t owner, uint32_t v) {
  return Mix(Mix((uint64_t{owner} << 32) ^ 0x75736572ULL) ^ v);
}
inline uint64_t ItemKey(uint32_t owner, uint32_t i) {
  return Mix(Mix((uint64_t{owner} << 32) ^ 0x6974656DULL) ^ i);
}

struct Rec {
  std::vector<std::pair<uint32_t, double>> neighbors;
  std::vector<std::pair<uint32_t, double>> candidates;  // ranked
  std::vector<std::pair<uint32_t, double>> top;         // first r
};

// All-pairs evaluation of top-K Jaccard neighbors and utilities.
inline std::vector<Rec> Recommend(const Dense& d, size_t k, size_t r) {
  const size_t n = d.size();
  const size_t m = n == 0 ? 0 : d[0].size();
  std::vector<Rec> out(n);
  for (uint32_t u = 0; u < n; ++u) {
    std::vector<std::pair<uint32_t, double>> all;
    for (uint32_t v = 0; v < n; ++v) {
      if (v != u) all.push_back({v, Jaccard(d, u, v)});
    }
    std::sort(all.begin(), all.end(), [&](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      const uint64_t ka = UserKey(u, a.first), kb = UserKey(u, b.first);
      if (ka != kb) return ka < kb;
      return a.first < b.first;
    });
    all.resize(std::min(k, all.size()));
    out[u].neighbors = all;

    double den = 0.0;
    for (const auto& [v, sim] : all) den += sim;
    for (uint32_t i = 0; i < m; ++i) {
      if (d[u][i]) continue;
      double num = 0.0;
      for (const auto& [v, sim] : all) {
        if (d[v][i]) num += sim;
      }
      const double util = den > 0.0 ? num / den : 0.0;
      if (util > 0.0) out[u].candidates.push_back({i, util});
    }
    std::sort(out[u].candidates.begin(), out[u].candidates.end(),
              [&](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                const uint64_t ka = ItemKey(u, a.first), kb = ItemKey(u, b.first);
                if (ka != kb) return ka < kb;
                return a.first < b.first;
              });
    out[u].top.assign(out[u].candidates.begin(),
                      out[u].candidates.begin() +
                          std::min(r, out[u].candidates.size()));
  }
  return out;
}

// Minimum total utility loss of exchanging exactly `t` recommended items of
// category `shed` for unrecommended candidates of other categories among
// `users`, trying every subset. Empty if infeasible.
inline std::optional<double> MinSwapLoss(const biasd::RecommendationSet& recs,
                                         const biasd::Labeling& labels,
                                         const std::vector<uint32_t>& users,
                                         uint32_t shed, int64_t t) {
  struct Slot {
    size_t owner;
    double utility;
  };
  std::vector<Slot> drops, adds;
  for (size_t o = 0; o < users.size(); ++o) {
    const auto& ur = recs.user(users[o]);
    std::vector<bool> picked(ur.candidates.size(), false);
    for (uint32_t j : ur.picks) picked[j] = true;
    for (size_t j = 0; j < ur.candidates.size(); ++j) {
      const bool is_shed = labels.category_of(ur.candidates[j].item) == shed;
      if (picked[j] && is_shed) drops.push_back({o, ur.candidates[j].utility});
      if (!picked[j] && !is_shed) adds.push_back({o, ur.candidates[j].utility});
    }
  }
  if (drops.size() > 16 || adds.size() > 16) return std::nullopt;
  std::optional<double> best;
  for (uint32_t dm = 0; dm < (1u << drops.size()); ++dm) {
    if (std::popcount(dm) != t) continue;
    std::vector<int> per(users.size(), 0);
    double loss = 0.0;
    for (size_t b = 0; b < drops.size(); ++b) {
      if (dm >> b & 1) {
        ++per[drops[b].owner];
        loss += drops[b].utility;
      }
    }
    for (uint32_t am = 0; am < (1u << adds.size()); ++am) {
      if (std::popcount(am) != t) continue;
      std::vector<int> got(users.size(), 0);
      double gain = 0.0;
      for (size_t b = 0; b < adds.size(); ++b) {
        if (am >> b & 1) {
          ++got[adds[b].owner];
          gain += adds[b].utility;
        }
      }
      if (got != per) continue;
      if (!best || loss - gain < *best) best = loss - gain;
    }
  }
  return best;
}

inline biasd::InteractionMatrix RandomMatrix(std::mt19937_64& gen, size_t n,
                                             size_t m, double density) {
  std::bernoulli_distribution coin(density);
  std::vector<std::vector<uint32_t>> rows(n);
  for (size_t u = 0; u < n; ++u) {
    for (uint32_t i = 0; i < m; ++i) {
      if (coin(gen)) rows[u].push_back(i);
    }
  }
  return biasd::InteractionMatrix::FromRows(m, std::move(rows));
}

// Labels with every group and category nonempty.
inline biasd::Labeling RandomLabels(std::mt19937_64& gen, size_t n, size_t m,
                                    size_t groups, size_t categories) {
  std::vector<uint32_t> ug(n), ic(m);
  for (size_t u = 0; u < n; ++u) ug[u] = u < groups ? u : gen() % groups;
  for (size_t i = 0; i < m; ++i) ic[i] = i < categories ? i : gen() % categories;
  std::shuffle(ug.begin(), ug.end(), gen);
  std::shuffle(ic.begin(), ic.end(), gen);
  return biasd::Labeling(ug, ic);
}

}  // namespace oracle

#endif  // BIASD_TESTS_ORACLE_H_
