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

#include "ingest.h"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>

#include "csv.h"
#include "error.h"
#include "log.h"
#include "rng.h"

namespace biasd {
namespace {

// Calls fn(fields, line_no) for each non-empty line split on "::".
template <typename Fn>
void ForEachRecord(std::istream& in, const char* what, size_t expected_fields,
                   Fn&& fn) {
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = Split(line, "::");
    if (fields.size() != expected_fields) {
      throw Error(ErrorCode::kParse,
                  std::string(what) + " line " + std::to_string(line_no) +
                      ": expected " + std::to_string(expected_fields) +
                      " '::'-separated fields");
    }
    fn(fields, line_no);
  }
}

[[noreturn]] void Malformed(const char* what, size_t line_no,
                            const std::string& why) {
  throw Error(ErrorCode::kParse, std::string(what) + " line " +
                                     std::to_string(line_no) + ": " + why);
}

int64_t PositiveId(std::string_view field, const char* what, size_t line_no) {
  const auto id = ParseInt(field);
  if (!id || *id <= 0) Malformed(what, line_no, "bad id '" + std::string(field) + "'");
  return *id;
}

}  // namespace

std::vector<RawRating> ParseRatings(std::istream& in) {
  std::vector<RawRating> out;
  ForEachRecord(in, "ratings", 4, [&](const auto& f, size_t line_no) {
    RawRating r;
    r.user_id = PositiveId(f[0], "ratings", line_no);
    r.movie_id = PositiveId(f[1], "ratings", line_no);
    const auto rating = ParseInt(f[2]);
    const auto ts = ParseInt(f[3]);
    if (!rating || *rating < 1 || *rating > 5) {
      Malformed("ratings", line_no, "rating must be 1..5");
    }
    if (!ts) Malformed("ratings", line_no, "bad timestamp");
    r.rating = static_cast<int>(*rating);
    r.timestamp = *ts;
    out.push_back(r);
  });
  return out;
}

std::vector<MovieRecord> ParseMovies(std::istream& in) {
  std::vector<MovieRecord> out;
  ForEachRecord(in, "movies", 3, [&](const auto& f, size_t line_no) {
    MovieRecord m;
    m.movie_id = PositiveId(f[0], "movies", line_no);
    m.title = Latin1ToUtf8(f[1]);
    for (auto g : Split(f[2], '|')) {
      if (g.empty()) Malformed("movies", line_no, "empty genre");
      m.genres.emplace_back(g);
    }
    out.push_back(std::move(m));
  });
  return out;
}

std::vector<UserRecord> ParseUsers(std::istream& in) {
  std::vector<UserRecord> out;
  ForEachRecord(in, "users", 5, [&](const auto& f, size_t line_no) {
    UserRecord u;
    u.user_id = PositiveId(f[0], "users", line_no);
    if (f[1] == "M") {
      u.gender = Gender::kMale;
    } else if (f[1] == "F") {
      u.gender = Gender::kFemale;
    } else {
      Malformed("users", line_no, "unknown gender '" + std::string(f[1]) + "'");
    }
    out.push_back(u);
  });
  return out;
}

std::string Latin1ToUtf8(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    const auto b = static_cast<unsigned char>(ch);
    if (b < 0x80) {
      out.push_back(ch);
    } else {
      out.push_back(static_cast<char>(0xC0 | (b >> 6)));
      out.push_back(static_cast<char>(0x80 | (b & 0x3F)));
    }
  }
  return out;
}

MovieLensDataset BuildDataset(const std::vector<RawRating>& ratings,
                              const std::vector<MovieRecord>& movies,
                              const std::vector<UserRecord>& users,
                              const BuildOptions& options) {
  MovieLensDataset out;

  // movie id -> category, in ascending id order.
  std::map<int64_t, CategoryId> movie_category;
  for (const MovieRecord& m : movies) {
    const bool a = std::find(m.genres.begin(), m.genres.end(), options.genre_a) !=
                   m.genres.end();
    const bool b = std::find(m.genres.begin(), m.genres.end(), options.genre_b) !=
                   m.genres.end();
    if (a && b) {
      ++out.dual_genre_excluded;
    } else if (a) {
      movie_category[m.movie_id] = 0;
      ++out.genre_a_items;
    } else if (b) {
      movie_category[m.movie_id] = 1;
      ++out.genre_b_items;
    }
  }
  std::unordered_map<int64_t, ItemId> item_index;
  std::vector<CategoryId> item_category;
  for (const auto& [id, c] : movie_category) {
    item_index[id] = static_cast<ItemId>(out.item_ids.size());
    out.item_ids.push_back(id);
    item_category.push_back(c);
  }

  std::map<int64_t, Gender> gender;
  for (const UserRecord& u : users) gender[u.user_id] = u.gender;

  std::map<int64_t, std::vector<ItemId>> selections;
  for (const RawRating& r : ratings) {
    auto& row = selections[r.user_id];  // every rater gets an entry
    if (r.rating < options.min_rating_value) continue;
    auto it = item_index.find(r.movie_id);
    if (it != item_index.end()) row.push_back(it->second);
  }

  std::vector<std::vector<ItemId>> rows;
  std::vector<GroupId> groups;
  size_t per_group[2] = {0, 0};
  for (auto& [uid, row] : selections) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    if (row.size() < options.min_ratings) continue;
    auto g = gender.find(uid);
    if (g == gender.end()) {
      throw Error(ErrorCode::kParse,
                  "user " + std::to_string(uid) + " has ratings but no profile");
    }
    const GroupId group = g->second == Gender::kMale ? 0 : 1;
    ++per_group[group];
    out.user_ids.push_back(uid);
    groups.push_back(group);
    rows.push_back(std::move(row));
  }

  LogLine("ingest: " + options.genre_a + "=" + std::to_string(out.genre_a_items) +
          " " + options.genre_b + "=" + std::to_string(out.genre_b_items) +
          " items (" + std::to_string(out.dual_genre_excluded) +
          " dual-genre excluded; reference counts 468/463), users M=" +
          std::to_string(per_group[0]) + " F=" + std::to_string(per_group[1]));

  const size_t n_items = out.item_ids.size();
  out.data.matrix = InteractionMatrix::FromRows(n_items, std::move(rows));
  out.data.labels = Labeling(std::move(groups), std::move(item_category));
  return out;
}

MovieLensDataset BalanceGroups(const MovieLensDataset& dataset, uint64_t seed,
                               GroupId group, int64_t target) {
  const Labeling& labels = dataset.data.labels;
  if (group >= labels.n_groups()) {
    throw Error(ErrorCode::kInvalidArgument, "group out of range");
  }
  if (target < 0) {
    target = INT64_MAX;
    for (GroupId g = 0; g < labels.n_groups(); ++g) {
      if (g != group) target = std::min(target, labels.group_size(g));
    }
    if (target == INT64_MAX) {
      throw Error(ErrorCode::kInvalidArgument, "need at least two groups");
    }
  }
  if (labels.group_size(group) < target) {
    throw Error(ErrorCode::kInsufficientGroup,
                "group " + std::to_string(group) + " has " +
                    std::to_string(labels.group_size(group)) +
                    " users, need " + std::to_string(target));
  }

  std::vector<UserId> members;
  for (UserId u = 0; u < labels.n_users(); ++u) {
    if (labels.group_of(u) == group) members.push_back(u);
  }
  // Partial Fisher-Yates over the group's members.
  Rng rng(seed);
  for (size_t j = 0; j < static_cast<size_t>(target); ++j) {
    const size_t pick = j + rng.Below(members.size() - j);
    std::swap(members[j], members[pick]);
  }
  std::vector<char> keep(labels.n_users(), 1);
  for (UserId u : members) keep[u] = 0;
  for (size_t j = 0; j < static_cast<size_t>(target); ++j) keep[members[j]] = 1;

  MovieLensDataset out;
  out.item_ids = dataset.item_ids;
  out.genre_a_items = dataset.genre_a_items;
  out.genre_b_items = dataset.genre_b_items;
  out.dual_genre_excluded = dataset.dual_genre_excluded;
  std::vector<std::vector<ItemId>> rows;
  std::vector<GroupId> groups;
  for (UserId u = 0; u < labels.n_users(); ++u) {
    if (!keep[u]) continue;
    const auto row = dataset.data.matrix.row(u);
    rows.emplace_back(row.begin(), row.end());
    groups.push_back(labels.group_of(u));
    // Datasets without external ids keep the original internal index.
    out.user_ids.push_back(dataset.user_ids.empty() ? static_cast<int64_t>(u)
                                                    : dataset.user_ids[u]);
  }
  out.data.matrix =
      InteractionMatrix::FromRows(dataset.data.matrix.n_items(), std::move(rows));
  out.data.labels = Labeling(std::move(groups), labels.item_categories());
  return out;
}

void WriteIdMapCsv(const MovieLensDataset& dataset, std::ostream& out) {
  out << kIdMapHeader << '\n';
  for (size_t u = 0; u < dataset.user_ids.size(); ++u) {
    out << u << ',' << dataset.user_ids[u] << ",user\n";
  }
  for (size_t i = 0; i < dataset.item_ids.size(); ++i) {
    out << i << ',' << dataset.item_ids[i] << ",item\n";
  }
}

std::string FileSha256(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                               EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kInternal, "sha256 init failed");
  }
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf, static_cast<size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int k = 0; k < len; ++k) {
    hex.push_back(kHex[digest[k] >> 4]);
    hex.push_back(kHex[digest[k] & 0xF]);
  }
  return hex;
}

}  // namespace biasd
