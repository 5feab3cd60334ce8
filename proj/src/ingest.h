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

// MovieLens-1M ingestion: parsers for the `::`-delimited ratings, movies and
// users files, and construction of a two-genre, two-gender dataset.

#ifndef BIASD_INGEST_H_
#define BIASD_INGEST_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "synthgen.h"

namespace biasd {

struct RawRating {
  int64_t user_id = 0;
  int64_t movie_id = 0;
  int rating = 0;
  int64_t timestamp = 0;

  bool operator==(const RawRating&) const = default;
};

struct MovieRecord {
  int64_t movie_id = 0;
  std::string title;  // UTF-8
  std::vector<std::string> genres;
};

enum class Gender { kMale, kFemale };

struct UserRecord {
  int64_t user_id = 0;
  Gender gender = Gender::kMale;
};

// Each parser fails fast with kParse, naming the 1-based line number.
std::vector<RawRating> ParseRatings(std::istream& in);
std::vector<MovieRecord> ParseMovies(std::istream& in);
std::vector<UserRecord> ParseUsers(std::istream& in);

// ISO-8859-1 to UTF-8.
std::string Latin1ToUtf8(std::string_view text);

struct BuildOptions {
  std::string genre_a = "Action";   // category 0
  std::string genre_b = "Romance";  // category 1
  size_t min_ratings = 90;
  int min_rating_value = 1;  // ratings below this are not selections
};

struct MovieLensDataset {
  Dataset data;  // group 0 = M, group 1 = F
  std::vector<int64_t> user_ids;  // internal -> external
  std::vector<int64_t> item_ids;
  size_t genre_a_items = 0;
  size_t genre_b_items = 0;
  size_t dual_genre_excluded = 0;
};

// Items are the movies tagged with exactly one of the two genres; users are
// kept when they have at least `min_ratings` selections on those items (and
// at least one). Ids are re-indexed in ascending external order.
MovieLensDataset BuildDataset(const std::vector<RawRating>& ratings,
                              const std::vector<MovieRecord>& movies,
                              const std::vector<UserRecord>& users,
                              const BuildOptions& options);

// Uniformly samples `target` users of `group` without replacement and keeps
// every other user. `target` defaults to the smallest other group's size.
// Throws kInsufficientGroup if the group is smaller than the target.
MovieLensDataset BalanceGroups(const MovieLensDataset& dataset, uint64_t seed,
                               GroupId group = 0, int64_t target = -1);

inline constexpr const char* kIdMapHeader = "internal_id,external_id,kind";

void WriteIdMapCsv(const MovieLensDataset& dataset, std::ostream& out);

// Lowercase hex SHA-256 of a file's bytes. Throws kIo if unreadable.
std::string FileSha256(const std::string& path);

}  // namespace biasd

#endif  // BIASD_INGEST_H_
