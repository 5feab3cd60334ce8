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

// Interaction data model and the group/category bias measures computed on it.

#ifndef BIASD_METRICS_H_
#define BIASD_METRICS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace biasd {

using UserId = uint32_t;
using ItemId = uint32_t;
using GroupId = uint32_t;
using CategoryId = uint32_t;

// Binary user x item selection matrix stored as sorted sparse rows.
class InteractionMatrix {
 public:
  InteractionMatrix() = default;
  InteractionMatrix(size_t n_users, size_t n_items);

  // Rows may be unsorted; they are sorted on entry. Throws kInvalidArgument on
  // out-of-range or duplicate items.
  static InteractionMatrix FromRows(size_t n_items,
                                    std::vector<std::vector<ItemId>> rows);

  size_t n_users() const { return rows_.size(); }
  size_t n_items() const { return n_items_; }

  std::span<const ItemId> row(UserId u) const { return rows_[u]; }
  bool Contains(UserId u, ItemId i) const;

  // Inserts (u, i); returns false if it was already selected.
  bool Add(UserId u, ItemId i);

  int64_t NumSelections() const;

  bool operator==(const InteractionMatrix&) const = default;

 private:
  size_t n_items_ = 0;
  std::vector<std::vector<ItemId>> rows_;
};

// User-to-group and item-to-category partitions.
class Labeling {
 public:
  Labeling() = default;
  // Group and category ids must be dense: every id below the maximum is used.
  Labeling(std::vector<GroupId> user_group, std::vector<CategoryId> item_category);

  size_t n_users() const { return user_group_.size(); }
  size_t n_items() const { return item_category_.size(); }
  size_t n_groups() const { return group_sizes_.size(); }
  size_t n_categories() const { return category_sizes_.size(); }

  GroupId group_of(UserId u) const { return user_group_[u]; }
  CategoryId category_of(ItemId i) const { return item_category_[i]; }
  int64_t group_size(GroupId g) const { return group_sizes_[g]; }
  int64_t category_size(CategoryId c) const { return category_sizes_[c]; }

  const std::vector<GroupId>& user_groups() const { return user_group_; }
  const std::vector<CategoryId>& item_categories() const { return item_category_; }

  bool operator==(const Labeling&) const = default;

 private:
  std::vector<GroupId> user_group_;
  std::vector<CategoryId> item_category_;
  std::vector<int64_t> group_sizes_;
  std::vector<int64_t> category_sizes_;
};

// counts[g][c] = number of selections by users of group g on items of
// category c.
struct GroupCategoryCounts {
  std::vector<std::vector<int64_t>> counts;

  int64_t GroupTotal(GroupId g) const;
};

GroupCategoryCounts CountSelections(const InteractionMatrix& m,
                                    const Labeling& labels);

// Throws kDimensionMismatch unless matrix and labeling agree on sizes.
void CheckCompatible(const InteractionMatrix& m, const Labeling& labels);

// Fraction of group `g`'s selections that fall in category `c`. Throws
// kEmptyGroupActivity when the group has no selections.
double PreferenceRatio(const InteractionMatrix& m, const Labeling& labels,
                       GroupId g, CategoryId c);
double PreferenceRatio(const GroupCategoryCounts& counts, GroupId g,
                       CategoryId c);

// |C| / m.
double CategoryPrior(const Labeling& labels, CategoryId c);

double Bias(const InteractionMatrix& m, const Labeling& labels, GroupId g,
            CategoryId c);

// Relative change from input to output bias. Throws kZeroInputBias when
// `bias_input` is zero.
double BiasDisparity(double bias_input, double bias_output);

struct BiasCell {
  GroupId group = 0;
  CategoryId category = 0;
  // Empty when the group has no selections in the respective matrix.
  std::optional<double> pr_input;
  std::optional<double> pr_output;
  std::optional<double> bias_input;
  std::optional<double> bias_output;
  // Empty when either bias is undefined or the input bias is zero.
  std::optional<double> bias_disparity;
};

struct BiasReport {
  size_t n_groups = 0;
  size_t n_categories = 0;
  std::vector<BiasCell> cells;  // row-major over (group, category)

  const BiasCell& at(GroupId g, CategoryId c) const {
    return cells[g * n_categories + c];
  }
};

// Compares input selections `s` against recommendations `r`.
BiasReport MakeBiasReport(const InteractionMatrix& s, const InteractionMatrix& r,
                          const Labeling& labels);

inline constexpr const char* kBiasReportHeader =
    "group,category,pr_in,pr_out,bias_in,bias_out,bias_disparity";

// Writes the report as CSV (header plus one row per cell, `NA` for undefined
// values, fixed 6-decimal formatting).
void WriteBiasReportCsv(const BiasReport& report, std::ostream& out);

}  // namespace biasd

#endif  // BIASD_METRICS_H_
