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

#include "metrics.h"

#include <algorithm>
#include <string>

#include "csv.h"
#include "error.h"

namespace biasd {

InteractionMatrix::InteractionMatrix(size_t n_users, size_t n_items)
    : n_items_(n_items), rows_(n_users) {}

InteractionMatrix InteractionMatrix::FromRows(
    size_t n_items, std::vector<std::vector<ItemId>> rows) {
  for (size_t u = 0; u < rows.size(); ++u) {
    auto& row = rows[u];
    std::sort(row.begin(), row.end());
    if (!row.empty() && row.back() >= n_items) {
      throw Error(ErrorCode::kInvalidArgument,
                  "user " + std::to_string(u) + " selects item " +
                      std::to_string(row.back()) + " outside [0, " +
                      std::to_string(n_items) + ")");
    }
    if (std::adjacent_find(row.begin(), row.end()) != row.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate item in row of user " + std::to_string(u));
    }
  }
  InteractionMatrix m;
  m.n_items_ = n_items;
  m.rows_ = std::move(rows);
  return m;
}

bool InteractionMatrix::Contains(UserId u, ItemId i) const {
  const auto& row = rows_[u];
  return std::binary_search(row.begin(), row.end(), i);
}

bool InteractionMatrix::Add(UserId u, ItemId i) {
  if (i >= n_items_) {
    throw Error(ErrorCode::kInvalidArgument,
                "item " + std::to_string(i) + " out of range");
  }
  auto& row = rows_[u];
  auto it = std::lower_bound(row.begin(), row.end(), i);
  if (it != row.end() && *it == i) return false;
  row.insert(it, i);
  return true;
}

int64_t InteractionMatrix::NumSelections() const {
  int64_t total = 0;
  for (const auto& row : rows_) total += static_cast<int64_t>(row.size());
  return total;
}

namespace {

std::vector<int64_t> DenseSizes(const std::vector<uint32_t>& ids,
                                const char* what) {
  if (ids.empty()) return {};
  const uint32_t max_id = *std::max_element(ids.begin(), ids.end());
  std::vector<int64_t> sizes(static_cast<size_t>(max_id) + 1, 0);
  for (uint32_t id : ids) ++sizes[id];
  for (size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] == 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(what) + " " + std::to_string(k) + " is empty");
    }
  }
  return sizes;
}

}  // namespace

Labeling::Labeling(std::vector<GroupId> user_group,
                   std::vector<CategoryId> item_category)
    : user_group_(std::move(user_group)),
      item_category_(std::move(item_category)) {
  group_sizes_ = DenseSizes(user_group_, "group");
  category_sizes_ = DenseSizes(item_category_, "category");
}

int64_t GroupCategoryCounts::GroupTotal(GroupId g) const {
  int64_t total = 0;
  for (int64_t n : counts[g]) total += n;
  return total;
}

void CheckCompatible(const InteractionMatrix& m, const Labeling& labels) {
  if (m.n_users() != labels.n_users() || m.n_items() != labels.n_items()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "matrix is " + std::to_string(m.n_users()) + "x" +
                    std::to_string(m.n_items()) + " but labeling covers " +
                    std::to_string(labels.n_users()) + " users and " +
                    std::to_string(labels.n_items()) + " items");
  }
}

GroupCategoryCounts CountSelections(const InteractionMatrix& m,
                                    const Labeling& labels) {
  CheckCompatible(m, labels);
  GroupCategoryCounts out;
  out.counts.assign(labels.n_groups(),
                    std::vector<int64_t>(labels.n_categories(), 0));
  for (UserId u = 0; u < m.n_users(); ++u) {
    auto& row_counts = out.counts[labels.group_of(u)];
    for (ItemId i : m.row(u)) ++row_counts[labels.category_of(i)];
  }
  return out;
}

double PreferenceRatio(const GroupCategoryCounts& counts, GroupId g,
                       CategoryId c) {
  if (g >= counts.counts.size() || c >= counts.counts[g].size()) {
    throw Error(ErrorCode::kInvalidArgument, "group or category out of range");
  }
  const int64_t total = counts.GroupTotal(g);
  if (total == 0) {
    throw Error(ErrorCode::kEmptyGroupActivity,
                "group " + std::to_string(g) + " has no selections");
  }
  return static_cast<double>(counts.counts[g][c]) / static_cast<double>(total);
}

double PreferenceRatio(const InteractionMatrix& m, const Labeling& labels,
                       GroupId g, CategoryId c) {
  return PreferenceRatio(CountSelections(m, labels), g, c);
}

double CategoryPrior(const Labeling& labels, CategoryId c) {
  if (c >= labels.n_categories()) {
    throw Error(ErrorCode::kInvalidArgument, "category out of range");
  }
  return static_cast<double>(labels.category_size(c)) /
         static_cast<double>(labels.n_items());
}

double Bias(const InteractionMatrix& m, const Labeling& labels, GroupId g,
            CategoryId c) {
  return PreferenceRatio(m, labels, g, c) / CategoryPrior(labels, c);
}

double BiasDisparity(double bias_input, double bias_output) {
  if (bias_input == 0.0) {
    throw Error(ErrorCode::kZeroInputBias,
                "bias disparity is undefined for zero input bias");
  }
  return (bias_output - bias_input) / bias_input;
}

BiasReport MakeBiasReport(const InteractionMatrix& s, const InteractionMatrix& r,
                          const Labeling& labels) {
  CheckCompatible(s, labels);
  CheckCompatible(r, labels);
  const GroupCategoryCounts in = CountSelections(s, labels);
  const GroupCategoryCounts out = CountSelections(r, labels);

  BiasReport report;
  report.n_groups = labels.n_groups();
  report.n_categories = labels.n_categories();
  for (GroupId g = 0; g < report.n_groups; ++g) {
    const bool in_active = in.GroupTotal(g) > 0;
    const bool out_active = out.GroupTotal(g) > 0;
    for (CategoryId c = 0; c < report.n_categories; ++c) {
      BiasCell cell;
      cell.group = g;
      cell.category = c;
      const double prior = CategoryPrior(labels, c);
      if (in_active) {
        cell.pr_input = PreferenceRatio(in, g, c);
        cell.bias_input = *cell.pr_input / prior;
      }
      if (out_active) {
        cell.pr_output = PreferenceRatio(out, g, c);
        cell.bias_output = *cell.pr_output / prior;
      }
      if (cell.bias_input && cell.bias_output && *cell.bias_input > 0.0) {
        cell.bias_disparity = BiasDisparity(*cell.bias_input, *cell.bias_output);
      }
      report.cells.push_back(cell);
    }
  }
  return report;
}

void WriteBiasReportCsv(const BiasReport& report, std::ostream& out) {
  out << kBiasReportHeader << '\n';
  for (const BiasCell& cell : report.cells) {
    out << cell.group << ',' << cell.category << ','
        << FormatFixed(cell.pr_input) << ',' << FormatFixed(cell.pr_output)
        << ',' << FormatFixed(cell.bias_input) << ','
        << FormatFixed(cell.bias_output) << ','
        << FormatFixed(cell.bias_disparity) << '\n';
  }
}

}  // namespace biasd
