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

#include "synthgen.h"

#include <cmath>
#include <string>
#include <vector>

#include "csv.h"
#include "error.h"
#include "log.h"
#include "rng.h"

namespace biasd {
namespace {

// Grid fractions such as 0.35 are not exact in binary; the epsilon keeps
// floor(0.35 * 1000) at 350.
size_t FractionOf(double fraction, size_t n) {
  return static_cast<size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

void CheckUnit(double v, const char* name, bool open) {
  const bool ok = open ? (v > 0.0 && v < 1.0) : (v >= 0.0 && v <= 1.0);
  if (!ok || std::isnan(v)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(name) + " out of range: " + FormatFixed(v));
  }
}

void CheckDemand(double rho, size_t s, size_t favored, size_t other,
                 int group) {
  const auto own = static_cast<size_t>(std::floor(rho * s + 1e-9));
  const auto rest = static_cast<size_t>(std::floor((1.0 - rho) * s + 1e-9));
  if (own > favored || rest > other) {
    throw Error(ErrorCode::kConfigInfeasible,
                "group " + std::to_string(group) + " expects " +
                    std::to_string(own) + "/" + std::to_string(rest) +
                    " selections but categories hold " +
                    std::to_string(favored) + "/" + std::to_string(other));
  }
}

}  // namespace

SyntheticSizes ResolveSizes(const SyntheticConfig& cfg) {
  if (cfg.n_users < 2 || cfg.n_items < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "need at least 2 users and 2 items");
  }
  CheckUnit(cfg.group_fraction, "group_fraction", true);
  CheckUnit(cfg.category_fraction, "category_fraction", true);
  CheckUnit(cfg.rho1, "rho1", false);
  CheckUnit(cfg.rho2, "rho2", false);
  CheckUnit(cfg.density, "density", true);

  SyntheticSizes sz;
  sz.group1 = FractionOf(cfg.group_fraction, cfg.n_users);
  sz.group2 = cfg.n_users - sz.group1;
  sz.category1 = FractionOf(cfg.category_fraction, cfg.n_items);
  sz.category2 = cfg.n_items - sz.category1;
  if (sz.group1 == 0 || sz.group2 == 0 || sz.category1 == 0 ||
      sz.category2 == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "every group and category needs at least one member (" +
                    Describe(cfg) + ")");
  }
  sz.selections_per_user = static_cast<size_t>(
      std::llround(cfg.density * static_cast<double>(cfg.n_items)));
  if (sz.selections_per_user == 0) {
    throw Error(ErrorCode::kInvalidArgument, "density yields zero selections");
  }
  CheckDemand(cfg.rho1, sz.selections_per_user, sz.category1, sz.category2, 1);
  CheckDemand(cfg.rho2, sz.selections_per_user, sz.category2, sz.category1, 2);
  return sz;
}

std::string Describe(const SyntheticConfig& cfg) {
  const size_t g1 = FractionOf(cfg.group_fraction, cfg.n_users);
  const size_t c1 = FractionOf(cfg.category_fraction, cfg.n_items);
  const auto s = std::llround(cfg.density * static_cast<double>(cfg.n_items));
  return "G1=" + std::to_string(g1) + " G2=" + std::to_string(cfg.n_users - g1) +
         " C1=" + std::to_string(c1) + " C2=" +
         std::to_string(cfg.n_items - c1) + " s=" + std::to_string(s);
}

Dataset Generate(const SyntheticConfig& cfg) {
  const SyntheticSizes sz = ResolveSizes(cfg);
  const ItemId c1 = static_cast<ItemId>(sz.category1);
  const ItemId m = static_cast<ItemId>(cfg.n_items);

  std::vector<GroupId> user_group(cfg.n_users);
  for (size_t u = 0; u < cfg.n_users; ++u) user_group[u] = u < sz.group1 ? 0 : 1;
  std::vector<CategoryId> item_category(cfg.n_items);
  for (size_t i = 0; i < cfg.n_items; ++i) item_category[i] = i < c1 ? 0 : 1;

  Rng rng(cfg.seed);
  std::vector<std::vector<ItemId>> rows(cfg.n_users);
  std::vector<char> taken(cfg.n_items, 0);
  size_t exhaustion_events = 0;
  for (size_t u = 0; u < cfg.n_users; ++u) {
    const GroupId g = user_group[u];
    const double rho = g == 0 ? cfg.rho1 : cfg.rho2;
    // Category block bounds [begin, end) and fill counts.
    const ItemId begin[2] = {0, c1};
    const ItemId end[2] = {c1, m};
    size_t used[2] = {0, 0};
    auto& row = rows[u];
    row.reserve(sz.selections_per_user);
    for (size_t d = 0; d < sz.selections_per_user; ++d) {
      const bool favored = rng.Bernoulli(rho);
      CategoryId c = favored ? g : 1 - g;
      if (used[c] == end[c] - begin[c]) {
        c = 1 - c;
        ++exhaustion_events;
      }
      const size_t span = end[c] - begin[c];
      ItemId item;
      if (2 * used[c] < span) {
        do {
          item = begin[c] + static_cast<ItemId>(rng.Below(span));
        } while (taken[item]);
      } else {
        // Dense category: index directly into the free items.
        uint64_t k = rng.Below(span - used[c]);
        item = begin[c];
        while (true) {
          if (!taken[item] && k-- == 0) break;
          ++item;
        }
      }
      taken[item] = 1;
      ++used[c];
      row.push_back(item);
    }
    for (ItemId i : row) taken[i] = 0;
  }
  if (exhaustion_events > 0) {
    LogLine("generate: " + std::to_string(exhaustion_events) +
            " category exhaustion event(s) (" + Describe(cfg) + ")");
  }
  return {InteractionMatrix::FromRows(cfg.n_items, std::move(rows)),
          Labeling(std::move(user_group), std::move(item_category))};
}

void WriteDataset(const Dataset& data, std::ostream& data_out,
                  std::ostream& categories_out) {
  CheckCompatible(data.matrix, data.labels);
  data_out << data.matrix.n_users() << ' ' << data.matrix.n_items() << '\n';
  for (UserId u = 0; u < data.matrix.n_users(); ++u) {
    data_out << u << '|' << data.labels.group_of(u) << '|';
    bool first = true;
    for (ItemId i : data.matrix.row(u)) {
      if (!first) data_out << ' ';
      data_out << i;
      first = false;
    }
    data_out << '\n';
  }
  for (ItemId i = 0; i < data.labels.n_items(); ++i) {
    categories_out << i << ' ' << data.labels.category_of(i) << '\n';
  }
}

Dataset ReadDataset(std::istream& data_in, std::istream& categories_in) {
  std::string line;
  size_t line_no = 0;
  auto fail = [&](const char* file, const std::string& why) {
    throw Error(ErrorCode::kParse, std::string(file) + " line " +
                                       std::to_string(line_no) + ": " + why);
  };

  if (!std::getline(data_in, line)) {
    throw Error(ErrorCode::kParse, "dataset is empty");
  }
  line_no = 1;
  const auto dims = Split(Trim(line), ' ');
  if (dims.size() != 2) fail("dataset", "expected 'n_users n_items'");
  const auto n_users = ParseUint(dims[0]);
  const auto n_items = ParseUint(dims[1]);
  if (!n_users || !n_items) fail("dataset", "malformed dimensions");

  std::vector<std::vector<ItemId>> rows(*n_users);
  std::vector<GroupId> groups(*n_users);
  std::vector<char> seen(*n_users, 0);
  while (std::getline(data_in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = Split(line, '|');
    if (f.size() != 3) fail("dataset", "expected user|group|items");
    const auto u = ParseUint(f[0]);
    const auto g = ParseUint(f[1]);
    if (!u || !g || *u >= *n_users) fail("dataset", "bad user or group id");
    if (seen[*u]) fail("dataset", "duplicate user line");
    seen[*u] = 1;
    groups[*u] = static_cast<GroupId>(*g);
    if (!f[2].empty()) {
      for (auto tok : Split(f[2], ' ')) {
        const auto i = ParseUint(tok);
        if (!i || *i >= *n_items) fail("dataset", "bad item id");
        rows[*u].push_back(static_cast<ItemId>(*i));
      }
    }
  }
  for (size_t u = 0; u < *n_users; ++u) {
    if (!seen[u]) {
      throw Error(ErrorCode::kParse,
                  "dataset has no line for user " + std::to_string(u));
    }
  }

  std::vector<CategoryId> categories(*n_items);
  std::vector<char> seen_item(*n_items, 0);
  line_no = 0;
  while (std::getline(categories_in, line)) {
    ++line_no;
    const auto t = Trim(line);
    if (t.empty()) continue;
    const auto f = Split(t, ' ');
    if (f.size() != 2) fail("categories", "expected 'item_id category_id'");
    const auto i = ParseUint(f[0]);
    const auto c = ParseUint(f[1]);
    if (!i || !c || *i >= *n_items) fail("categories", "bad item or category");
    if (seen_item[*i]) fail("categories", "duplicate item line");
    seen_item[*i] = 1;
    categories[*i] = static_cast<CategoryId>(*c);
  }
  for (size_t i = 0; i < *n_items; ++i) {
    if (!seen_item[i]) {
      throw Error(ErrorCode::kParse,
                  "categories file has no line for item " + std::to_string(i));
    }
  }
  try {
    return {InteractionMatrix::FromRows(*n_items, std::move(rows)),
            Labeling(std::move(groups), std::move(categories))};
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, std::string("dataset: ") + e.what());
  }
}

}  // namespace biasd
