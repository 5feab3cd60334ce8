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

#include "validate.h"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>

#include "config.h"
#include "csv.h"
#include "error.h"
#include "log.h"

namespace biasd {
namespace {

struct CsvTable {
  std::map<std::string, size_t> columns;
  std::vector<std::vector<std::string>> rows;

  std::optional<double> Num(const std::vector<std::string>& row,
                            const std::string& col) const {
    auto it = columns.find(col);
    if (it == columns.end()) {
      throw Error(ErrorCode::kParse, "CSV lacks column '" + col + "'");
    }
    const std::string& s = row.at(it->second);
    if (s == "NA") return std::nullopt;
    return ParseDouble(s);
  }
};

CsvTable LoadCsv(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kIo, "missing run: " + path.string());
  }
  CsvTable t;
  std::istringstream in(ReadTextFile(path.string()));
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    for (auto f : Split(line, ',')) fields.emplace_back(f);
    if (header) {
      for (size_t j = 0; j < fields.size(); ++j) t.columns[fields[j]] = j;
      header = false;
    } else {
      t.rows.push_back(std::move(fields));
    }
  }
  return t;
}

bool Near(double a, double b) { return std::fabs(a - b) < 1e-6; }

std::string F(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

// Value of `col` for (group, category) in rows matching `match`.
class Lookup {
 public:
  explicit Lookup(CsvTable t) : t_(std::move(t)) {}

  std::optional<double> Get(
      const std::function<bool(const std::vector<std::string>&)>& match,
      int g, int c, const std::string& col) const {
    for (const auto& row : t_.rows) {
      if (*t_.Num(row, "group") == g && *t_.Num(row, "category") == c &&
          match(row)) {
        return t_.Num(row, col);
      }
    }
    return std::nullopt;
  }

  // Distinct values of `col` in file order.
  std::vector<double> Values(const std::string& col) const {
    std::vector<double> out;
    for (const auto& row : t_.rows) {
      const auto v = t_.Num(row, col);
      if (v && std::none_of(out.begin(), out.end(),
                            [&](double x) { return Near(x, *v); })) {
        out.push_back(*v);
      }
    }
    return out;
  }

  const CsvTable& table() const { return t_; }

 private:
  CsvTable t_;
};

class Validator {
 public:
  Validator(std::filesystem::path root, const ValidationOptions& options)
      : root_(std::move(root)), k_(options.k), tol_(DefaultTolerances()) {
    for (const auto& [name, value] : options.tolerance_overrides) {
      if (!tol_.count(name)) {
        throw Error(ErrorCode::kInvalidArgument, "unknown tolerance '" + name + "'");
      }
      LogLine("validate: tolerance override " + name + "=" + FormatFixed(value) +
              " (default " + FormatFixed(tol_[name]) + ")");
      tol_[name] = value;
    }
  }

  Lookup Run(const std::string& kind) const {
    return Lookup(LoadCsv(root_ / kind / (kind + ".csv")));
  }

  CsvTable Raw(const std::string& kind, const std::string& file) const {
    return LoadCsv(root_ / kind / file);
  }

  double tol(const std::string& name) const { return tol_.at(name); }
  size_t k() const { return k_; }

  // Own-category output (or input) PR averaged over both groups of a
  // symmetric sweep row.
  std::function<bool(const std::vector<std::string>&)> SweepAt(
      const Lookup& l, const std::string& col, double v) const {
    return [&l, col, v, k = k_](const std::vector<std::string>& row) {
      return *l.table().Num(row, "k") == static_cast<double>(k) &&
             Near(*l.table().Num(row, col), v);
    };
  }

 private:
  std::filesystem::path root_;
  size_t k_;
  std::map<std::string, double> tol_;
};

struct Outcome {
  bool ok = true;
  std::string detail;

  void Check(bool cond, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += (cond ? "" : "FAILED ") + what;
    ok = ok && cond;
  }
};

double Req(const std::optional<double>& v, const std::string& what) {
  if (!v) throw Error(ErrorCode::kParse, "missing value: " + what);
  return *v;
}

double OwnPr(const Lookup& l,
             const std::function<bool(const std::vector<std::string>&)>& m,
             const std::string& col) {
  return 0.5 * (Req(l.Get(m, 0, 0, col), col) + Req(l.Get(m, 1, 1, col), col));
}

Outcome Criterion3(const Validator& v) {
  const Lookup sym = v.Run("symmetric_sweep");
  Outcome o;
  for (double rho : {0.50, 0.55, 0.60}) {
    const auto m = v.SweepAt(sym, "rho1", rho);
    const double in = OwnPr(sym, m, "pr_in"), out = OwnPr(sym, m, "pr_out");
    o.Check(out <= in + v.tol("c3_noise"),
            "rho=" + F(rho) + " out " + F(out) + " <= in " + F(in) + "+" +
                F(v.tol("c3_noise")));
  }
  const double p70 = OwnPr(sym, v.SweepAt(sym, "rho1", 0.70), "pr_out");
  const double p80 = OwnPr(sym, v.SweepAt(sym, "rho1", 0.80), "pr_out");
  o.Check(p80 >= p70 + v.tol("c3_jump"),
          "out(0.80) " + F(p80) + " >= out(0.70) " + F(p70) + "+" + F(v.tol("c3_jump")));
  o.Check(p80 >= v.tol("c3_peak"),
          "out(0.80) " + F(p80) + " >= " + F(v.tol("c3_peak")));
  return o;
}

Outcome Criterion4(const Validator& v) {
  const Lookup sym = v.Run("symmetric_sweep");
  Outcome o;
  for (double rho : sym.Values("rho1")) {
    if (rho < 0.75 - 1e-9) continue;
    const auto m = v.SweepAt(sym, "rho1", rho);
    const double cand = OwnPr(sym, m, "candidate_pr");
    const double out = OwnPr(sym, m, "pr_out");
    o.Check(cand <= out - v.tol("c4_gap"),
            "rho=" + F(rho) + " cand " + F(cand) + " <= rec " + F(out) + "-" +
                F(v.tol("c4_gap")));
  }
  return o;
}

Outcome Criterion5(const Validator& v) {
  const Lookup asym = v.Run("asymmetric_sweep");
  const Lookup sym = v.Run("symmetric_sweep");
  Outcome o;
  for (double rho : asym.Values("rho1")) {
    if (rho < 0.75 - 1e-9) continue;
    const auto ma = v.SweepAt(asym, "rho1", rho);
    const double adopt = Req(asym.Get(ma, 1, 0, "pr_out"), "G2/C1");
    o.Check(adopt > v.tol("c5_adopt"),
            "rho1=" + F(rho) + " PR(G2,C1) " + F(adopt) + " > " + F(v.tol("c5_adopt")));
    const double g1_asym = Req(asym.Get(ma, 0, 0, "pr_out"), "G1/C1");
    const double g1_sym =
        Req(sym.Get(v.SweepAt(sym, "rho1", rho), 0, 0, "pr_out"), "sym G1/C1");
    o.Check(g1_asym > g1_sym, "rho1=" + F(rho) + " PR(G1,C1) asym " + F(g1_asym) +
                                  " > sym " + F(g1_sym));
  }
  return o;
}

Outcome Criterion6(const Validator& v) {
  const Lookup gs = v.Run("group_size_sweep");
  const double tol = v.tol("c6_tol");
  Outcome o;
  for (double phi : gs.Values("phi")) {
    const auto m = v.SweepAt(gs, "phi", phi);
    const double in1 = Req(gs.Get(m, 0, 0, "pr_in"), "pr_in");
    const double out1 = Req(gs.Get(m, 0, 0, "pr_out"), "pr_out");
    const double out2 = Req(gs.Get(m, 1, 1, "pr_out"), "pr_out");
    if (phi <= 0.30 + 1e-9) {
      o.Check(out1 < in1 - tol, "phi=" + F(phi) + " BD(G1,C1)<0: out " + F(out1) +
                                    " < in " + F(in1) + "-" + F(tol));
    } else if (phi >= 0.35 - 1e-9 && phi <= 0.50 + 1e-9) {
      o.Check(out1 > 0.7 + tol && out2 > 0.7 + tol,
              "phi=" + F(phi) + " out G1 " + F(out1) + ", G2 " + F(out2) +
                  " > 0.7+" + F(tol));
    }
  }
  return o;
}

Outcome Criterion7(const Validator& v) {
  const Lookup cs = v.Run("category_size_sweep");
  Outcome o;
  for (double theta : cs.Values("theta")) {
    const double out = Req(cs.Get(v.SweepAt(cs, "theta", theta), 0, 0, "pr_out"), "pr_out");
    if (theta <= 0.5 + 1e-9) {
      o.Check(out > 0.7, "theta=" + F(theta) + " out " + F(out) + " > 0.7");
    } else if (theta >= 0.8 - 1e-9) {
      o.Check(out < theta, "theta=" + F(theta) + " out " + F(out) + " < theta");
    }
  }
  return o;
}

// Own-category data PR per iteration for one rho.
std::vector<double> OwnTrajectory(const Lookup& l, double rho) {
  std::vector<double> out;
  for (double t : l.Values("iteration")) {
    auto m = [&l, rho, t](const std::vector<std::string>& row) {
      return Near(*l.table().Num(row, "rho"), rho) &&
             Near(*l.table().Num(row, "iteration"), t);
    };
    out.push_back(OwnPr(l, m, "pr"));
  }
  return out;
}

Outcome Criterion8(const Validator& v) {
  const Lookup it = v.Run("iterative");
  Outcome o;
  double acc_sum = 0.0;
  size_t acc_n = 0;
  for (const auto& row : it.table().rows) {
    if (auto a = it.table().Num(row, "mean_accepted")) {
      acc_sum += *a;
      ++acc_n;
    }
  }
  const double acc = acc_n ? acc_sum / acc_n : 0.0;
  o.Check(std::fabs(acc - v.tol("c8_accept_center")) <= v.tol("c8_accept_tol"),
          "mean accepted " + F(acc) + " within " + F(v.tol("c8_accept_tol")) +
              " of " + F(v.tol("c8_accept_center")));
  for (double rho : it.Values("rho")) {
    const auto tr = OwnTrajectory(it, rho);
    const double d = tr.back() - tr.front();
    const std::string tag = "rho=" + F(rho) + " PR " + F(tr.front()) + "->" + F(tr.back());
    if (Near(rho, 0.6)) {
      o.Check(std::fabs(d) <= v.tol("c8_flat"), tag + " flat within " + F(v.tol("c8_flat")));
    } else if (Near(rho, 0.5)) {
      o.Check(d <= 0.0, tag + " non-increasing");
    } else if (rho >= 0.7 - 1e-9) {
      bool strict = true;
      for (size_t t = 1; t < tr.size(); ++t) strict = strict && tr[t] > tr[t - 1];
      o.Check(strict && d >= v.tol("c8_rise"),
              tag + " strictly increasing by >= " + F(v.tol("c8_rise")));
    }
  }
  return o;
}

Outcome Criterion9c(const Validator& v) {
  const Lookup gulm = v.Run("iterative_gulm");
  const Lookup plain = v.Run("iterative");
  Outcome o;
  for (double rho : gulm.Values("rho")) {
    const auto tg = OwnTrajectory(gulm, rho);
    const double dg = tg.back() - tg.front();
    if (rho <= 0.65 + 1e-9) {
      o.Check(std::fabs(dg) <= v.tol("c9_flat"),
              "rho=" + F(rho) + " GULM drift " + F(dg) + " within " + F(v.tol("c9_flat")));
    } else if (rho >= 0.8 - 1e-9) {
      const auto tp = OwnTrajectory(plain, rho);
      const double dp = tp.back() - tp.front();
      o.Check(dg < v.tol("c9_ratio") * dp,
              "rho=" + F(rho) + " GULM rise " + F(dg) + " < " + F(v.tol("c9_ratio")) +
                  " x plain rise " + F(dp));
    }
  }
  return o;
}

struct TableCell {
  int group, category;
  double bias_in, bias_out, bd;
};

// Gender x genre reference values (M=0, F=1; Action=0, Romance=1).
constexpr TableCell kUnbalancedTable[] = {
    {0, 0, 1.39, 1.67, 0.20}, {0, 1, 0.58, 0.28, -0.51},
    {1, 0, 0.97, 1.14, 0.17}, {1, 1, 1.03, 0.85, -0.17}};
constexpr TableCell kBalancedTable[] = {
    {0, 0, 1.40, 1.66, 0.18}, {0, 1, 0.57, 0.29, -0.49},
    {1, 0, 0.97, 1.08, 0.11}, {1, 1, 1.03, 0.92, -0.10}};

Outcome Criterion10(const Validator& v) {
  Outcome o;
  const CsvTable counts = v.Raw("movielens_table", "movielens_counts.csv");
  std::map<std::string, double> count;
  for (const auto& row : counts.rows) count[row.at(0)] = *counts.Num(row, "count");
  o.Check(count["users_M"] == 981 && count["users_F"] == 278,
          "users M=" + std::to_string(static_cast<int64_t>(count["users_M"])) +
              " F=" + std::to_string(static_cast<int64_t>(count["users_F"])) +
              " (expect 981/278)");

  auto any = [](const std::vector<std::string>&) { return true; };
  const Lookup table = v.Run("movielens_table");
  const double tol = v.tol("c10_bias");
  for (const TableCell& ref : kUnbalancedTable) {
    const std::string tag = std::string(ref.group ? "F" : "M") + "/" +
                            (ref.category ? "Romance" : "Action");
    const double bi = Req(table.Get(any, ref.group, ref.category, "bias_in"), tag);
    const double bo = Req(table.Get(any, ref.group, ref.category, "bias_out"), tag);
    const double bd = Req(table.Get(any, ref.group, ref.category, "bias_disparity"), tag);
    o.Check(std::fabs(bi - ref.bias_in) <= tol && std::fabs(bo - ref.bias_out) <= tol,
            tag + " " + F(bi) + "/" + F(bo) + " vs " + F(ref.bias_in) + "/" +
                F(ref.bias_out) + " +-" + F(tol));
    o.Check((bd > 0) == (ref.bd > 0), tag + " BD " + F(bd) + " sign");
    if (ref.group == 0 && ref.category == 0) {
      o.Check(std::fabs(bi - ref.bias_in) <= v.tol("c10_preprocessing"),
              "M/Action input bias " + F(bi) + " within " +
                  F(v.tol("c10_preprocessing")) + " of 1.39");
    }
  }
  const Lookup balanced = v.Run("movielens_balanced");
  for (const TableCell& ref : kBalancedTable) {
    const std::string tag = std::string("balanced ") + (ref.group ? "F" : "M") +
                            "/" + (ref.category ? "Romance" : "Action");
    const double bd =
        Req(balanced.Get(any, ref.group, ref.category, "bias_disparity"), tag);
    o.Check((bd > 0) == (ref.bd > 0), tag + " BD " + F(bd) + " sign");
  }
  return o;
}

struct CriterionDef {
  const char* id;
  const char* title;
  Outcome (*fn)(const Validator&);
};

constexpr CriterionDef kCriteria[] = {
    {"3", "symmetric sweep: low bias damped, sharp rise to peak", Criterion3},
    {"4", "candidate items less biased than recommendations", Criterion4},
    {"5", "asymmetric sweep: unbiased group adopts bias, G1 amplified", Criterion5},
    {"6", "group-size sweep: small group drawn, medium groups amplified", Criterion6},
    {"7", "category-size sweep: amplification and sign of input bias", Criterion7},
    {"8", "iterative dynamics: acceptance rate and reinforcement", Criterion8},
    {"9c", "iterative dynamics with GULM re-ranking", Criterion9c},
    {"10", "MovieLens gender x genre bias table", Criterion10},
};

}  // namespace

std::map<std::string, double> DefaultTolerances() {
  return {
      {"c3_noise", 0.02},       {"c3_jump", 0.05},
      {"c3_peak", 0.95},        {"c4_gap", 0.05},
      {"c5_adopt", 0.55},       {"c6_tol", 0.02},
      {"c8_accept_center", 7.0}, {"c8_accept_tol", 1.0},
      {"c8_flat", 0.02},        {"c8_rise", 0.03},
      {"c9_flat", 0.03},        {"c9_ratio", 0.5},
      {"c10_bias", 0.10},       {"c10_preprocessing", 0.05},
  };
}

std::vector<CriterionResult> ValidateRuns(const std::string& root,
                                          const ValidationOptions& options) {
  const Validator validator(root, options);
  for (const std::string& id : options.only) {
    if (std::none_of(std::begin(kCriteria), std::end(kCriteria),
                     [&](const CriterionDef& d) { return id == d.id; })) {
      throw Error(ErrorCode::kInvalidArgument, "unknown criterion '" + id + "'");
    }
  }
  std::vector<CriterionResult> results;
  for (const CriterionDef& def : kCriteria) {
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), def.id) ==
            options.only.end()) {
      continue;
    }
    const Outcome o = def.fn(validator);
    results.push_back({def.id, def.title,
                       o.ok ? CriterionStatus::kPass : CriterionStatus::kFail,
                       o.detail});
  }
  return results;
}

std::string FormatCriterion(const CriterionResult& r) {
  const char* status = r.status == CriterionStatus::kPass   ? "PASS   "
                       : r.status == CriterionStatus::kFail ? "FAIL   "
                                                            : "NOT RUN";
  return std::string(status) + " [" + r.id + "] " + r.title +
         (r.detail.empty() ? "" : ": " + r.detail);
}

bool AllPassed(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) {
    return r.status == CriterionStatus::kPass;
  });
}

}  // namespace biasd
