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

#include "experiment.h"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "csv.h"
#include "dynamics.h"
#include "error.h"
#include "ingest.h"
#include "json.hpp"
#include "log.h"
#include "metrics.h"
#include "parallel.h"
#include "recommender.h"
#include "rng.h"
#include "synthgen.h"

namespace biasd {
namespace {

struct KindEntry {
  ExperimentKind kind;
  const char* name;
};

constexpr KindEntry kKinds[] = {
    {ExperimentKind::kSymmetricSweep, "symmetric_sweep"},
    {ExperimentKind::kAsymmetricSweep, "asymmetric_sweep"},
    {ExperimentKind::kGroupSizeSweep, "group_size_sweep"},
    {ExperimentKind::kCategorySizeSweep, "category_size_sweep"},
    {ExperimentKind::kIterative, "iterative"},
    {ExperimentKind::kIterativeGulm, "iterative_gulm"},
    {ExperimentKind::kMovieLensTable, "movielens_table"},
    {ExperimentKind::kMovieLensBalanced, "movielens_balanced"},
};

std::string FormatShortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

[[noreturn]] void BadValue(const std::string& key, const std::string& value) {
  throw Error(ErrorCode::kInvalidArgument,
              "bad value for '" + key + "': '" + value + "'");
}

size_t ToCount(const std::string& key, const std::string& value) {
  const auto v = ParseUint(value);
  if (!v) BadValue(key, value);
  return static_cast<size_t>(*v);
}

double ToDouble(const std::string& key, const std::string& value) {
  const auto v = ParseDouble(value);
  if (!v) BadValue(key, value);
  return *v;
}

std::vector<size_t> ToCountList(const std::string& key, const std::string& value) {
  std::vector<size_t> out;
  for (auto tok : Split(value, ',')) out.push_back(ToCount(key, std::string(Trim(tok))));
  return out;
}

bool IsSweep(ExperimentKind k) {
  return k == ExperimentKind::kSymmetricSweep ||
         k == ExperimentKind::kAsymmetricSweep ||
         k == ExperimentKind::kGroupSizeSweep ||
         k == ExperimentKind::kCategorySizeSweep;
}

bool IsIterative(ExperimentKind k) {
  return k == ExperimentKind::kIterative || k == ExperimentKind::kIterativeGulm;
}

// ---------------------------------------------------------------------------
// Synthetic sweeps

struct SweepPoint {
  size_t k;
  double rho1, rho2, phi, theta;
};

struct SweepCell {
  std::optional<double> pr_in, pr_out, bias_in, bias_out, bd, candidate_pr;
};

std::vector<SweepPoint> SweepPoints(const ExperimentConfig& cfg) {
  std::vector<SweepPoint> pts;
  for (size_t k : cfg.k_list) {
    switch (cfg.kind) {
      case ExperimentKind::kSymmetricSweep:
        for (double rho : cfg.rho_grid) pts.push_back({k, rho, rho, 0.5, 0.5});
        break;
      case ExperimentKind::kAsymmetricSweep:
        for (double rho : cfg.rho_grid) pts.push_back({k, rho, cfg.rho2, 0.5, 0.5});
        break;
      case ExperimentKind::kGroupSizeSweep:
        for (double phi : cfg.phi_grid) pts.push_back({k, cfg.rho1, cfg.rho2, phi, 0.5});
        break;
      case ExperimentKind::kCategorySizeSweep:
        for (double th : cfg.theta_grid) pts.push_back({k, cfg.rho1, cfg.rho2, 0.5, th});
        break;
      default:
        break;
    }
  }
  return pts;
}

SyntheticConfig SynthFor(const ExperimentConfig& cfg, const SweepPoint& p,
                         uint64_t seed) {
  SyntheticConfig s;
  s.n_users = cfg.n_users;
  s.n_items = cfg.n_items;
  s.density = cfg.density;
  s.group_fraction = p.phi;
  s.category_fraction = p.theta;
  s.rho1 = p.rho1;
  s.rho2 = p.rho2;
  s.seed = seed;
  return s;
}

std::vector<SweepCell> CellsFromReport(const BiasReport& rep,
                                       const GroupCategoryCounts* candidates) {
  std::vector<SweepCell> cells;
  for (const BiasCell& c : rep.cells) {
    SweepCell s{c.pr_input, c.pr_output, c.bias_input, c.bias_output,
                c.bias_disparity, std::nullopt};
    if (candidates && candidates->GroupTotal(c.group) > 0) {
      s.candidate_pr = PreferenceRatio(*candidates, c.group, c.category);
    }
    cells.push_back(s);
  }
  return cells;
}

// Mean over trials of the defined values.
std::optional<double> MeanDefined(const std::vector<std::optional<double>>& xs) {
  double sum = 0.0;
  size_t n = 0;
  for (const auto& x : xs) {
    if (x) {
      sum += *x;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::string SweepPrefix(const SweepPoint& p, size_t g, size_t c) {
  return std::to_string(p.k) + ',' + FormatFixed(p.rho1) + ',' +
         FormatFixed(p.rho2) + ',' + FormatFixed(p.phi) + ',' +
         FormatFixed(p.theta) + ',' + std::to_string(g) + ',' +
         std::to_string(c);
}

std::string CellFields(const SweepCell& c) {
  return FormatFixed(c.pr_in) + ',' + FormatFixed(c.pr_out) + ',' +
         FormatFixed(c.bias_in) + ',' + FormatFixed(c.bias_out) + ',' +
         FormatFixed(c.bd) + ',' + FormatFixed(c.candidate_pr);
}

SweepCell AverageCells(const std::vector<const SweepCell*>& cells) {
  auto mean = [&](auto member) {
    std::vector<std::optional<double>> xs;
    for (const SweepCell* c : cells) xs.push_back(c->*member);
    return MeanDefined(xs);
  };
  return {mean(&SweepCell::pr_in),  mean(&SweepCell::pr_out),
          mean(&SweepCell::bias_in), mean(&SweepCell::bias_out),
          mean(&SweepCell::bd),      mean(&SweepCell::candidate_pr)};
}

void RunSweep(const ExperimentConfig& cfg, const std::vector<uint64_t>& seeds,
              const std::filesystem::path& dir, RunManifest& manifest) {
  const auto points = SweepPoints(cfg);
  // Validate every synthetic config before starting work.
  for (const SweepPoint& p : points) ResolveSizes(SynthFor(cfg, p, 0));

  const size_t n_cells = 4;
  std::vector<std::vector<SweepCell>> results(points.size() * cfg.trials);
  ParallelFor(results.size(), cfg.threads, [&](size_t task) {
    const SweepPoint& p = points[task / cfg.trials];
    const size_t trial = task % cfg.trials;
    try {
      const Dataset d = Generate(SynthFor(cfg, p, seeds[trial]));
      const RecommendationSet recs = Recommend(d.matrix, {.k = p.k, .r = cfg.r});
      const GroupCategoryCounts cand = CountCandidates(recs, d.labels);
      results[task] = CellsFromReport(
          MakeBiasReport(d.matrix, ToInteractionMatrix(recs), d.labels), &cand);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(KindName(cfg.kind)) + " k=" +
                                std::to_string(p.k) + " trial " +
                                std::to_string(trial) + ": " + e.what());
    }
  });

  std::string avg = std::string(kSweepHeader) + "\n";
  std::string raw = "trial,seed," + std::string(kSweepHeader) + "\n";
  for (size_t pi = 0; pi < points.size(); ++pi) {
    for (size_t cell = 0; cell < n_cells; ++cell) {
      const size_t g = cell / 2, c = cell % 2;
      std::vector<const SweepCell*> per_trial;
      for (size_t t = 0; t < cfg.trials; ++t) {
        const SweepCell& sc = results[pi * cfg.trials + t][cell];
        per_trial.push_back(&sc);
        raw += std::to_string(t) + ',' + std::to_string(seeds[t]) + ',' +
               SweepPrefix(points[pi], g, c) + ',' + CellFields(sc) + '\n';
      }
      avg += SweepPrefix(points[pi], g, c) + ',' +
             CellFields(AverageCells(per_trial)) + '\n';
    }
  }
  const std::string name = KindName(cfg.kind);
  WriteTextFile((dir / (name + ".csv")).string(), avg);
  WriteTextFile((dir / (name + "_trials.csv")).string(), raw);
  manifest.outputs.push_back(name + ".csv");
  manifest.outputs.push_back(name + "_trials.csv");
}

// ---------------------------------------------------------------------------
// Feedback loops

void RunIterative(const ExperimentConfig& cfg,
                  const std::vector<uint64_t>& seeds,
                  const std::filesystem::path& dir, RunManifest& manifest) {
  for (double rho : cfg.rho_grid) {
    ResolveSizes(SynthFor(cfg, {0, rho, rho, 0.5, 0.5}, 0));
  }
  const size_t T = cfg.iterations;
  std::vector<Trajectory> results(cfg.rho_grid.size() * cfg.trials);
  ParallelFor(results.size(), cfg.threads, [&](size_t task) {
    const double rho = cfg.rho_grid[task / cfg.trials];
    const size_t trial = task % cfg.trials;
    const Dataset d =
        Generate(SynthFor(cfg, {0, rho, rho, 0.5, 0.5}, seeds[trial]));
    DynamicsConfig dc;
    dc.iterations = T;
    dc.k = cfg.dynamics_k;
    dc.r = cfg.r;
    dc.seed = DeriveSeed(seeds[trial], {1});
    dc.reranker = cfg.kind == ExperimentKind::kIterativeGulm ? Reranker::kGulm
                                                             : Reranker::kNone;
    results[task] = RunDynamics(d.matrix, d.labels, dc);
  });

  std::string avg = std::string(kIterativeHeader) + "\n";
  std::string raw = "trial,seed," + std::string(kIterativeHeader) + "\n";
  for (size_t ri = 0; ri < cfg.rho_grid.size(); ++ri) {
    const std::string rho = FormatFixed(cfg.rho_grid[ri]);
    for (size_t t = 0; t <= T; ++t) {
      std::vector<std::optional<double>> acc;
      for (size_t trial = 0; trial < cfg.trials; ++trial) {
        acc.push_back(results[ri * cfg.trials + trial].points[t].mean_accepted);
      }
      const auto mean_acc = MeanDefined(acc);
      for (size_t cell = 0; cell < 4; ++cell) {
        std::vector<std::optional<double>> pr, bias;
        for (size_t trial = 0; trial < cfg.trials; ++trial) {
          const TrajectoryPoint& p = results[ri * cfg.trials + trial].points[t];
          const TrajectoryCell& c = p.cells[cell];
          pr.push_back(c.pr);
          bias.push_back(c.bias);
          raw += std::to_string(trial) + ',' + std::to_string(seeds[trial]) +
                 ',' + rho + ',' + std::to_string(t) + ',' +
                 std::to_string(c.group) + ',' + std::to_string(c.category) +
                 ',' + FormatFixed(c.pr) + ',' + FormatFixed(c.bias) + ',' +
                 FormatFixed(p.mean_accepted) + '\n';
        }
        avg += rho + ',' + std::to_string(t) + ',' + std::to_string(cell / 2) +
               ',' + std::to_string(cell % 2) + ',' +
               FormatFixed(MeanDefined(pr)) + ',' +
               FormatFixed(MeanDefined(bias)) + ',' + FormatFixed(mean_acc) +
               '\n';
      }
    }
  }
  const std::string name = KindName(cfg.kind);
  WriteTextFile((dir / (name + ".csv")).string(), avg);
  WriteTextFile((dir / (name + "_trials.csv")).string(), raw);
  manifest.outputs.push_back(name + ".csv");
  manifest.outputs.push_back(name + "_trials.csv");
}

// ---------------------------------------------------------------------------
// MovieLens

constexpr const char* kMovieLensUrl =
    "https://grouplens.org/datasets/movielens/1m/";

MovieLensDataset LoadMovieLens(const ExperimentConfig& cfg) {
  const std::filesystem::path dir(cfg.movielens_dir);
  for (const char* f : {"ratings.dat", "movies.dat", "users.dat"}) {
    if (cfg.movielens_dir.empty() || !std::filesystem::exists(dir / f)) {
      throw Error(ErrorCode::kIo,
                  "MovieLens 1M file " + (dir / f).string() +
                      " not found; set movielens_dir to the extracted ml-1m "
                      "directory (download: " + kMovieLensUrl + ")");
    }
  }
  const std::string digest = FileSha256((dir / "ratings.dat").string());
  LogLine("ingest: ratings.dat sha256 " + digest);
  if (!cfg.movielens_sha256.empty() && digest != cfg.movielens_sha256) {
    throw Error(ErrorCode::kIo, "ratings.dat checksum mismatch (expected " +
                                    cfg.movielens_sha256 + "); re-download from " +
                                    kMovieLensUrl);
  }
  auto open = [&](const char* f) {
    std::ifstream in(dir / f, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot read " + (dir / f).string());
    return in;
  };
  auto ratings_in = open("ratings.dat");
  auto movies_in = open("movies.dat");
  auto users_in = open("users.dat");
  BuildOptions opt;
  opt.genre_a = cfg.genre_a;
  opt.genre_b = cfg.genre_b;
  opt.min_ratings = cfg.min_ratings;
  opt.min_rating_value = cfg.min_rating_value;
  return BuildDataset(ParseRatings(ratings_in), ParseMovies(movies_in),
                      ParseUsers(users_in), opt);
}

std::string ReportRows(const BiasReport& rep) {
  std::ostringstream ss;
  WriteBiasReportCsv(rep, ss);
  std::string s = ss.str();
  return s.substr(s.find('\n') + 1);  // drop header
}

void RunMovieLens(const ExperimentConfig& cfg,
                  const std::vector<uint64_t>& seeds,
                  const std::filesystem::path& dir, RunManifest& manifest) {
  const MovieLensDataset full = LoadMovieLens(cfg);
  const std::string name = KindName(cfg.kind);
  auto put = [&](const std::string& file, const std::string& content) {
    WriteTextFile((dir / file).string(), content);
    manifest.outputs.push_back(file);
  };

  {
    std::ostringstream data, cats, ids;
    WriteDataset(full.data, data, cats);
    WriteIdMapCsv(full, ids);
    put("movielens_dataset.txt", data.str());
    put("movielens_categories.txt", cats.str());
    put("movielens_id_map.csv", ids.str());
    const auto& L = full.data.labels;
    put("movielens_counts.csv",
        "label,count\nusers_M," + std::to_string(L.n_groups() > 0 ? L.group_size(0) : 0) +
            "\nusers_F," + std::to_string(L.n_groups() > 1 ? L.group_size(1) : 0) +
            "\nitems_" + cfg.genre_a + "," + std::to_string(full.genre_a_items) +
            "\nitems_" + cfg.genre_b + "," + std::to_string(full.genre_b_items) +
            "\ndual_genre_excluded," + std::to_string(full.dual_genre_excluded) +
            "\n");
  }

  auto run_one = [&](const Dataset& d) {
    const RecommendationSet recs =
        Recommend(d.matrix, {.k = cfg.movielens_k, .r = cfg.r, .threads = cfg.threads});
    return MakeBiasReport(d.matrix, ToInteractionMatrix(recs), d.labels);
  };

  if (cfg.kind == ExperimentKind::kMovieLensTable) {
    std::ostringstream ss;
    WriteBiasReportCsv(run_one(full.data), ss);
    put(name + ".csv", ss.str());
    return;
  }

  std::vector<BiasReport> reports(cfg.trials);
  for (size_t t = 0; t < cfg.trials; ++t) {
    reports[t] = run_one(BalanceGroups(full, seeds[t]).data);
  }
  std::string raw = "trial,seed," + std::string(kBiasReportHeader) + "\n";
  for (size_t t = 0; t < cfg.trials; ++t) {
    std::istringstream rows(ReportRows(reports[t]));
    for (std::string line; std::getline(rows, line);) {
      raw += std::to_string(t) + ',' + std::to_string(seeds[t]) + ',' + line + '\n';
    }
  }
  BiasReport avg = reports.front();
  for (size_t cell = 0; cell < avg.cells.size(); ++cell) {
    auto mean = [&](std::optional<double> BiasCell::*member) {
      std::vector<std::optional<double>> xs;
      for (const auto& r : reports) xs.push_back(r.cells[cell].*member);
      return MeanDefined(xs);
    };
    BiasCell& c = avg.cells[cell];
    c.pr_input = mean(&BiasCell::pr_input);
    c.pr_output = mean(&BiasCell::pr_output);
    c.bias_input = mean(&BiasCell::bias_input);
    c.bias_output = mean(&BiasCell::bias_output);
    c.bias_disparity = mean(&BiasCell::bias_disparity);
  }
  std::ostringstream ss;
  WriteBiasReportCsv(avg, ss);
  put(name + ".csv", ss.str());
  put(name + "_trials.csv", raw);
}

}  // namespace

const char* KindName(ExperimentKind kind) {
  for (const auto& e : kKinds) {
    if (e.kind == kind) return e.name;
  }
  return "unknown";
}

ExperimentKind ParseKind(std::string_view name) {
  for (const auto& e : kKinds) {
    if (name == e.name) return e.kind;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown experiment kind '" + std::string(name) + "'");
}

const std::vector<ExperimentKind>& AllKinds() {
  static const std::vector<ExperimentKind> kinds = [] {
    std::vector<ExperimentKind> v;
    for (const auto& e : kKinds) v.push_back(e.kind);
    return v;
  }();
  return kinds;
}

std::vector<double> ParseGrid(std::string_view text) {
  text = Trim(text);
  std::vector<double> out;
  const auto bad = [&] {
    throw Error(ErrorCode::kInvalidArgument, "bad grid '" + std::string(text) + "'");
  };
  if (text.find(':') != std::string_view::npos) {
    const auto f = Split(text, ':');
    if (f.size() != 3) bad();
    const auto start = ParseDouble(Trim(f[0]));
    const auto step = ParseDouble(Trim(f[1]));
    const auto stop = ParseDouble(Trim(f[2]));
    if (!start || !step || !stop || !(*step > 0.0) || *stop < *start) bad();
    const auto count =
        static_cast<size_t>(std::floor((*stop - *start) / *step + 1e-9)) + 1;
    for (size_t j = 0; j < count; ++j) {
      out.push_back(std::round((*start + j * *step) * 1e9) / 1e9);
    }
  } else {
    for (auto tok : Split(text, ',')) {
      const auto v = ParseDouble(Trim(tok));
      if (!v) bad();
      out.push_back(*v);
    }
  }
  if (out.empty()) bad();
  return out;
}

std::string FormatGrid(const std::vector<double>& grid) {
  std::string out;
  for (size_t j = 0; j < grid.size(); ++j) {
    if (j) out += ',';
    out += FormatShortest(grid[j]);
  }
  return out;
}

KeyValueConfig ExperimentConfig::ToKeyValues() const {
  KeyValueConfig kv;
  kv.Set("kind", KindName(kind));
  kv.Set("scale", scale);
  kv.Set("trials", std::to_string(trials));
  kv.Set("seed", std::to_string(seed));
  kv.Set("threads", std::to_string(threads));
  kv.Set("out", out_dir);
  kv.Set("n_users", std::to_string(n_users));
  kv.Set("n_items", std::to_string(n_items));
  kv.Set("density", FormatShortest(density));
  kv.Set("r", std::to_string(r));
  std::string ks;
  for (size_t j = 0; j < k_list.size(); ++j) {
    ks += (j ? "," : "") + std::to_string(k_list[j]);
  }
  kv.Set("k_list", ks);
  kv.Set("rho_grid", FormatGrid(rho_grid));
  kv.Set("rho1", FormatShortest(rho1));
  kv.Set("rho2", FormatShortest(rho2));
  kv.Set("phi_grid", FormatGrid(phi_grid));
  kv.Set("theta_grid", FormatGrid(theta_grid));
  kv.Set("iterations", std::to_string(iterations));
  kv.Set("dynamics_k", std::to_string(dynamics_k));
  kv.Set("movielens_dir", movielens_dir);
  kv.Set("movielens_sha256", movielens_sha256);
  kv.Set("min_ratings", std::to_string(min_ratings));
  kv.Set("genre_a", genre_a);
  kv.Set("genre_b", genre_b);
  kv.Set("min_rating_value", std::to_string(min_rating_value));
  kv.Set("movielens_k", std::to_string(movielens_k));
  return kv;
}

ExperimentConfig ResolveConfig(const KeyValueConfig& kv) {
  ExperimentConfig cfg;
  if (auto kind = kv.Get("kind")) {
    cfg.kind = ParseKind(*kind);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "config needs 'kind'");
  }
  cfg.scale = kv.Get("scale").value_or("paper");
  if (cfg.scale == "paper") {
    cfg.n_users = cfg.n_items = 1000;
    cfg.trials = 10;
  } else if (cfg.scale == "smoke") {
    cfg.n_users = cfg.n_items = 200;
    cfg.trials = 3;
  } else {
    BadValue("scale", cfg.scale);
  }
  const bool fig1 = cfg.kind == ExperimentKind::kSymmetricSweep ||
                    cfg.kind == ExperimentKind::kAsymmetricSweep;
  cfg.k_list = fig1 ? std::vector<size_t>{10, 50, 100} : std::vector<size_t>{50};
  cfg.rho_grid = ParseGrid("0.50:0.05:1.00");
  cfg.phi_grid = ParseGrid("0.05:0.05:0.95");
  cfg.theta_grid = ParseGrid("0.10:0.10:0.90");
  if (cfg.kind == ExperimentKind::kAsymmetricSweep) cfg.rho2 = 0.5;
  if (cfg.kind == ExperimentKind::kMovieLensTable) cfg.trials = 1;

  for (const auto& [key, value] : kv.values()) {
    if (key == "kind" || key == "scale") continue;
    if (key == "trials") cfg.trials = ToCount(key, value);
    else if (key == "seed") {
      const auto v = ParseUint(value);
      if (!v) BadValue(key, value);
      cfg.seed = *v;
    } else if (key == "threads") cfg.threads = ToCount(key, value);
    else if (key == "out") cfg.out_dir = value;
    else if (key == "n_users") cfg.n_users = ToCount(key, value);
    else if (key == "n_items") cfg.n_items = ToCount(key, value);
    else if (key == "density") cfg.density = ToDouble(key, value);
    else if (key == "r") cfg.r = ToCount(key, value);
    else if (key == "k_list") cfg.k_list = ToCountList(key, value);
    else if (key == "rho_grid") cfg.rho_grid = ParseGrid(value);
    else if (key == "rho1") cfg.rho1 = ToDouble(key, value);
    else if (key == "rho2") cfg.rho2 = ToDouble(key, value);
    else if (key == "phi_grid") cfg.phi_grid = ParseGrid(value);
    else if (key == "theta_grid") cfg.theta_grid = ParseGrid(value);
    else if (key == "iterations") cfg.iterations = ToCount(key, value);
    else if (key == "dynamics_k") cfg.dynamics_k = ToCount(key, value);
    else if (key == "movielens_dir") cfg.movielens_dir = value;
    else if (key == "movielens_sha256") cfg.movielens_sha256 = value;
    else if (key == "min_ratings") cfg.min_ratings = ToCount(key, value);
    else if (key == "genre_a") cfg.genre_a = value;
    else if (key == "genre_b") cfg.genre_b = value;
    else if (key == "min_rating_value") {
      cfg.min_rating_value = static_cast<int>(ToCount(key, value));
    } else if (key == "movielens_k") cfg.movielens_k = ToCount(key, value);
    else throw Error(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
  }

  if (cfg.trials == 0) BadValue("trials", "0");
  if (cfg.r == 0) BadValue("r", "0");
  if (cfg.k_list.empty()) BadValue("k_list", "");
  for (size_t k : cfg.k_list) {
    if (k == 0) BadValue("k_list", "0");
  }
  if (cfg.dynamics_k == 0) BadValue("dynamics_k", "0");
  if (cfg.movielens_k == 0) BadValue("movielens_k", "0");
  if (cfg.threads == 0) cfg.threads = ResolveThreads(0);
  return cfg;
}

std::vector<uint64_t> TrialSeeds(uint64_t root, size_t trials) {
  std::vector<uint64_t> seeds;
  for (size_t t = 0; t < trials; ++t) seeds.push_back(DeriveSeed(root, {t}));
  return seeds;
}

std::string RunManifest::ToJson() const {
  nlohmann::ordered_json j;
  j["kind"] = KindName(config.kind);
  j["library_version"] = kLibraryVersion;
  j["rng_algorithm"] = kRngAlgorithm;
  nlohmann::ordered_json c = nlohmann::ordered_json::object();
  const KeyValueConfig kv = config.ToKeyValues();
  for (const auto& [k, v] : kv.values()) c[k] = v;
  j["config"] = c;
  j["trial_seeds"] = trial_seeds;
  j["wall_clock_seconds"] = wall_seconds;
  j["outputs"] = outputs;
  return j.dump(2) + "\n";
}

RunManifest RunExperiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest manifest;
  manifest.config = cfg;
  manifest.trial_seeds = TrialSeeds(cfg.seed, cfg.trials);

  const std::filesystem::path dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + cfg.out_dir + ": " + ec.message());

  LogLine(std::string("experiment: ") + KindName(cfg.kind) + " scale=" +
          cfg.scale + " trials=" + std::to_string(cfg.trials) + " rng=" +
          kRngAlgorithm);
  if (IsSweep(cfg.kind)) {
    RunSweep(cfg, manifest.trial_seeds, dir, manifest);
  } else if (IsIterative(cfg.kind)) {
    RunIterative(cfg, manifest.trial_seeds, dir, manifest);
  } else {
    RunMovieLens(cfg, manifest.trial_seeds, dir, manifest);
  }
  manifest.wall_seconds = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - start)
                              .count();
  WriteTextFile((dir / "manifest.json").string(), manifest.ToJson());
  return manifest;
}

ExperimentConfig LoadManifestConfig(const std::string& manifest_path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ReadTextFile(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, manifest_path + ": " + e.what());
  }
  if (!j.contains("config") || !j["config"].is_object()) {
    throw Error(ErrorCode::kParse, manifest_path + ": missing config object");
  }
  KeyValueConfig kv;
  for (const auto& [k, v] : j["config"].items()) {
    if (!v.is_string()) throw Error(ErrorCode::kParse, "config values must be strings");
    if (v.get<std::string>().empty()) continue;
    kv.Set(k, v.get<std::string>());
  }
  return ResolveConfig(kv);
}

}  // namespace biasd
