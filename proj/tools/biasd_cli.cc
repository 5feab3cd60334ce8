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

// Command-line front end. Talks to the library only through biasd.h.

#include <biasd/biasd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace {

namespace fs = std::filesystem;

enum Exit { kOk = 0, kValidation = 1, kUsage = 2, kIo = 3 };

int ExitFor(biasd_status s) {
  switch (s) {
    case BIASD_OK: return kOk;
    case BIASD_ERR_VALIDATION_FAILED: return kValidation;
    case BIASD_ERR_IO:
    case BIASD_ERR_PARSE: return kIo;
    default: return kUsage;
  }
}

// Thrown from command bodies; carries the exit code.
struct Abort {
  int code;
};

void Check(biasd_status s, const std::string& what) {
  if (s == BIASD_OK) return;
  std::cerr << "biasd: " << what << ": " << biasd_status_string(s) << ": "
            << biasd_last_error() << "\n";
  throw Abort{ExitFor(s)};
}

// Owning wrappers for the C handles.
struct Dataset {
  biasd_dataset* h = nullptr;
  ~Dataset() { biasd_dataset_free(h); }
};
struct Recs {
  biasd_recs* h = nullptr;
  ~Recs() { biasd_recs_free(h); }
};
struct Experiment {
  biasd_experiment* h = nullptr;
  ~Experiment() { biasd_experiment_free(h); }
};

std::string Join(const fs::path& dir, const char* name) {
  return (dir / name).string();
}

void MakeDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::cerr << "biasd: cannot create " << dir << ": " << ec.message() << "\n";
    throw Abort{kIo};
  }
}

void LoadDataset(const std::string& dir, Dataset& ds) {
  Check(biasd_dataset_load(Join(dir, "dataset.txt").c_str(),
                           Join(dir, "categories.txt").c_str(), &ds.h),
        "loading dataset from " + dir);
}

void SaveDataset(const std::string& dir, const Dataset& ds) {
  MakeDir(dir);
  Check(biasd_dataset_save(ds.h, Join(dir, "dataset.txt").c_str(),
                           Join(dir, "categories.txt").c_str()),
        "writing dataset to " + dir);
}

void PrintLine(const char* line, void*) { std::cout << line << "\n"; }
void LogToStderr(const char* line, void*) { std::cerr << line << "\n"; }

struct Common {
  std::string config;  // already expanded by ExpandConfig
  std::string out = ".";
  uint64_t seed = 1;
  uint32_t threads = 1;
};

void AddCommon(CLI::App* cmd, Common& c, bool with_seed) {
  cmd->add_option("--config", c.config, "key = value file with option defaults");
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  if (with_seed) cmd->add_option("--seed", c.seed, "random seed")->capture_default_str();
  cmd->add_option("--threads", c.threads, "worker threads (0 = all cores)")
      ->capture_default_str();
}

std::string TrimSpace(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Replaces `--config FILE` of a data verb with the `--key=value` options the
// file lists, placed right after the verb so that later flags win.
std::vector<std::string> ExpandConfig(std::vector<std::string> args) {
  static const char* kVerbs[] = {"generate", "recommend", "report",
                                 "rerank", "dynamics", "ingest"};
  size_t verb = 0;
  for (size_t i = 1; i < args.size() && verb == 0; ++i) {
    for (const char* v : kVerbs) {
      if (args[i] == v) verb = i;
    }
    if (args[i] == "experiment" || args[i] == "validate") break;
  }
  if (verb == 0) return args;
  for (size_t i = verb + 1; i < args.size(); ++i) {
    std::string path;
    size_t n = 0;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      n = 2;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      n = 1;
    } else {
      continue;
    }
    std::ifstream in(path);
    if (!in) {
      std::cerr << "biasd: cannot read config " << path << "\n";
      throw Abort{kIo};
    }
    std::vector<std::string> injected;
    int line_no = 0;
    for (std::string line; std::getline(in, line);) {
      ++line_no;
      line = TrimSpace(line.substr(0, line.find('#')));
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        std::cerr << "biasd: " << path << ":" << line_no
                  << ": expected key = value\n";
        throw Abort{kUsage};
      }
      injected.push_back("--" + TrimSpace(line.substr(0, eq)) + "=" +
                         TrimSpace(line.substr(eq + 1)));
    }
    args.erase(args.begin() + i, args.begin() + i + n);
    args.insert(args.begin() + verb + 1, injected.begin(), injected.end());
    break;
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bias disparity toolkit"};
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "suppress run log on stderr");
  app.set_version_flag("--version", std::string(biasd_version()));

  // generate
  Common gen_c;
  biasd_synth_config synth;
  biasd_synth_config_init(&synth);
  auto* gen = app.add_subcommand("generate", "generate a synthetic dataset");
  AddCommon(gen, gen_c, true);
  gen->add_option("--n_users", synth.n_users)->capture_default_str();
  gen->add_option("--n_items", synth.n_items)->capture_default_str();
  gen->add_option("--group_fraction", synth.group_fraction, "share of users in G1")
      ->capture_default_str();
  gen->add_option("--category_fraction", synth.category_fraction,
                  "share of items in C1")
      ->capture_default_str();
  gen->add_option("--rho1", synth.rho1, "G1 preference for C1")->capture_default_str();
  gen->add_option("--rho2", synth.rho2, "G2 preference for C2")->capture_default_str();
  gen->add_option("--density", synth.density)->capture_default_str();

  // recommend
  Common rec_c;
  std::string rec_data;
  uint32_t rec_k = 50, rec_r = 10;
  auto* rec = app.add_subcommand("recommend", "top-r UserKNN recommendations");
  AddCommon(rec, rec_c, false);
  rec->add_option("--data", rec_data, "dataset directory")->required();
  rec->add_option("--k", rec_k, "neighbors")->capture_default_str();
  rec->add_option("--r", rec_r, "list length")->capture_default_str();

  // report
  Common rep_c;
  std::string rep_data, rep_recs;
  uint32_t rep_k = 50, rep_r = 10;
  auto* rep = app.add_subcommand("report", "bias report of recommendations");
  AddCommon(rep, rep_c, false);
  rep->add_option("--data", rep_data, "dataset directory")->required();
  rep->add_option("--recs", rep_recs,
                  "recommendations CSV (computed with --k/--r if omitted)");
  rep->add_option("--k", rep_k)->capture_default_str();
  rep->add_option("--r", rep_r)->capture_default_str();

  // rerank
  Common rr_c;
  std::string rr_data;
  uint32_t rr_k = 50, rr_r = 10;
  auto* rr = app.add_subcommand("rerank", "GULM re-ranking of recommendations");
  AddCommon(rr, rr_c, false);
  rr->add_option("--data", rr_data, "dataset directory")->required();
  rr->add_option("--k", rr_k)->capture_default_str();
  rr->add_option("--r", rr_r)->capture_default_str();

  // dynamics
  Common dyn_c;
  std::string dyn_data;
  biasd_dynamics_config dyn;
  biasd_dynamics_config_init(&dyn);
  bool dyn_gulm = false;
  auto* dy = app.add_subcommand("dynamics", "iterated recommend/accept loop");
  AddCommon(dy, dyn_c, true);
  dy->add_option("--data", dyn_data, "dataset directory")->required();
  dy->add_option("--iterations", dyn.iterations)->capture_default_str();
  dy->add_option("--k", dyn.k)->capture_default_str();
  dy->add_option("--r", dyn.r)->capture_default_str();
  dy->add_flag("--gulm", dyn_gulm, "re-rank before acceptance");

  // ingest
  Common ing_c;
  biasd_ingest_config ing;
  biasd_ingest_config_init(&ing);
  std::string ml_dir, ratings, movies, users, genre_a = "Action", genre_b = "Romance";
  bool balance = false;
  auto* in = app.add_subcommand("ingest", "build a dataset from MovieLens 1M");
  AddCommon(in, ing_c, true);
  in->add_option("--movielens-dir", ml_dir, "directory with the three .dat files");
  in->add_option("--ratings", ratings, "ratings.dat (overrides --movielens-dir)");
  in->add_option("--movies", movies, "movies.dat");
  in->add_option("--users", users, "users.dat");
  in->add_option("--genre-a", genre_a)->capture_default_str();
  in->add_option("--genre-b", genre_b)->capture_default_str();
  in->add_option("--min-ratings", ing.min_ratings)->capture_default_str();
  in->add_option("--min-rating-value", ing.min_rating_value,
                 "ratings below this are not selections")
      ->capture_default_str();
  in->add_flag("--balance", balance, "downsample M to the size of F using --seed");

  // experiment
  std::string exp_kind, exp_config, exp_manifest, exp_out = "runs", exp_scale,
                                                  exp_ml_dir;
  std::optional<uint64_t> exp_seed;
  std::optional<uint32_t> exp_threads;
  std::vector<std::string> exp_set;
  auto* ex = app.add_subcommand("experiment", "run a configured experiment");
  ex->add_option("--kind", exp_kind, "experiment kind, or 'all'");
  ex->add_option("--config", exp_config, "experiment config file");
  ex->add_option("--manifest", exp_manifest, "re-run the config of a manifest.json");
  ex->add_option("--out", exp_out, "root directory; outputs go to <out>/<kind>")
      ->capture_default_str();
  ex->add_option("--scale", exp_scale, "full size (paper) or reduced (smoke)")
      ->check(CLI::IsMember({"paper", "smoke"}));
  ex->add_option("--seed", exp_seed, "root seed");
  ex->add_option("--threads", exp_threads, "worker threads (0 = all cores)");
  ex->add_option("--movielens-dir", exp_ml_dir, "extracted ml-1m directory");
  ex->add_option("--set", exp_set, "extra key=value config override");

  // validate
  std::string val_root = "runs";
  std::vector<std::string> val_tol, val_only;
  uint32_t val_k = 50;
  auto* va = app.add_subcommand("validate", "check acceptance criteria on runs");
  va->add_option("--out", val_root, "root directory of experiment runs")
      ->capture_default_str();
  va->add_option("--tolerance", val_tol, "name=value tolerance override");
  va->add_option("--only", val_only, "criterion id to check (repeatable)");
  va->add_option("--k", val_k, "neighborhood size of sweep criteria")
      ->capture_default_str();

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = ExpandConfig(std::move(args));
    std::reverse(args.begin(), args.end());
    args.pop_back();  // program name
    app.parse(args);
  } catch (const Abort& a) {
    return a.code;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (!quiet) biasd_set_log_callback(LogToStderr, nullptr);

  try {
    if (gen->parsed()) {
      synth.seed = gen_c.seed;
      char buf[160];
      Check(biasd_synth_describe(&synth, buf, sizeof buf, nullptr), "generate");
      Dataset ds;
      Check(biasd_generate(&synth, &ds.h), "generate");
      SaveDataset(gen_c.out, ds);
      std::cout << buf << "\n";
    } else if (rec->parsed()) {
      Dataset ds;
      LoadDataset(rec_data, ds);
      Recs r;
      Check(biasd_recommend(ds.h, rec_k, rec_r, rec_c.threads, &r.h), "recommend");
      MakeDir(rec_c.out);
      Check(biasd_recs_save(r.h, Join(rec_c.out, "recommendations.csv").c_str()),
            "writing recommendations");
    } else if (rep->parsed()) {
      Dataset ds;
      LoadDataset(rep_data, ds);
      Recs r;
      if (rep_recs.empty()) {
        Check(biasd_recommend(ds.h, rep_k, rep_r, rep_c.threads, &r.h), "recommend");
      } else {
        Check(biasd_recs_load(ds.h, rep_recs.c_str(), &r.h), "reading " + rep_recs);
      }
      MakeDir(rep_c.out);
      Check(biasd_report_write(ds.h, r.h, Join(rep_c.out, "bias_report.csv").c_str()),
            "writing report");
    } else if (rr->parsed()) {
      Dataset ds;
      LoadDataset(rr_data, ds);
      Recs r, out;
      Check(biasd_recommend(ds.h, rr_k, rr_r, rr_c.threads, &r.h), "recommend");
      MakeDir(rr_c.out);
      Check(biasd_rerank(ds.h, r.h, &out.h, Join(rr_c.out, "rerank_plan.csv").c_str()),
            "rerank");
      Check(biasd_recs_save(out.h, Join(rr_c.out, "recommendations.csv").c_str()),
            "writing recommendations");
      Check(biasd_report_write(ds.h, out.h, Join(rr_c.out, "bias_report.csv").c_str()),
            "writing report");
    } else if (dy->parsed()) {
      Dataset ds;
      LoadDataset(dyn_data, ds);
      dyn.seed = dyn_c.seed;
      dyn.threads = dyn_c.threads;
      dyn.use_gulm = dyn_gulm ? 1 : 0;
      MakeDir(dyn_c.out);
      Check(biasd_dynamics_run(ds.h, &dyn, Join(dyn_c.out, "trajectory.csv").c_str()),
            "dynamics");
    } else if (in->parsed()) {
      auto pick = [&](const std::string& explicit_path, const char* name) {
        if (!explicit_path.empty()) return explicit_path;
        if (ml_dir.empty()) {
          std::cerr << "biasd: ingest needs --movielens-dir or --" << name
                    << "\n";
          throw Abort{kUsage};
        }
        return Join(ml_dir, (std::string(name) + ".dat").c_str());
      };
      const std::string rp = pick(ratings, "ratings");
      const std::string mp = pick(movies, "movies");
      const std::string up = pick(users, "users");
      ing.ratings_path = rp.c_str();
      ing.movies_path = mp.c_str();
      ing.users_path = up.c_str();
      ing.genre_a = genre_a.c_str();
      ing.genre_b = genre_b.c_str();
      Dataset ds;
      Check(biasd_ingest_movielens(&ing, &ds.h), "ingest");
      Dataset balanced;
      if (balance) {
        Check(biasd_balance_groups(ds.h, ing_c.seed, &balanced.h), "balance");
      }
      const Dataset& result = balance ? balanced : ds;
      SaveDataset(ing_c.out, result);
      Check(biasd_dataset_write_id_map(result.h, Join(ing_c.out, "id_map.csv").c_str()),
            "writing id map");
    } else if (ex->parsed()) {
      std::vector<std::string> kinds;
      if (exp_kind == "all") {
        for (size_t i = 0; biasd_experiment_kind_name(i) != nullptr; ++i) {
          const std::string k = biasd_experiment_kind_name(i);
          const bool ml = k.rfind("movielens", 0) == 0;
          if (ml && exp_ml_dir.empty()) {
            std::cerr << "biasd: skipping " << k << " (no --movielens-dir)\n";
            continue;
          }
          kinds.push_back(k);
        }
      } else {
        kinds.push_back(exp_kind);
      }
      for (const std::string& kind : kinds) {
        Experiment e;
        Check(biasd_experiment_new(&e.h), "experiment");
        if (!exp_manifest.empty()) {
          Check(biasd_experiment_load_manifest(e.h, exp_manifest.c_str()),
                "reading " + exp_manifest);
        }
        if (!exp_config.empty()) {
          Check(biasd_experiment_load_file(e.h, exp_config.c_str()),
                "reading " + exp_config);
        }
        auto set = [&](const std::string& k, const std::string& v) {
          Check(biasd_experiment_set(e.h, k.c_str(), v.c_str()), "config " + k);
        };
        if (!kind.empty()) set("kind", kind);
        if (!exp_scale.empty()) set("scale", exp_scale);
        if (exp_seed) set("seed", std::to_string(*exp_seed));
        if (exp_threads) set("threads", std::to_string(*exp_threads));
        if (!exp_ml_dir.empty()) set("movielens_dir", exp_ml_dir);
        for (const std::string& kv : exp_set) {
          const auto eq = kv.find('=');
          if (eq == std::string::npos) {
            std::cerr << "biasd: --set expects key=value, got '" << kv << "'\n";
            throw Abort{kUsage};
          }
          set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        // The kind may come from the manifest or config file.
        char kind_buf[64];
        Check(biasd_experiment_get(e.h, "kind", kind_buf, sizeof kind_buf, nullptr),
              "experiment needs --kind");
        const std::string dir_name = kind_buf;
        set("out", (fs::path(exp_out) / dir_name).string());
        Check(biasd_experiment_run(e.h), "experiment " + dir_name);
      }
    } else if (va->parsed()) {
      std::vector<const char*> tol, only;
      for (const auto& t : val_tol) {
        tol.push_back(t.c_str());
        std::cerr << "validate: tolerance override " << t << "\n";
      }
      for (const auto& o : val_only) only.push_back(o.c_str());
      int ok = 0;
      Check(biasd_validate(val_root.c_str(), tol.data(), tol.size(), only.data(),
                           only.size(), val_k, PrintLine, nullptr, &ok),
            "validate");
      return ok ? kOk : kValidation;
    }
  } catch (const Abort& a) {
    return a.code;
  }
  return kOk;
}
