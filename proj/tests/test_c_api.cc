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

// Exercises the library only through the public C header.

#include "biasd/biasd.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "movielens_fixture.h"
#include "test_util.h"

namespace {

struct Handles {
  biasd_dataset* ds = nullptr;
  biasd_recs* recs = nullptr;
  ~Handles() {
    biasd_recs_free(recs);
    biasd_dataset_free(ds);
  }
};

biasd_synth_config Small(double rho) {
  biasd_synth_config c;
  biasd_synth_config_init(&c);
  c.n_users = 80;
  c.n_items = 80;
  c.density = 0.1;
  c.rho1 = c.rho2 = rho;
  c.seed = 11;
  return c;
}

TEST(CApi, VersionAndStatusStrings) {
  EXPECT_STREQ(biasd_version(), "1.0.0");
  EXPECT_NE(std::string(biasd_rng_algorithm()).find("mt19937_64"), std::string::npos);
  EXPECT_STREQ(biasd_status_string(BIASD_OK), "ok");
  for (int s = BIASD_OK; s <= BIASD_ERR_INTERNAL; ++s) {
    EXPECT_GT(std::strlen(biasd_status_string(static_cast<biasd_status>(s))), 0u);
  }
}

TEST(CApi, GenerateRecommendReport) {
  testutil::TempDir dir("capi");
  const biasd_synth_config cfg = Small(0.8);
  size_t needed = 0;
  ASSERT_EQ(biasd_synth_describe(&cfg, nullptr, 0, &needed), BIASD_OK);
  std::string desc(needed + 1, '\0');
  ASSERT_EQ(biasd_synth_describe(&cfg, desc.data(), desc.size(), &needed), BIASD_OK);
  desc.resize(needed);
  EXPECT_EQ(desc, "G1=40 G2=40 C1=40 C2=40 s=8");
  char tiny[4];
  ASSERT_EQ(biasd_synth_describe(&cfg, tiny, sizeof tiny, &needed), BIASD_OK);
  EXPECT_EQ(std::strlen(tiny), 3u);

  Handles h;
  ASSERT_EQ(biasd_generate(&cfg, &h.ds), BIASD_OK) << biasd_last_error();
  size_t users, items, groups, cats;
  int64_t sel;
  ASSERT_EQ(biasd_dataset_info(h.ds, &users, &items, &groups, &cats, &sel), BIASD_OK);
  EXPECT_EQ(users, 80u);
  EXPECT_EQ(items, 80u);
  EXPECT_EQ(groups, 2u);
  EXPECT_EQ(cats, 2u);
  EXPECT_EQ(sel, 80 * 8);

  double pr0, pr1, prior, bias;
  ASSERT_EQ(biasd_preference_ratio(h.ds, 0, 0, &pr0), BIASD_OK);
  ASSERT_EQ(biasd_preference_ratio(h.ds, 0, 1, &pr1), BIASD_OK);
  EXPECT_NEAR(pr0 + pr1, 1.0, 1e-12);
  ASSERT_EQ(biasd_category_prior(h.ds, 0, &prior), BIASD_OK);
  EXPECT_DOUBLE_EQ(prior, 0.5);
  ASSERT_EQ(biasd_bias(h.ds, 0, 0, &bias), BIASD_OK);
  EXPECT_NEAR(bias, pr0 / prior, 1e-12);
  EXPECT_EQ(biasd_bias(h.ds, 2, 0, &bias), BIASD_ERR_INVALID_ARGUMENT);

  ASSERT_EQ(biasd_recommend(h.ds, 10, 5, 2, &h.recs), BIASD_OK);
  std::vector<uint32_t> ids(5);
  std::vector<double> util(5);
  size_t count = 0;
  ASSERT_EQ(biasd_recs_user(h.recs, 0, ids.data(), util.data(), ids.size(), &count),
            BIASD_OK);
  EXPECT_LE(count, 5u);
  for (size_t i = 1; i < count; ++i) EXPECT_GE(util[i - 1], util[i]);
  EXPECT_EQ(biasd_recs_user(h.recs, 80, nullptr, nullptr, 0, &count),
            BIASD_ERR_INVALID_ARGUMENT);
  double cand;
  EXPECT_EQ(biasd_candidate_preference_ratio(h.ds, h.recs, 0, 0, &cand), BIASD_OK);
  EXPECT_GT(cand, 0.5);

  const std::string report = dir / "report.csv";
  ASSERT_EQ(biasd_report_write(h.ds, h.recs, report.c_str()), BIASD_OK);
  EXPECT_EQ(testutil::Slurp(report).substr(0, 6), "group,");

  // Saved recommendations reload without candidate lists.
  const std::string path = dir / "recs.csv";
  ASSERT_EQ(biasd_recs_save(h.recs, path.c_str()), BIASD_OK);
  biasd_recs* back = nullptr;
  ASSERT_EQ(biasd_recs_load(h.ds, path.c_str(), &back), BIASD_OK);
  std::vector<uint32_t> ids2(5);
  size_t count2 = 0;
  ASSERT_EQ(biasd_recs_user(back, 0, ids2.data(), nullptr, ids2.size(), &count2),
            BIASD_OK);
  EXPECT_EQ(count2, count);
  EXPECT_EQ(ids2, ids);
  EXPECT_EQ(biasd_candidate_preference_ratio(h.ds, back, 0, 0, &cand),
            BIASD_ERR_UNSUPPORTED);
  const std::string report2 = dir / "report2.csv";
  ASSERT_EQ(biasd_report_write(h.ds, back, report2.c_str()), BIASD_OK);
  EXPECT_EQ(testutil::Slurp(report2), testutil::Slurp(report));
  biasd_recs_free(back);
}

TEST(CApi, DatasetRoundTripAndErrors) {
  testutil::TempDir dir("capi");
  Handles h;
  const biasd_synth_config cfg = Small(0.7);
  ASSERT_EQ(biasd_generate(&cfg, &h.ds), BIASD_OK);
  const std::string data = dir / "d.txt", cats = dir / "c.txt";
  ASSERT_EQ(biasd_dataset_save(h.ds, data.c_str(), cats.c_str()), BIASD_OK);
  biasd_dataset* back = nullptr;
  ASSERT_EQ(biasd_dataset_load(data.c_str(), cats.c_str(), &back), BIASD_OK);
  const std::string d2 = dir / "d2.txt", c2 = dir / "c2.txt";
  ASSERT_EQ(biasd_dataset_save(back, d2.c_str(), c2.c_str()), BIASD_OK);
  EXPECT_EQ(testutil::Slurp(d2), testutil::Slurp(data));
  EXPECT_EQ(testutil::Slurp(c2), testutil::Slurp(cats));
  biasd_dataset_free(back);

  biasd_dataset* none = nullptr;
  EXPECT_EQ(biasd_dataset_load((dir / "missing").c_str(), cats.c_str(), &none),
            BIASD_ERR_IO);
  EXPECT_NE(std::string(biasd_last_error()).find("missing"), std::string::npos);
  EXPECT_EQ(none, nullptr);
  testutil::Spit(dir / "bad.txt", "0 1 x\n");
  EXPECT_EQ(biasd_dataset_load((dir / "bad.txt").c_str(), cats.c_str(), &none),
            BIASD_ERR_PARSE);
  EXPECT_EQ(biasd_dataset_info(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr),
            BIASD_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(biasd_generate(nullptr, &none), BIASD_ERR_INVALID_ARGUMENT);

  biasd_synth_config bad = Small(0.7);
  bad.category_fraction = 0.01;
  bad.density = 0.9;
  EXPECT_NE(biasd_generate(&bad, &none), BIASD_OK);
  bad = Small(1.5);
  EXPECT_EQ(biasd_generate(&bad, &none), BIASD_ERR_INVALID_ARGUMENT);
}

TEST(CApi, BiasDisparity) {
  double bd = 0;
  ASSERT_EQ(biasd_bias_disparity(1.0, 1.5, &bd), BIASD_OK);
  EXPECT_DOUBLE_EQ(bd, 0.5);
  EXPECT_EQ(biasd_bias_disparity(0.0, 1.0, &bd), BIASD_ERR_ZERO_INPUT_BIAS);
}

TEST(CApi, RerankAndDynamics) {
  testutil::TempDir dir("capi");
  Handles h;
  const biasd_synth_config cfg = Small(0.8);
  ASSERT_EQ(biasd_generate(&cfg, &h.ds), BIASD_OK);
  ASSERT_EQ(biasd_recommend(h.ds, 10, 5, 1, &h.recs), BIASD_OK);
  biasd_recs* fixed = nullptr;
  const std::string plan = dir / "plan.csv";
  ASSERT_EQ(biasd_rerank(h.ds, h.recs, &fixed, plan.c_str()), BIASD_OK)
      << biasd_last_error();
  EXPECT_FALSE(testutil::Slurp(plan).empty());
  biasd_recs_free(fixed);
  fixed = nullptr;
  ASSERT_EQ(biasd_rerank(h.ds, h.recs, &fixed, nullptr), BIASD_OK);
  biasd_recs_free(fixed);

  biasd_dynamics_config dc;
  biasd_dynamics_config_init(&dc);
  dc.iterations = 2;
  dc.k = 10;
  dc.r = 5;
  const std::string a = dir / "a.csv", b = dir / "b.csv";
  ASSERT_EQ(biasd_dynamics_run(h.ds, &dc, a.c_str()), BIASD_OK);
  dc.threads = 4;
  ASSERT_EQ(biasd_dynamics_run(h.ds, &dc, b.c_str()), BIASD_OK);
  EXPECT_EQ(testutil::Slurp(a), testutil::Slurp(b));
  dc.use_gulm = 1;
  ASSERT_EQ(biasd_dynamics_run(h.ds, &dc, b.c_str()), BIASD_OK);
  EXPECT_EQ(biasd_dynamics_run(h.ds, &dc, (dir / "no/such/dir.csv").c_str()),
            BIASD_ERR_IO);
}

TEST(CApi, IngestAndBalance) {
  testutil::TempDir dir("capi");
  testutil::WriteMovieLens(dir.path(), testutil::MakeMovieLens(5));
  const std::string r = dir / "ratings.dat", m = dir / "movies.dat", u = dir / "users.dat";
  biasd_ingest_config ic;
  biasd_ingest_config_init(&ic);
  ic.ratings_path = r.c_str();
  ic.movies_path = m.c_str();
  ic.users_path = u.c_str();
  ic.min_ratings = 0;
  Handles h;
  ASSERT_EQ(biasd_ingest_movielens(&ic, &h.ds), BIASD_OK) << biasd_last_error();
  size_t users, items;
  ASSERT_EQ(biasd_dataset_info(h.ds, &users, &items, nullptr, nullptr, nullptr), BIASD_OK);
  EXPECT_EQ(users, 60u);
  EXPECT_EQ(items, 32u);
  const std::string ids = dir / "ids.csv";
  ASSERT_EQ(biasd_dataset_write_id_map(h.ds, ids.c_str()), BIASD_OK);
  EXPECT_FALSE(testutil::Slurp(ids).empty());

  biasd_dataset* bal = nullptr;
  ASSERT_EQ(biasd_balance_groups(h.ds, 3, &bal), BIASD_OK);
  ASSERT_EQ(biasd_dataset_info(bal, &users, nullptr, nullptr, nullptr, nullptr), BIASD_OK);
  EXPECT_EQ(users, 40u);
  biasd_dataset_free(bal);

  // Synthetic datasets carry no external ids but balance like any other.
  biasd_dataset* syn = nullptr;
  const biasd_synth_config cfg = Small(0.5);
  ASSERT_EQ(biasd_generate(&cfg, &syn), BIASD_OK);
  EXPECT_NE(biasd_dataset_write_id_map(syn, ids.c_str()), BIASD_OK);
  ASSERT_EQ(biasd_balance_groups(syn, 3, &bal), BIASD_OK);
  ASSERT_EQ(biasd_dataset_info(bal, &users, nullptr, nullptr, nullptr, nullptr), BIASD_OK);
  EXPECT_EQ(users, 80u);
  biasd_dataset_free(bal);
  biasd_dataset_free(syn);

  ic.ratings_path = "/nonexistent/ratings.dat";
  biasd_dataset* none = nullptr;
  EXPECT_EQ(biasd_ingest_movielens(&ic, &none), BIASD_ERR_IO);
}

void Collect(const char* line, void* user) {
  static_cast<std::vector<std::string>*>(user)->push_back(line);
}

TEST(CApi, ExperimentConfigAndLogCallback) {
  testutil::TempDir dir("capi");
  EXPECT_STREQ(biasd_experiment_kind_name(0), "symmetric_sweep");
  size_t n_kinds = 0;
  while (biasd_experiment_kind_name(n_kinds) != nullptr) ++n_kinds;
  EXPECT_EQ(n_kinds, 8u);

  biasd_experiment* exp = nullptr;
  ASSERT_EQ(biasd_experiment_new(&exp), BIASD_OK);
  const std::string cfg_path = dir / "exp.cfg";
  testutil::Spit(cfg_path, "kind = group_size_sweep\nscale = smoke\n");
  ASSERT_EQ(biasd_experiment_load_file(exp, cfg_path.c_str()), BIASD_OK);
  const std::string out = dir / "run";
  for (auto [k, v] : std::vector<std::pair<const char*, std::string>>{
           {"out", out}, {"trials", "1"}, {"n_users", "60"}, {"n_items", "60"},
           {"density", "0.1"}, {"k_list", "5"}, {"phi_grid", "0.3"}}) {
    ASSERT_EQ(biasd_experiment_set(exp, k, v.c_str()), BIASD_OK);
  }
  char buf[64];
  size_t needed = 0;
  ASSERT_EQ(biasd_experiment_get(exp, "kind", buf, sizeof buf, &needed), BIASD_OK);
  EXPECT_STREQ(buf, "group_size_sweep");
  EXPECT_EQ(biasd_experiment_get(exp, "seed", buf, sizeof buf, &needed),
            BIASD_ERR_INVALID_ARGUMENT);

  std::vector<std::string> lines;
  biasd_set_log_callback(Collect, &lines);
  ASSERT_EQ(biasd_experiment_run(exp), BIASD_OK) << biasd_last_error();
  biasd_set_log_callback(nullptr, nullptr);
  ASSERT_FALSE(lines.empty());
  EXPECT_EQ(lines[0].rfind("experiment: group_size_sweep", 0), 0u);

  biasd_experiment* again = nullptr;
  ASSERT_EQ(biasd_experiment_new(&again), BIASD_OK);
  ASSERT_EQ(biasd_experiment_load_manifest(again, (out + "/manifest.json").c_str()),
            BIASD_OK);
  ASSERT_EQ(biasd_experiment_get(again, "phi_grid", buf, sizeof buf, &needed), BIASD_OK);
  EXPECT_EQ(std::string(buf), "0.3");
  ASSERT_EQ(biasd_experiment_set(again, "out", (dir / "rerun").c_str()), BIASD_OK);
  ASSERT_EQ(biasd_experiment_run(again), BIASD_OK);
  EXPECT_EQ(testutil::Slurp(dir / "rerun/group_size_sweep.csv"),
            testutil::Slurp(out + "/group_size_sweep.csv"));

  ASSERT_EQ(biasd_experiment_set(again, "bogus", "1"), BIASD_OK);
  EXPECT_EQ(biasd_experiment_run(again), BIASD_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(biasd_last_error()).find("bogus"), std::string::npos);
  EXPECT_EQ(biasd_experiment_load_file(again, "/nonexistent.cfg"), BIASD_ERR_IO);
  biasd_experiment_free(again);
  biasd_experiment_free(exp);
}

TEST(CApi, ValidateReportsPerCriterion) {
  testutil::TempDir dir("capi");
  std::vector<std::string> lines;
  int all = 1;
  const char* only[] = {"8"};
  EXPECT_EQ(biasd_validate(dir.path().c_str(), nullptr, 0, only, 1, 50, Collect, &lines,
                           &all),
            BIASD_ERR_IO);
  const char* bad_tol[] = {"c8_unknown=1"};
  EXPECT_EQ(biasd_validate(dir.path().c_str(), bad_tol, 1, only, 1, 50, Collect, &lines,
                           &all),
            BIASD_ERR_INVALID_ARGUMENT);
  const char* bad_value[] = {"c8_flat=abc"};
  EXPECT_EQ(biasd_validate(dir.path().c_str(), bad_value, 1, only, 1, 50, Collect, &lines,
                           &all),
            BIASD_ERR_INVALID_ARGUMENT);

  std::filesystem::create_directories(dir.path() / "iterative");
  std::string csv = "rho,iteration,group,category,pr,bias,mean_accepted\n";
  for (int t = 0; t < 2; ++t) {
    for (int g = 0; g < 2; ++g) {
      for (int c = 0; c < 2; ++c) {
        csv += "0.600000," + std::to_string(t) + "," + std::to_string(g) + "," +
               std::to_string(c) + (g == c ? ",0.600000,1.200000," : ",0.400000,0.800000,") +
               (t == 0 ? "NA" : "7.000000") + "\n";
      }
    }
  }
  testutil::Spit(dir / "iterative/iterative.csv", csv);
  lines.clear();
  ASSERT_EQ(biasd_validate(dir.path().c_str(), nullptr, 0, only, 1, 50, Collect, &lines,
                           &all),
            BIASD_OK)
      << biasd_last_error();
  EXPECT_EQ(all, 1);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0].rfind("PASS", 0), 0u);

  const char* strict[] = {"c8_accept_center=9"};
  lines.clear();
  ASSERT_EQ(biasd_validate(dir.path().c_str(), strict, 1, only, 1, 50, Collect, &lines,
                           &all),
            BIASD_OK);
  EXPECT_EQ(all, 0);
  EXPECT_EQ(lines.back().rfind("FAIL", 0), 0u);
}

TEST(CApi, NullHandlesAreRejected) {
  EXPECT_EQ(biasd_recommend(nullptr, 5, 5, 1, nullptr), BIASD_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(biasd_experiment_run(nullptr), BIASD_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(biasd_validate(nullptr, nullptr, 0, nullptr, 0, 50, nullptr, nullptr, nullptr),
            BIASD_ERR_INVALID_ARGUMENT);
  biasd_dataset_free(nullptr);
  biasd_recs_free(nullptr);
  biasd_experiment_free(nullptr);
}

}  // namespace
